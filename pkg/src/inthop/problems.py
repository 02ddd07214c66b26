"""Problem files and the shipped test corpus.

A problem file is UTF-8 text with one ``key: value`` pair per line::

    name: rosenbrock_2
    n: 2
    objective: 100*(x2 - x1^2)^2 + (1 - x1)^2
    x0: -1.2, 1
    fstar: 0

Blank lines and lines starting with ``#`` are ignored.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .core import Problem
from .expr import ParseError, parse_expr

__all__ = ["ProblemFileError", "parse_problem", "read_problem", "corpus_path", "load_corpus", "get_problem"]

REQUIRED = ("name", "n", "objective", "x0")


class ProblemFileError(ParseError):
    def __init__(self, msg: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = f"{path or '<text>'}" + (f":{line}" if line else "")
        super().__init__(f"{where}: {msg}")


def parse_problem(text: str, path=None) -> Problem:
    fields: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in REQUIRED + ("fstar",):
            raise ProblemFileError(f"unrecognised line {line!r}", path, lineno)
        if key in fields:
            raise ProblemFileError(f"duplicate key {key!r}", path, lineno)
        fields[key] = (value.strip(), lineno)
    for key in REQUIRED:
        if key not in fields:
            raise ProblemFileError(f"missing {key!r}", path)

    name, _ = fields["name"]
    n_text, n_line = fields["n"]
    try:
        n = int(n_text)
    except ValueError:
        raise ProblemFileError(f"n must be an integer, got {n_text!r}", path, n_line) from None
    if n < 1:
        raise ProblemFileError("n must be positive", path, n_line)

    obj_text, obj_line = fields["objective"]
    try:
        objective = parse_expr(obj_text, n)
    except ParseError as exc:
        raise ProblemFileError(f"objective: {exc}", path, obj_line) from exc

    x0_text, x0_line = fields["x0"]
    try:
        x0 = [float(v) for v in x0_text.split(",")]
    except ValueError:
        raise ProblemFileError(f"x0 is not a list of reals: {x0_text!r}", path, x0_line) from None
    if len(x0) != n:
        raise ProblemFileError(f"x0 has {len(x0)} entries, expected {n}", path, x0_line)

    fstar = None
    if "fstar" in fields:
        fs_text, fs_line = fields["fstar"]
        try:
            fstar = float(fs_text)
        except ValueError:
            raise ProblemFileError(f"fstar is not a real: {fs_text!r}", path, fs_line) from None
    return Problem(name, n, objective, x0, fstar)


def read_problem(path) -> Problem:
    path = Path(path)
    return parse_problem(path.read_text(encoding="utf-8"), path)


def corpus_path() -> Path:
    """Directory of the problem files shipped with the package."""
    return Path(str(resources.files("inthop") / "corpus"))


def load_corpus() -> list[Problem]:
    from .bench import load_problem_set

    return load_problem_set(corpus_path())


def get_problem(name: str, directory=None) -> Problem:
    from .bench import load_problem_set

    for p in load_problem_set(directory or corpus_path()):
        if p.name == name:
            return p
    raise KeyError(f"no problem named {name!r}")
