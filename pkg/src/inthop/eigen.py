"""Minimum-eigenvalue bounds for symmetric interval matrices.

Three bounds are provided, from cheapest to tightest-in-practice:

* :func:`lambda_min_ggn` -- interval Gerschgorin discs, O(n^2).
* :func:`lambda_min_em`  -- midpoint/radius bound, O(n^3).
* :func:`lambda_min_mk`  -- lower-endpoint/width bound, O(n^3).

All three are guaranteed lower bounds on the smallest eigenvalue of every
symmetric point matrix inside the interval matrix.
"""
from __future__ import annotations

import numpy as np

from .core import AlphaMethod, Counters
from .interval import IntervalMatrix

__all__ = [
    "NonFiniteMatrix",
    "sym_eigen",
    "spectral_radius",
    "lambda_min_ggn",
    "lambda_min_em",
    "lambda_min_mk",
    "lambda_min_bound",
    "alpha_from_lambda",
]


class NonFiniteMatrix(ValueError):
    pass


def _eigvalsh(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise NonFiniteMatrix("matrix has non-finite entries")
    return np.linalg.eigvalsh(m)


def sym_eigen(m, counters: Counters | None = None) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix (one O(n^3) unit)."""
    if counters is not None:
        counters.n3_ops += 1
    return _eigvalsh(m)


def spectral_radius(m) -> float:
    ev = _eigvalsh(m)
    return float(np.max(np.abs(ev))) if ev.size else 0.0


def lambda_min_ggn(a: IntervalMatrix) -> float:
    """Gerschgorin lower bound ``min_i [lo_ii - sum_{j!=i} max|a_ij|]``."""
    mag = np.maximum(np.abs(a.lo), np.abs(a.hi))
    off = mag.sum(axis=1) - np.diag(mag)
    return float(np.min(np.diag(a.lo) - off))


def lambda_min_em(a: IntervalMatrix, counters: Counters | None = None, full_e: bool = False) -> float:
    """E-matrix bound ``lambda_min(A~_M + E) - rho(dA~ + |E|)``.

    ``A~_M`` is the midpoint matrix with the lower endpoints on its diagonal
    and ``dA~`` the radius matrix with a zero diagonal.  By default ``E`` is
    the diagonal of the radius matrix, so the bound equals
    ``lambda_min(A_M) - rho(dA)``.  ``full_e=True`` uses the whole radius
    matrix for ``E`` instead.
    """
    if counters is not None:
        counters.n3_ops += 1
    rad = a.rad
    mid_mod = a.mid.copy()
    np.fill_diagonal(mid_mod, np.diag(a.lo))
    rad_mod = rad.copy()
    np.fill_diagonal(rad_mod, 0.0)
    e = rad if full_e else np.diag(np.diag(rad))
    return float(_eigvalsh(mid_mod + e)[0] - spectral_radius(rad_mod + np.abs(e)))


def lambda_min_mk(a: IntervalMatrix, counters: Counters | None = None) -> float:
    """Mori-Kokame bound ``lambda_min(A_lo) - rho(A_hi - A_lo)``."""
    if counters is not None:
        counters.n3_ops += 1
    return float(_eigvalsh(a.lo)[0] - spectral_radius(a.hi - a.lo))


def lambda_min_bound(
    a: IntervalMatrix,
    method: AlphaMethod | str,
    counters: Counters | None = None,
    full_e: bool = False,
) -> float:
    method = AlphaMethod(method)
    if method is AlphaMethod.GGN:
        return lambda_min_ggn(a)
    if method is AlphaMethod.EM:
        return lambda_min_em(a, counters, full_e=full_e)
    return lambda_min_mk(a, counters)


def alpha_from_lambda(lambda_min_bound: float) -> float:
    """Uniform shift making ``H + 2*alpha*I`` convex: ``max(0, -lambda/2)``."""
    return max(0.0, -0.5 * float(lambda_min_bound))
