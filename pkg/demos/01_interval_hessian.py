"""Interval Hessian of a small nonconvex function and the shift it implies.

Run with ``python3 demos/01_interval_hessian.py``.
"""
import numpy as np

from inthop import differentiate, parse_expr
from inthop.expr import eval_scalar
from inthop.eigen import alpha_from_lambda, lambda_min_em, lambda_min_ggn, lambda_min_mk
from inthop.interval import IntervalVector

# Beale's function with its residuals left in factored form.  How an
# expression is written changes how tight its interval extension is, so the
# form matters here.
text = "(1.5 - x1*(1 - x2))^2 + (2.25 - x1*(1 - x2^2))^2 + (2.625 - x1*(1 - x2^3))^2"
f = parse_expr(text, 2)
grad, hess = differentiate(f, 2)

print("f(1, 1)        =", eval_scalar(f, [1.0, 1.0]))
print("H(0, 0)        =\n", hess([0.0, 0.0]))

# Enclose every Hessian entry over the box [0, 2] x [0, 2].
box = IntervalVector([0.0, 0.0], [2.0, 2.0])
ih = hess.interval(box)
for i in range(2):
    print("  ".join(f"[{ih.lo[i, j]:8.1f}, {ih.hi[i, j]:8.1f}]" for j in range(2)))

# Sampling the box gives a feel for how much the enclosure overestimates.
rng = np.random.default_rng(0)
pts = rng.uniform(0, 2, (20000, 2))
samples = np.array([hess(x) for x in pts])
print("sampled entry ranges:")
print("  h11 in", samples[:, 0, 0].min().round(2), samples[:, 0, 0].max().round(2))
print("  h12 in", samples[:, 0, 1].min().round(2), samples[:, 0, 1].max().round(2))
print("  h22 in", samples[:, 1, 1].min().round(2), samples[:, 1, 1].max().round(2))

# Three lower bounds on the smallest eigenvalue of any matrix in the box,
# and the uniform shift alpha that each one asks for.
for name, fn in [("Gerschgorin", lambda_min_ggn), ("E-matrix", lambda_min_em), ("Mori-Kokame", lambda_min_mk)]:
    lam = fn(ih)
    print(f"{name:12s} lambda >= {lam:9.2f}   alpha = {alpha_from_lambda(lam):8.2f}")

# The true smallest eigenvalue over the samples, for comparison
print("sampled min eigenvalue:", np.linalg.eigvalsh(samples)[:, 0].min().round(2))
