"""Why the shifted Hessian gives a descent direction where Newton does not.

Run with ``python3 demos/02_shifted_newton_direction.py``.
"""
import numpy as np

from inthop import AlphaMethod, get_problem
from inthop.core import Objective
from inthop.solver import refresh_hessian, search_direction

# f(x) = x^4 - 3x^3 - 1.5x^2 + 10x is concave around x = 1
p = get_problem("quartic_1")
x = np.array([1.0])
g, H = p.gradient(x), p.hessian(x)
print(f"at x = 1: f = {p.f(x):.3f}, f' = {g[0]:.3f}, f'' = {H[0, 0]:.3f}")

newton = -np.linalg.solve(H, g)
print(f"Newton step {newton[0]:+.4f}: slope g*p = {float(g @ newton):+.3f} (uphill)")
print(f"  f(x + p) = {p.f(x + newton):.4f}")

# Shift by 2*alpha*I with alpha taken from an interval bound over a box of
# width delta around x.  Wider boxes need bigger shifts and shorter steps.
for delta in (0.1, 0.5, 2.0):
    st = refresh_hessian(Objective(p), x, delta, AlphaMethod.MK)
    step = search_direction(st, g)
    print(
        f"delta={delta:4.1f}: lambda bound {st.lam:8.3f}, alpha {st.alpha:7.3f}, "
        f"step {step[0]:+.4f}, f(x + p) = {p.f(x + step):.4f}"
    )
