"""Exponential methods on a stiff homogeneous system y' = -M y.

With f = 0 every exponential method here reduces to multiplication by
e^{-hM}, so the global error sits at roundoff no matter how large h is.
Classical RK4 approximates the same flow with a degree-4 polynomial and
blows up as soon as h * lambda_max leaves its stability interval, which
for lambda_max = 1e4 means h below roughly 2.8e-4.
"""

import numpy as np

from expverk import DivergenceError, integrate, linear_homogeneous, matexp

rng = np.random.default_rng(7)
lam = np.logspace(0, 4, 12)  # eigenvalues 1 .. 1e4
Q, _ = np.linalg.qr(rng.standard_normal((12, 12)))
M = Q @ np.diag(lam) @ Q.T
y0 = Q @ np.ones(12)  # equal weight in every eigenmode

p = linear_homogeneous(M, y0, t_span=(0.0, 1.0))
exact = matexp(-1.0 * M) @ y0

methods = ("rk4", "mverk41", "sverk41", "erk-krogstad4")
print(f"{'h':>10s}  " + "".join(f"{m:>16s}" for m in methods))
for k in (1, 4, 7, 10, 12, 14):
    h = 2.0**-k
    cells = []
    for m in methods:
        try:
            with np.errstate(over="ignore"):
                tr = integrate(m, p, h, t_end=1.0)
            err = np.max(np.abs(tr.y_end - exact))
            cells.append(f"{err:16.2e}")
        except DivergenceError as exc:
            cells.append(f"{'diverged @' + str(exc.step):>16s}")
    print(f"{h:10.2e}  " + "".join(cells))

print()
print("lambda_max * h at the classical stability edge:",
      f"{2.785 / lam[-1]:.2e}")
