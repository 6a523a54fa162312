"""Check the eight fourth-order conditions on Runge-Kutta tableaux.

Both built-in tableaux satisfy the conditions to roundoff. A perturbed
weight vector does not, and the report says which condition broke.
"""

import tempfile

import numpy as np

from expverk import Tableau, builtin, check_order4
from expverk.tableau import dump, load


def show(tab, title):
    report = check_order4(tab)
    print(title)
    for label, res in zip(report.labels, report.residuals):
        print(f"  {label:32s} residual {res: .3e}")
    verdict = "satisfied" if report.satisfied else "NOT satisfied"
    print(f"  -> order-4 conditions {verdict} (tol {report.tol:.0e})\n")
    return report


show(builtin("classical-rk4"), "classical RK4 tableau")
show(builtin("three-eighths"), "three-eighths rule tableau")

# Nudge one weight by 1e-3: the first condition (sum b_i = 1) must move
# by exactly the nudge, and the checker must refuse the tableau.
base = builtin("classical-rk4")
b_bad = base.b.copy()
b_bad[1] += 1e-3
bad = Tableau(A=base.A, b=b_bad, c=base.c)
report = show(bad, "classical RK4 with b_2 nudged by 1e-3")
assert not report.satisfied
assert abs(report.residuals[0] - 1e-3) < 1e-12

# Tableaux round-trip through JSON without losing a bit.
with tempfile.NamedTemporaryFile(suffix=".json", mode="w", delete=False) as fh:
    dump(base, fh.name)
    back = load(fh.name)
print("JSON round-trip bit-exact:", np.array_equal(back.A, base.A)
      and np.array_equal(back.b, base.b) and np.array_equal(back.c, base.c))
