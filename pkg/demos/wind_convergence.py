"""Convergence on the wind-induced oscillation problem.

Runs the four new integrators and the two phi-function baselines over
h = 2^-4 .. 2^-8 on [0, 10], prints the fitted orders, and saves a
log-log error plot next to this script. All six lines should run
parallel to the dashed h^4 guide.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from expverk import convergence_study, reference_solution, summarize, wind_oscillation

p = wind_oscillation()  # theta = pi/2, r = 20
ks = range(4, 9)
t_end = 10.0

reference = reference_solution(p, 2.0 ** -max(ks), t_end=t_end)
methods = ("mverk41", "mverk42", "sverk41", "sverk42",
           "erk-hochbruck5", "erk-krogstad4")

reports = []
for m in methods:
    rep = convergence_study(p, m, ks, t_end=t_end, reference=reference, repeats=1)
    reports.append(rep)
    print(summarize(rep))

fig, ax = plt.subplots(figsize=(6, 4.5))
for rep in reports:
    hs = [row.h for row in rep.rows]
    errs = [row.global_error for row in rep.rows]
    ax.loglog(hs, errs, marker="o", label=rep.method)
guide_h = np.array([2.0**-4, 2.0**-8])
anchor = reports[0].rows[0].global_error
ax.loglog(guide_h, anchor * (guide_h / guide_h[0]) ** 4, "k--", label="h^4")
ax.set_xlabel("stepsize h")
ax.set_ylabel("global error at t = 10 (max norm)")
ax.set_title("wind oscillation, r = 20")
ax.legend(fontsize=8)
ax.grid(True, which="both", alpha=0.3)
out = os.path.join(os.path.dirname(__file__), "wind_convergence.png")
fig.savefig(out, dpi=150, bbox_inches="tight")
print(f"wrote {out}")
