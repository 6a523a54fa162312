"""Cubic Schrodinger equation, Fourier pseudospectral in space.

The realified system keeps the L2 mass of the wave function invariant
(y . rhs(y) = 0), so the 2-norm of the state is a built-in diagnostic:
a healthy fourth-order run should hold it to a small multiple of h^4.
The convergence study then confirms the order on the full benchmark
span [0, 10].
"""

import numpy as np

from expverk import convergence_study, integrate, nls_pseudospectral, reference_solution, summarize

p = nls_pseudospectral()  # 16 Fourier modes, dim 32 after realification

print("mass drift along one trajectory (sverk41):")
print(f"{'h':>10s} {'max |norm(y_t) - norm(y_0)|':>30s}")
for k in (3, 4, 5):
    h = 2.0**-k
    tr = integrate("sverk41", p, h, t_end=10.0, record_states=True)
    norms = np.linalg.norm(tr.states, axis=1)
    drift = np.max(np.abs(norms - norms[0]))
    print(f"{h:10.2e} {drift:30.3e}")

print("\nconvergence on [0, 10]:")
ks = range(3, 8)
reference = reference_solution(p, 2.0 ** -max(ks), t_end=10.0)
for m in ("mverk41", "mverk42", "sverk41", "sverk42"):
    rep = convergence_study(p, m, ks, t_end=10.0, reference=reference, repeats=1)
    errs = "  ".join(f"{row.global_error:.2e}" for row in rep.rows)
    print(f"{summarize(rep)}   errors: {errs}")
