"""Dense matrix-function kernels: exp(A) and the phi functions.

The benchmark problems are small (dimension <= 64), so everything here is
plain float64 numpy on dense matrices. The exponential is scaling-and-
squaring with a degree-13 Pade core; the phi functions phi_1..phi_k come
from a single exponential of an augmented block matrix, which keeps one
code path responsible for all accuracy concerns.
"""

from dataclasses import dataclass
from math import ceil, factorial, log2

import numpy as np

# Highest phi order any integrator here needs (the fourth-order baselines
# stop at phi_3). Callers asking for more get an error, not an extension.
MAX_PHI_ORDER = 3

# Degree-13 Pade numerator coefficients and the 1-norm threshold under
# which the approximant's backward error stays below double roundoff
# (Higham 2005, Table 10.2).
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def _as_square(A, who):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{who}: expected a square matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError(f"{who}: matrix has non-finite entries")
    return A


def matexp(A):
    """Matrix exponential of a square real matrix.

    Scaling-and-squaring: A is scaled by 2**-s until its 1-norm is below
    the Pade-13 threshold, the rational approximant is evaluated with a
    single linear solve, and the result is squared s times.
    """
    A = _as_square(A, "matexp")
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    if norm == 0.0:
        # exp(0) = I exactly; the Pade solve would smear the diagonal by
        # an ulp through the triangular solve's reciprocal trick.
        return np.eye(n)
    if n == 1:
        # libm exp is correctly rounded; the Pade chain can land an ulp
        # off, and a fixed-step product amplifies that bias linearly.
        return np.exp(A)
    s = max(0, ceil(log2(norm / _THETA13))) if norm > _THETA13 else 0
    if s:
        A = A / (2.0**s)

    ident = np.eye(n)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A2 @ A4
    b = _PADE13
    U = A @ (
        A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
        + b[7] * A6
        + b[5] * A4
        + b[3] * A2
        + b[1] * ident
    )
    V = (
        A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
        + b[6] * A6
        + b[4] * A4
        + b[2] * A2
        + b[0] * ident
    )
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


@dataclass
class PhiSet:
    """exp(A) together with phi_1(A)..phi_k(A) for one argument A.

    matrices[0] is exp(A) and matrices[j] is phi_j(A). The defining
    recurrence phi_{j+1}(z) = (phi_j(z) - 1/j!)/z with phi_0 = exp holds
    up to roundoff; phi_recurrence_residuals measures it.
    """

    order: int
    matrices: tuple


def phi_set(A, k):
    """exp(A) and phi_1..phi_k from one augmented-matrix exponential.

    With W = [[A, E], [0, N]], E = [I, 0, ..., 0] and N the block shift
    with identities on its superdiagonal, the top block row of exp(W) is
    [exp(A), phi_1(A), ..., phi_k(A)].
    """
    A = _as_square(A, "phi_set")
    if not isinstance(k, int) or k < 0:
        raise ValueError(f"phi_set: order must be a non-negative integer, got {k!r}")
    if k > MAX_PHI_ORDER:
        raise ValueError(
            f"phi_set: order {k} exceeds the supported maximum {MAX_PHI_ORDER}"
        )
    if k == 0:
        return PhiSet(order=0, matrices=(matexp(A),))

    m = A.shape[0]
    W = np.zeros((m * (k + 1), m * (k + 1)))
    W[:m, :m] = A
    W[:m, m : 2 * m] = np.eye(m)
    for j in range(1, k):
        W[m * j : m * (j + 1), m * (j + 1) : m * (j + 2)] = np.eye(m)
    E = matexp(W)
    mats = [E[:m, :m]]
    for j in range(k):
        mats.append(E[:m, m * (j + 1) : m * (j + 2)])
    return PhiSet(order=k, matrices=tuple(mats))


def phi_recurrence_residuals(A, phis):
    """Relative residuals of A phi_{j+1}(A) = phi_j(A) - I/j!, j = 0..k-1.

    Each entry is scaled by the Frobenius norm of phi_j(A), matching the
    acceptance tolerance's normalization.
    """
    A = _as_square(A, "phi_recurrence_residuals")
    ident = np.eye(A.shape[0])
    out = []
    for j in range(phis.order):
        lhs = A @ phis.matrices[j + 1]
        rhs = phis.matrices[j] - ident / factorial(j)
        scale = max(np.linalg.norm(phis.matrices[j], "fro"), np.finfo(float).tiny)
        out.append(np.linalg.norm(lhs - rhs, "fro") / scale)
    return np.asarray(out)


def matvec(A, v):
    """A @ v with explicit shape validation."""
    A = np.asarray(A, dtype=float)
    v = np.asarray(v, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"matvec: expected a matrix, got ndim {A.ndim}")
    if v.ndim != 1 or v.shape[0] != A.shape[1]:
        raise ValueError(
            f"matvec: shape mismatch, matrix {A.shape} against vector {v.shape}"
        )
    return A @ v
