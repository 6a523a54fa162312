"""Matrix exponential and phi-function kernel tests.

scipy.linalg.expm serves as the independent oracle for exp(A); the phi
matrices are checked against their defining recurrence and small-case
closed forms.
"""

import numpy as np
import pytest
from scipy.linalg import expm as scipy_expm

from expverk.matfun import (
    MAX_PHI_ORDER,
    matexp,
    matvec,
    phi_recurrence_residuals,
    phi_set,
)

from oracles import brute_matvec, random_symmetric_spectrum


def _rel_fro(X, Y):
    return np.linalg.norm(X - Y, "fro") / max(np.linalg.norm(Y, "fro"), 1e-300)


def test_matexp_matches_scipy_moderate_norms():
    rng = np.random.default_rng(101)
    for dim in (1, 2, 3, 5, 8, 13):
        A = rng.standard_normal((dim, dim))
        assert _rel_fro(matexp(A), scipy_expm(A)) < 1e-13


def test_matexp_matches_scipy_large_norms():
    """Norms up to ~1e3 force several scaling-and-squaring levels."""
    rng = np.random.default_rng(102)
    for scale in (10.0, 100.0, 1000.0):
        # Skew matrices keep exp(A) orthogonal, so entries stay O(1) and
        # the comparison is not dominated by overflow of a few entries.
        B = rng.standard_normal((6, 6))
        A = (B - B.T) * scale / np.linalg.norm(B - B.T, 1)
        assert _rel_fro(matexp(A), scipy_expm(A)) < 1e-11


def test_matexp_zero_matrix_is_exact_identity():
    E = matexp(np.zeros((4, 4)))
    assert np.array_equal(E, np.eye(4))


def test_matexp_scalar_case():
    val = matexp(np.array([[0.3]]))[0, 0]
    assert abs(val - np.exp(0.3)) < 1e-15


def test_matexp_inverse_and_semigroup():
    rng = np.random.default_rng(103)
    A = rng.standard_normal((5, 5))
    ident = np.eye(5)
    assert _rel_fro(matexp(A) @ matexp(-A), ident) < 1e-12
    assert _rel_fro(matexp(2.0 * A), matexp(A) @ matexp(A)) < 1e-12


def test_matexp_skew_gives_orthogonal():
    rng = np.random.default_rng(104)
    B = rng.standard_normal((6, 6))
    A = B - B.T
    E = matexp(A)
    assert _rel_fro(E.T @ E, np.eye(6)) < 1e-13


def test_matexp_rejects_bad_input():
    with pytest.raises(ValueError):
        matexp(np.ones((2, 3)))
    with pytest.raises(ValueError):
        matexp(np.ones(4))
    bad = np.eye(3)
    bad[1, 1] = np.inf
    with pytest.raises(ValueError):
        matexp(bad)


def test_phi_scalar_values_at_one():
    """phi_j(1) from the closed forms (e-1, e-2, e-5/2)."""
    ps = phi_set(np.array([[1.0]]), 3)
    e = np.e
    expected = (e, e - 1.0, e - 2.0, e - 2.5)
    for mat, want in zip(ps.matrices, expected):
        assert abs(mat[0, 0] - want) < 1e-14


def test_phi_at_zero_matrix():
    """phi_j(0) = I / j!."""
    ps = phi_set(np.zeros((3, 3)), 3)
    for j, mat in enumerate(ps.matrices):
        fact = float(np.prod(np.arange(1, j + 1))) if j else 1.0
        assert np.max(np.abs(mat - np.eye(3) / fact)) < 1e-15


def test_phi_set_order_zero_is_just_exp():
    A = np.array([[0.5, 0.1], [0.0, -0.2]])
    ps = phi_set(A, 0)
    assert ps.order == 0
    assert len(ps.matrices) == 1
    assert _rel_fro(ps.matrices[0], matexp(A)) == 0.0


def test_phi_recurrence_residuals_random_stiff_spectra():
    """A phi_{j+1} = phi_j - I/j! to ~1e-10 relative on stiff test matrices."""
    rng = np.random.default_rng(105)
    for _ in range(20):
        dim = int(rng.integers(2, 17))
        A = random_symmetric_spectrum(rng, dim, -50.0, 0.0, span=True)
        ps = phi_set(A, 3)
        res = phi_recurrence_residuals(A, ps)
        assert res.shape == (3,)
        assert np.max(res) <= 1e-10


def test_phi_set_rejects_orders_beyond_cap():
    A = np.eye(2)
    with pytest.raises(ValueError):
        phi_set(A, MAX_PHI_ORDER + 1)
    with pytest.raises(ValueError):
        phi_set(A, -1)
    with pytest.raises(ValueError):
        phi_set(A, 1.5)


def test_matvec_matches_brute_force():
    rng = np.random.default_rng(106)
    A = rng.standard_normal((7, 7))
    v = rng.standard_normal(7)
    assert np.max(np.abs(matvec(A, v) - brute_matvec(A, v))) < 1e-14


def test_matvec_shape_validation():
    with pytest.raises(ValueError):
        matvec(np.eye(3), np.ones(4))
    with pytest.raises(ValueError):
        matvec(np.ones(3), np.ones(3))
