"""Benchmark problem constructors: operators, derivatives, exact solutions."""

import numpy as np
import pytest

import expverk.problems as pr
from oracles import fine_rk4


# ---------------------------------------------------------------------------
# differentiation matrices


def test_chebyshev_d2_exact_on_low_polynomials():
    """Spectral D^2 differentiates polynomials of degree <= n exactly."""
    x, D2 = pr.chebyshev_second_derivative(16)
    assert np.max(np.abs(D2 @ x**2 - 2.0)) < 1e-8
    assert np.max(np.abs(D2 @ x**3 - 6.0 * x)) < 1e-8


def test_chebyshev_points_run_from_plus_to_minus_one():
    x, _ = pr.chebyshev_second_derivative(8)
    assert abs(x[0] - 1.0) < 1e-15
    assert abs(x[-1] + 1.0) < 1e-15
    assert np.all(np.diff(x) < 0)


def test_chebyshev_rejects_tiny_n():
    with pytest.raises(ValueError):
        pr.chebyshev_second_derivative(1)


def test_periodic_spectral_d2_properties():
    n = 16
    length = 4.0 * np.sqrt(2.0) * np.pi
    x, D2 = pr.periodic_spectral_second_derivative(n, length)
    mu = 2.0 * np.pi / length
    # Symmetric, annihilates constants, and the documented diagonal value.
    assert np.max(np.abs(D2 - D2.T)) < 1e-12
    assert np.max(np.abs(D2 @ np.ones(n))) < 1e-10
    assert np.max(np.abs(np.diag(D2) - (-2.6875))) < 1e-12
    # Exact on the band-limited wave it will propagate.
    wave = np.cos(mu * x)
    assert np.max(np.abs(D2 @ wave + mu**2 * wave)) < 1e-10


def test_periodic_spectral_d2_rejects_odd_n():
    with pytest.raises(ValueError):
        pr.periodic_spectral_second_derivative(15, 1.0)


# ---------------------------------------------------------------------------
# wind-induced oscillation


def test_wind_linear_part_is_rotation_at_default_angle():
    p = pr.wind_oscillation()
    assert p.dim == 2
    assert np.array_equal(p.y0, np.array([1.0, 0.0]))
    assert np.max(np.abs(p.M + p.M.T)) < 1e-12  # skew
    assert abs(p.M[0, 1] - 20.0) < 1e-12


def test_wind_nonzero_damping_off_right_angle():
    p = pr.wind_oscillation(theta=np.pi / 3.0, r=10.0)
    assert abs(p.M[0, 0] - 10.0 * np.cos(np.pi / 3.0)) < 1e-12


def test_wind_rhs_composition():
    p = pr.wind_oscillation()
    y = np.array([0.3, -1.2])
    want = -(p.M @ y) + np.array([y[0] * y[1], 0.5 * (y[0] ** 2 - y[1] ** 2)])
    assert np.max(np.abs(p.rhs(y) - want)) == 0.0


# ---------------------------------------------------------------------------
# Allen-Cahn


def test_allen_cahn_dimensions_and_sign():
    p = pr.allen_cahn()
    assert p.dim == 31
    # -M = eps * D2 must be negative definite (diffusion decays).
    eig = np.linalg.eigvals(-p.M)
    assert np.max(eig.real) < 0.0


def test_allen_cahn_rhs_matches_pde_on_cubic_profile():
    """u = x^3 satisfies the boundary data, so rhs must equal
    eps*(u'') + u - u^3 sampled on the interior grid."""
    eps = 0.01
    p = pr.allen_cahn(epsilon=eps, n=32)
    x, _ = pr.chebyshev_second_derivative(32)
    xi = x[1:32]
    u = xi**3
    want = eps * 6.0 * xi + u - u**3
    assert np.max(np.abs(p.rhs(u) - want)) < 1e-6


def test_allen_cahn_uniform_grid_variant():
    p = pr.allen_cahn(n=32, grid="uniform")
    assert p.dim == 31
    assert p.params["grid"] == "uniform"
    # The linear profile u = x has zero second difference once the
    # boundary lift is folded in, so rhs = u - u^3 exactly.
    x = -1.0 + (2.0 / 32) * np.arange(1, 32)
    assert np.max(np.abs(p.rhs(x) - (x - x**3))) < 1e-11


def test_allen_cahn_initial_profile_endpoints():
    p = pr.allen_cahn()
    # Profile 0.53 x + 0.47 sin(-1.5 pi x) hits +-1 at the boundary, so
    # the interior values stay inside (-1, 1).
    assert np.max(np.abs(p.y0)) < 1.0


def test_allen_cahn_rejects_unknown_grid():
    with pytest.raises(ValueError):
        pr.allen_cahn(grid="hexagonal")


# ---------------------------------------------------------------------------
# cubic Schroedinger


def test_nls_block_structure():
    p = pr.nls_pseudospectral()
    n = 16
    assert p.dim == 2 * n
    D2 = p.M[:n, n:]
    assert np.max(np.abs(p.M[:n, :n])) == 0.0
    assert np.max(np.abs(p.M[n:, n:])) == 0.0
    assert np.max(np.abs(p.M[n:, :n] + D2)) == 0.0
    assert np.max(np.abs(p.M + p.M.T)) < 1e-12  # skew overall


def test_nls_initial_state():
    p = pr.nls_pseudospectral()
    assert abs(p.y0[0] - 0.525) < 1e-12  # 0.5 + 0.025 cos(0)
    assert np.max(np.abs(p.y0[16:])) == 0.0


def test_nls_modulus_conservation_short_run():
    """The cubic term rotates psi pointwise: f preserves |psi|^2 pointwise,
    so d/dt sum |psi|^2 picks up contributions only through D2, which is
    symmetric; the discrete mass is conserved by the flow."""
    p = pr.nls_pseudospectral()
    y = p.y0
    # <y, g(y)> = 0 term by term: the quadratic form of a skew matrix
    # vanishes and f is a pointwise rotation.
    val = float(y @ p.rhs(y))
    assert abs(val) < 1e-10


# ---------------------------------------------------------------------------
# scalar toys


def test_scalar_linear_exact_flow():
    p = pr.scalar_toy(lam=3.0, kind="linear")
    got = p.exact(0.7)
    assert abs(got[0] - np.exp(-2.1)) < 1e-15


def test_scalar_quadratic_closed_form_vs_fine_rk4():
    p = pr.scalar_toy(lam=2.5, kind="quadratic", y0=0.4)
    t1 = 0.8
    ref = fine_rk4(p.rhs, p.y0, 0.0, t1, substeps=4000)
    assert abs(p.exact(t1)[0] - ref[0]) < 1e-12


def test_scalar_quadratic_lam_zero_special_case():
    p = pr.scalar_toy(lam=0.0, kind="quadratic", y0=0.5)
    # y' = y^2 -> y(t) = y0 / (1 - y0 t)
    assert abs(p.exact(1.0)[0] - 1.0) < 1e-14
    ref = fine_rk4(p.rhs, p.y0, 0.0, 1.0, substeps=4000)
    assert abs(p.exact(1.0)[0] - ref[0]) < 1e-10


def test_scalar_complex_lam_realification():
    lam = 1.0 + 4.0j
    p = pr.scalar_toy(lam=lam, kind="linear")
    assert p.dim == 2
    t1 = 0.6
    ref = fine_rk4(p.rhs, p.y0, 0.0, t1, substeps=4000)
    assert np.max(np.abs(p.exact(t1) - ref)) < 1e-12


def test_scalar_toy_rejects_unknown_kind():
    with pytest.raises(ValueError):
        pr.scalar_toy(kind="cubic")


def test_linear_homogeneous_wraps_matrix():
    M = np.diag([1.0, 2.0])
    p = pr.linear_homogeneous(M, np.array([1.0, 1.0]))
    assert np.max(np.abs(p.f(p.y0))) == 0.0
    assert np.max(np.abs(p.rhs(p.y0) + M @ p.y0)) == 0.0


# ---------------------------------------------------------------------------
# derivative products


@pytest.mark.parametrize(
    "factory",
    [
        pr.wind_oscillation,
        pr.allen_cahn,
        pr.nls_pseudospectral,
        lambda: pr.scalar_toy(kind="quadratic"),
    ],
)
def test_jvp_hvp_match_finite_differences(factory):
    p = factory()
    rng = np.random.default_rng(42)
    for _ in range(20):
        y = p.y0 + 0.3 * rng.standard_normal(p.dim)
        u = rng.standard_normal(p.dim)
        v = rng.standard_normal(p.dim)
        jv = p.jvp(y, v)
        jv_fd = pr.finite_difference_jvp(p.f, y, v)
        scale = max(float(np.max(np.abs(jv))), 1.0)
        assert np.max(np.abs(jv - jv_fd)) / scale < 1e-6
        hv = p.hvp(y, u, v)
        hv_fd = pr.finite_difference_hvp(p.f, y, u, v, jvp=p.jvp)
        scale = max(float(np.max(np.abs(hv))), 1.0)
        assert np.max(np.abs(hv - hv_fd)) / scale < 1e-6


def test_hvp_symmetry_and_bilinearity():
    p = pr.nls_pseudospectral()
    rng = np.random.default_rng(43)
    y = p.y0 + 0.1 * rng.standard_normal(p.dim)
    u = rng.standard_normal(p.dim)
    v = rng.standard_normal(p.dim)
    assert np.max(np.abs(p.hvp(y, u, v) - p.hvp(y, v, u))) < 1e-12
    assert np.max(np.abs(p.hvp(y, 2.0 * u, v) - 2.0 * p.hvp(y, u, v))) < 1e-12


def test_jvp_linearity_in_direction():
    p = pr.wind_oscillation()
    rng = np.random.default_rng(44)
    y = rng.standard_normal(2)
    u = rng.standard_normal(2)
    v = rng.standard_normal(2)
    lhs = p.jvp(y, u + 3.0 * v)
    rhs = p.jvp(y, u) + 3.0 * p.jvp(y, v)
    assert np.max(np.abs(lhs - rhs)) < 1e-13


# ---------------------------------------------------------------------------
# finite-difference fallback


def test_with_fd_derivatives_fills_and_flags():
    base = pr.Problem(
        label="bare",
        M=np.eye(2),
        f=lambda y: np.array([y[0] * y[1], y[1] ** 3]),
        y0=np.array([0.4, 0.7]),
        t_span=(0.0, 1.0),
    )
    filled = base.with_fd_derivatives()
    assert filled.fd_derivatives
    assert filled.jvp is not None and filled.hvp is not None
    y = np.array([0.3, -0.5])
    v = np.array([1.0, 2.0])
    want_j = np.array([y[1] * v[0] + y[0] * v[1], 3.0 * y[1] ** 2 * v[1]])
    assert np.max(np.abs(filled.jvp(y, v) - want_j)) < 1e-8
    u = np.array([-1.0, 0.5])
    want_h = np.array([u[0] * v[1] + u[1] * v[0], 6.0 * y[1] * u[1] * v[1]])
    assert np.max(np.abs(filled.hvp(y, u, v) - want_h)) < 1e-5


def test_with_fd_derivatives_is_identity_when_complete():
    p = pr.wind_oscillation()
    assert p.with_fd_derivatives() is p
    assert not p.fd_derivatives


def test_finite_difference_zero_direction_shortcuts():
    f = lambda y: y**2
    y = np.array([1.0, 2.0])
    assert np.array_equal(pr.finite_difference_jvp(f, y, np.zeros(2)), np.zeros(2))
    assert np.array_equal(
        pr.finite_difference_hvp(f, y, np.zeros(2), np.ones(2)), np.zeros(2)
    )


# ---------------------------------------------------------------------------
# container validation


def test_problem_shape_validation():
    with pytest.raises(ValueError):
        pr.Problem(
            label="bad",
            M=np.eye(3),
            f=lambda y: y,
            y0=np.array([1.0, 2.0]),
            t_span=(0.0, 1.0),
        )
    with pytest.raises(ValueError):
        pr.Problem(
            label="bad",
            M=np.array([[np.inf]]),
            f=lambda y: y,
            y0=np.array([1.0]),
            t_span=(0.0, 1.0),
        )
