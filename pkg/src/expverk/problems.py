"""Benchmark problems in the semilinear form y' = -M y + f(y).

Each constructor packages the linear operator M, the nonlinearity f with
its first and second directional derivatives (jvp, hvp), an initial
state, and a default time span. The derivatives feed the stiff
correction term of the exponential steppers; all built-in problems carry
analytic ones, with a flagged finite-difference fallback for user
problems that lack them.
"""

from dataclasses import dataclass, field, replace

import numpy as np

_EPS = np.finfo(float).eps


@dataclass
class Problem:
    """A semilinear initial value problem y' = -M y + f(y), y(t0) = y0."""

    label: str
    M: np.ndarray
    f: callable
    y0: np.ndarray
    t_span: tuple
    jvp: callable = None
    hvp: callable = None
    exact: callable = None
    params: dict = field(default_factory=dict)
    fd_derivatives: bool = False

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float)
        self.y0 = np.asarray(self.y0, dtype=float)
        d = self.y0.shape[0]
        if self.M.shape != (d, d):
            raise ValueError(
                f"problem {self.label!r}: M {self.M.shape} does not match y0 ({d},)"
            )
        if not (np.isfinite(self.M).all() and np.isfinite(self.y0).all()):
            raise ValueError(f"problem {self.label!r}: non-finite M or y0")

    @property
    def dim(self):
        return self.y0.shape[0]

    def rhs(self, y):
        """Full right-hand side g(y) = -M y + f(y)."""
        return -(self.M @ y) + self.f(y)

    def with_fd_derivatives(self):
        """Copy of the problem with missing jvp/hvp filled by central differences.

        The result is flagged via fd_derivatives so reports can record
        that derivative quality is O(h^2) rather than exact.
        """
        f = self.f
        jvp = self.jvp
        hvp = self.hvp
        filled = False
        if jvp is None:
            jvp = lambda y, v: finite_difference_jvp(f, y, v)
            filled = True
        if hvp is None:
            analytic_jvp = self.jvp
            if analytic_jvp is not None:
                hvp = lambda y, u, v: finite_difference_hvp(f, y, u, v, jvp=analytic_jvp)
            else:
                hvp = lambda y, u, v: finite_difference_hvp(f, y, u, v)
            filled = True
        if not filled:
            return self
        return replace(self, jvp=jvp, hvp=hvp, fd_derivatives=True)


def finite_difference_jvp(f, y, v, step=None):
    """Central-difference directional derivative of f at y along v.

    The displacement along v is cbrt(unit roundoff) scaled by the state
    magnitude, the usual bias/roundoff compromise for first differences.
    """
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return np.zeros_like(y)
    if step is None:
        step = _EPS ** (1.0 / 3.0) * max(1.0, np.linalg.norm(y)) / nv
    return (f(y + step * v) - f(y - step * v)) / (2.0 * step)


def finite_difference_hvp(f, y, u, v, jvp=None, step=None):
    """Central difference of the jvp along u, i.e. f''(y)(u, v) approximately.

    When an analytic jvp is supplied only one differencing level is
    involved and cbrt(eps) scaling applies; fully nested differencing
    backs off to eps**(1/4).
    """
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    nu = np.linalg.norm(u)
    if nu == 0.0:
        return np.zeros_like(y)
    if jvp is None:
        base = lambda yy, vv: finite_difference_jvp(f, yy, vv)
        exponent = 0.25
    else:
        base = jvp
        exponent = 1.0 / 3.0
    if step is None:
        step = _EPS**exponent * max(1.0, np.linalg.norm(y)) / nu
    return (base(y + step * u, v) - base(y - step * u, v)) / (2.0 * step)


# ---------------------------------------------------------------------------
# wind-induced oscillation (dim 2, skew linear part for the default angle)


def wind_oscillation(theta=np.pi / 2.0, r=20.0, y0=(1.0, 0.0), t_span=(0.0, 100.0)):
    """Planar oscillator with rotational linear part and quadratic coupling.

    M = [[zeta, lam], [-lam, zeta]] with zeta = r cos(theta),
    lam = r sin(theta); f(x) = (x1 x2, (x1^2 - x2^2)/2). At theta = pi/2
    the linear part is purely rotational (skew) with frequency r.
    """
    zeta = r * np.cos(theta)
    lam = r * np.sin(theta)
    M = np.array([[zeta, lam], [-lam, zeta]])

    def f(x):
        return np.array([x[0] * x[1], 0.5 * (x[0] ** 2 - x[1] ** 2)])

    def jvp(x, v):
        return np.array([x[1] * v[0] + x[0] * v[1], x[0] * v[0] - x[1] * v[1]])

    def hvp(x, u, v):
        # f is quadratic: the Hessian is state independent.
        return np.array([u[0] * v[1] + u[1] * v[0], u[0] * v[0] - u[1] * v[1]])

    return Problem(
        label="wind",
        M=M,
        f=f,
        y0=np.asarray(y0, dtype=float),
        t_span=tuple(t_span),
        jvp=jvp,
        hvp=hvp,
        params={"theta": float(theta), "r": float(r)},
    )


# ---------------------------------------------------------------------------
# Allen-Cahn on [-1, 1] with Dirichlet data folded into the nonlinearity


def chebyshev_second_derivative(n):
    """Chebyshev points x_i = cos(i pi / n) and the dense D^2 on them.

    Returns (x, D2) over all n+1 points; callers slice out the interior.
    """
    if n < 2:
        raise ValueError("chebyshev_second_derivative: need n >= 2")
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.hstack([2.0, np.ones(n - 1), 2.0]) * (-1.0) ** np.arange(n + 1)
    dX = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D @ D


def allen_cahn(epsilon=0.01, n=32, t_span=(0.0, 10.0), grid="chebyshev"):
    """Allen-Cahn equation u_t = eps u_xx + u - u^3 on [-1, 1].

    Dirichlet values u(1) = 1, u(-1) = -1 match the endpoints of the
    initial profile u(x, 0) = 0.53 x + 0.47 sin(-1.5 pi x). The
    discretized state holds the n-1 interior values; boundary columns of
    D^2 contribute a constant lift absorbed into f. grid="uniform"
    swaps the spectral D^2 for the 3-point finite difference.
    """
    if grid == "chebyshev":
        x_all, D2 = chebyshev_second_derivative(n)
        x = x_all[1:n]
        interior = D2[1:n, 1:n]
        # x_all[0] = +1 carries u = +1, x_all[n] = -1 carries u = -1.
        lift = epsilon * (D2[1:n, 0] * 1.0 + D2[1:n, n] * (-1.0))
    elif grid == "uniform":
        dx = 2.0 / n
        x = -1.0 + dx * np.arange(1, n)
        interior = (
            np.diag(np.full(n - 1, -2.0))
            + np.diag(np.ones(n - 2), 1)
            + np.diag(np.ones(n - 2), -1)
        ) / dx**2
        lift = np.zeros(n - 1)
        lift[0] = epsilon * (-1.0) / dx**2  # neighbour u(-1) = -1
        lift[-1] = epsilon * (+1.0) / dx**2  # neighbour u(+1) = +1
    else:
        raise ValueError(f"allen_cahn: unknown grid {grid!r}")

    M = -epsilon * interior

    def f(u):
        return u - u**3 + lift

    def jvp(u, v):
        return (1.0 - 3.0 * u**2) * v

    def hvp(u, a, b):
        return -6.0 * u * a * b

    y0 = 0.53 * x + 0.47 * np.sin(-1.5 * np.pi * x)
    return Problem(
        label="allen-cahn",
        M=M,
        f=f,
        y0=y0,
        t_span=tuple(t_span),
        jvp=jvp,
        hvp=hvp,
        params={"epsilon": float(epsilon), "n": int(n), "grid": grid},
    )


# ---------------------------------------------------------------------------
# cubic Schroedinger, split into real and imaginary parts


def periodic_spectral_second_derivative(n, length):
    """Dense pseudospectral d^2/dx^2 for a periodic grid x_j = j*length/n.

    Entries follow the closed form for even n; the matrix is symmetric
    and annihilates constants.
    """
    if n < 2 or n % 2:
        raise ValueError("periodic_spectral_second_derivative: need even n >= 2")
    mu = 2.0 * np.pi / length
    idx = np.arange(n)
    diff = idx[:, None] - idx[None, :]
    with np.errstate(divide="ignore"):
        inv_sin2 = 1.0 / np.sin(np.pi * diff / n) ** 2
    sign = np.where(diff % 2 == 0, -1.0, 1.0)
    D2 = 0.5 * mu**2 * sign * inv_sin2
    np.fill_diagonal(D2, -(mu**2) * (2.0 * (n // 2) ** 2 + 1.0) / 6.0)
    return idx * (length / n), D2


def nls_pseudospectral(n=16, t_span=(0.0, 10.0)):
    """Cubic Schroedinger i psi_t + psi_xx + 2 |psi|^2 psi = 0, periodic.

    psi = p + i q gives the real system p' = -q_xx - 2 |psi|^2 q,
    q' = p_xx + 2 |psi|^2 p, i.e. M = [[0, D2], [-D2, 0]] (skew, since D2
    is symmetric). Domain length 4 sqrt(2) pi, initial state
    psi(x, 0) = 0.5 + 0.025 cos(mu x).
    """
    length = 4.0 * np.sqrt(2.0) * np.pi
    mu = 2.0 * np.pi / length
    x, D2 = periodic_spectral_second_derivative(n, length)
    M = np.block([[np.zeros((n, n)), D2], [-D2, np.zeros((n, n))]])

    def f(y):
        p, q = y[:n], y[n:]
        mod2 = p**2 + q**2
        return np.concatenate([-2.0 * mod2 * q, 2.0 * mod2 * p])

    def jvp(y, w):
        p, q = y[:n], y[n:]
        u, v = w[:n], w[n:]
        return np.concatenate(
            [
                -4.0 * p * q * u - 2.0 * (p**2 + 3.0 * q**2) * v,
                2.0 * (3.0 * p**2 + q**2) * u + 4.0 * p * q * v,
            ]
        )

    def hvp(y, w1, w2):
        p, q = y[:n], y[n:]
        up, uq = w1[:n], w1[n:]
        vp, vq = w2[:n], w2[n:]
        cross = up * vq + uq * vp
        return np.concatenate(
            [
                -4.0 * q * up * vp - 4.0 * p * cross - 12.0 * q * uq * vq,
                12.0 * p * up * vp + 4.0 * q * cross + 4.0 * p * uq * vq,
            ]
        )

    p0 = 0.5 + 0.025 * np.cos(mu * x)
    y0 = np.concatenate([p0, np.zeros(n)])
    return Problem(
        label="nls",
        M=M,
        f=f,
        y0=y0,
        t_span=tuple(t_span),
        jvp=jvp,
        hvp=hvp,
        params={"n": int(n), "length": float(length)},
    )


# ---------------------------------------------------------------------------
# scalar toys with closed-form solutions


def scalar_toy(lam=1.0, kind="linear", y0=None, t_span=(0.0, 1.0)):
    """Scalar test equations with exact solutions.

    kind="linear": y' = -lam y. A complex lam is realified into the
    rotation block [[Re, -Im], [Im, Re]] for the oscillatory variant.
    kind="quadratic": y' = -lam y + y^2, solved in closed form as a
    Bernoulli equation.
    """
    if kind == "linear":
        if isinstance(lam, complex) and lam.imag != 0.0:
            a, bb = lam.real, lam.imag
            M = np.array([[a, -bb], [bb, a]])
            z0 = 1.0 + 0.0j if y0 is None else complex(y0)
            start = np.array([z0.real, z0.imag])

            def exact(t, _z0=z0, _lam=lam):
                z = _z0 * np.exp(-_lam * t)
                return np.array([z.real, z.imag])

            return Problem(
                label="scalar-linear",
                M=M,
                f=lambda y: np.zeros(2),
                y0=start,
                t_span=tuple(t_span),
                jvp=lambda y, v: np.zeros(2),
                hvp=lambda y, u, v: np.zeros(2),
                exact=exact,
                params={"lam": lam, "kind": kind},
            )
        lam = float(lam)
        start = np.array([1.0 if y0 is None else float(y0)])
        return Problem(
            label="scalar-linear",
            M=np.array([[lam]]),
            f=lambda y: np.zeros(1),
            y0=start,
            t_span=tuple(t_span),
            jvp=lambda y, v: np.zeros(1),
            hvp=lambda y, u, v: np.zeros(1),
            exact=lambda t, _y0=start[0], _lam=lam: np.array([_y0 * np.exp(-_lam * t)]),
            params={"lam": lam, "kind": kind},
        )

    if kind == "quadratic":
        lam = float(lam)
        start = np.array([0.5 if y0 is None else float(y0)])

        def exact(t, _y0=start[0], _lam=lam):
            if _lam == 0.0:
                return np.array([_y0 / (1.0 - _y0 * t)])
            return np.array([_lam / ((_lam / _y0 - 1.0) * np.exp(_lam * t) + 1.0)])

        return Problem(
            label="scalar-quadratic",
            M=np.array([[lam]]),
            f=lambda y: y**2,
            y0=start,
            t_span=tuple(t_span),
            jvp=lambda y, v: 2.0 * y * v,
            hvp=lambda y, u, v: 2.0 * u * v,
            exact=exact,
            params={"lam": lam, "kind": kind},
        )

    raise ValueError(f"scalar_toy: unknown kind {kind!r}")


def linear_homogeneous(M, y0, t_span=(0.0, 1.0)):
    """y' = -M y with f identically zero; exact flow is the matrix exponential."""
    M = np.asarray(M, dtype=float)
    d = M.shape[0]
    return Problem(
        label="linear-homogeneous",
        M=M,
        f=lambda y: np.zeros(d),
        y0=np.asarray(y0, dtype=float),
        t_span=tuple(t_span),
        jvp=lambda y, v: np.zeros(d),
        hvp=lambda y, u, v: np.zeros(d),
        params={"dim": d},
    )
