"""Fixed-step integrators for y' = -M y + f(y).

Four families share this module:

* mverk4 -- classical four-stage RK stages on the full right-hand side,
  exponential update exp(-hM) y0 + h sum b_i f(Y_i) + w4.
* sverk4 -- stages carry their own exponentials exp(-c_i hM) y0 and feed
  only f; update as above with the companion correction w4_sverk.
* rk -- plain explicit Runge-Kutta on the full right-hand side.
* erk -- standard exponential RK baselines whose tableau entries are
  phi-function combinations (matrix-valued coefficients).

Everything h-dependent that involves a matrix function lives in a
CoefficientCache built once per (M, h); steppers never compute matrix
exponentials themselves and fail loudly on a missing cache entry. The
correction terms are assembled from matrix-vector products only; powers
of M are never formed.
"""

from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .errors import CacheMissError, ConfigError, DivergenceError, MissingDerivativeError
from .matfun import matexp, phi_set
from .tableau import Tableau, builtin

#: Stable public method identifiers.
METHOD_IDS = (
    "mverk41",
    "mverk42",
    "sverk41",
    "sverk42",
    "rk4",
    "rk4-38",
    "erk-hochbruck5",
    "erk-krogstad4",
)


@dataclass(frozen=True)
class MethodInfo:
    family: str  # "mverk" | "sverk" | "rk" | "erk"
    tableau: str  # builtin tableau name, or None when one must be supplied
    stages: int
    exponential: bool


METHODS = {
    "mverk41": MethodInfo("mverk", "classical-rk4", 4, True),
    "mverk42": MethodInfo("mverk", "three-eighths", 4, True),
    "sverk41": MethodInfo("sverk", "classical-rk4", 4, True),
    "sverk42": MethodInfo("sverk", "three-eighths", 4, True),
    "rk4": MethodInfo("rk", "classical-rk4", 4, False),
    "rk4-38": MethodInfo("rk", "three-eighths", 4, False),
    "erk-hochbruck5": MethodInfo("erk", None, 5, True),
    "erk-krogstad4": MethodInfo("erk", None, 4, True),
    # Generic entry points used with a caller-supplied four-stage tableau.
    "mverk4": MethodInfo("mverk", None, 4, True),
    "sverk4": MethodInfo("sverk", None, 4, True),
}


@dataclass
class StepResult:
    y: np.ndarray
    stages: tuple = None


@dataclass
class MatrixTableau:
    """Matrix-valued coefficients of one exponential RK baseline.

    stage_exp[i-1] is exp(-c_i h M) for stages i = 2..s. stage_rows holds
    one ((matrix, indices), ...) tuple per stage: each matrix multiplies
    the sum of the f-evaluations it weights, so repeated coefficients
    (a42 = a43 and the like) cost one product. weights has the same form
    for the update.
    """

    stage_exp: tuple
    stage_rows: tuple
    weights: tuple


@dataclass
class CoefficientCache:
    """All matrix functions one (M, h) pair needs, built once per run.

    exp_stage maps a stage fraction c to exp(-c h M); by construction the
    entry at 1.0 is the update exponential itself. phi_stage holds the
    PhiSets behind the erk baselines, matrix_tableaux their precombined
    coefficients. Caches are immutable after construction.
    """

    h: float
    exp_full: np.ndarray
    exp_stage: dict
    phi_stage: dict
    matrix_tableaux: dict


def resolve_tableau(method, tableau=None):
    """The Tableau a method will run with, honouring an explicit override."""
    info = _info(method)
    if tableau is not None:
        if info.family in ("mverk", "sverk", "rk") and tableau.s != 4:
            raise ConfigError(
                f"{method}: the fourth-order correction assumes 4 stages, "
                f"got a tableau with {tableau.s}"
            )
        return tableau
    if info.tableau is not None:
        return builtin(info.tableau)
    if info.family in ("mverk", "sverk"):
        raise ConfigError(f"{method}: a tableau must be supplied")
    return None  # erk baselines carry their coefficients in the cache


def _info(method):
    try:
        return METHODS[method]
    except KeyError:
        raise ConfigError(
            f"unknown method {method!r}; known: {', '.join(sorted(METHODS))}"
        ) from None


def build_cache(M, h, method, tableau=None):
    """CoefficientCache for one method on one (M, h) pair.

    Only the entries the method actually uses are computed; classical RK
    needs none and gets None from integrate() instead.
    """
    info = _info(method)
    M = np.asarray(M, dtype=float)
    if h <= 0.0 or not np.isfinite(h):
        raise ConfigError(f"stepsize must be positive and finite, got {h}")

    if info.family == "rk":
        raise ConfigError(f"{method} uses no matrix functions; no cache to build")

    if info.family == "erk":
        half = phi_set(-0.5 * h * M, 3)
        full = phi_set(-h * M, 3)
        mt = {
            "erk-hochbruck5": _hochbruck5_tableau,
            "erk-krogstad4": _krogstad4_tableau,
        }[method](half, full)
        return CoefficientCache(
            h=h,
            exp_full=full.matrices[0],
            exp_stage={0.5: half.matrices[0], 1.0: full.matrices[0]},
            phi_stage={0.5: half, 1.0: full},
            matrix_tableaux={method: mt},
        )

    exp_full = matexp(-h * M)
    exp_stage = {1.0: exp_full}
    if info.family == "sverk":
        tab = resolve_tableau(method, tableau)
        for c in tab.c:
            frac = float(c)
            if frac > 0.0 and frac not in exp_stage:
                exp_stage[frac] = matexp(-frac * h * M)
    return CoefficientCache(
        h=h, exp_full=exp_full, exp_stage=exp_stage, phi_stage={}, matrix_tableaux={}
    )


def _stage_exponential(cache, frac):
    try:
        return cache.exp_stage[frac]
    except KeyError:
        raise CacheMissError(
            f"cache holds no stage exponential for fraction {frac!r} "
            f"(available: {sorted(cache.exp_stage)})"
        ) from None


def _matrix_tableau(cache, method):
    try:
        return cache.matrix_tableaux[method]
    except KeyError:
        raise CacheMissError(
            f"cache holds no matrix-valued tableau for {method!r}"
        ) from None


def _check_stage(y, stage):
    if not np.isfinite(y).all():
        raise DivergenceError(
            f"non-finite value in stage {stage}" if stage is not None
            else "non-finite value in the step update",
            stage=stage,
        )


def _combine(row, upto, vecs):
    """sum_j row[j] * vecs[j] for j < upto, skipping structural zeros."""
    acc = None
    for j in range(upto):
        a = row[j]
        if a != 0.0:
            term = a * vecs[j]
            acc = term if acc is None else acc + term
    return acc


def _weighted_sum(weights, vectors):
    acc = weights[0] * vectors[0]
    for i in range(1, len(vectors)):
        acc = acc + weights[i] * vectors[i]
    return acc


# ---------------------------------------------------------------------------
# stiff correction terms


def w4_mverk(p, y0, h, f0=None, My0=None):
    """Fourth-order stiff correction of the mverk4 update.

    w4 = -(h^2/2!) M f
       + (h^3/3!) (M^2 f - M J g)
       + (h^4/4!) (-M^3 f + M^2 J g - M H(g, g) - M J (-M + J) g)

    with f = f(y0), g = -M y0 + f(y0), J the Jacobian of f at y0 applied
    through jvp and H the second derivative applied through hvp. The
    h^4 bracket is assembled as -M (M^2 f - M J g + H(g,g) + J(-M+J)g),
    one product with M instead of four. Steppers pass f0/My0 to avoid
    recomputing values their stages already hold.
    """
    if p.jvp is None:
        raise MissingDerivativeError("jvp")
    if p.hvp is None:
        raise MissingDerivativeError("hvp")
    M = p.M
    if f0 is None:
        f0 = p.f(y0)
    if My0 is None:
        My0 = M @ y0
    g0 = f0 - My0
    Mf = M @ f0
    M2f = M @ Mf
    Jg = p.jvp(y0, g0)
    MJg = M @ Jg
    br = Jg - M @ g0  # (-M + J) g
    Jbr = p.jvp(y0, br)
    Hgg = p.hvp(y0, g0, g0)
    t3 = M2f - MJg
    Mq = M @ (t3 + Hgg + Jbr)
    return (-0.5 * h * h) * Mf + (h**3 / 6.0) * t3 - (h**4 / 24.0) * Mq


def w4_sverk(p, y0, h, f0=None, My0=None):
    """Fourth-order stiff correction of the sverk4 update.

    Extends w4_mverk by the terms the exponential stages introduce:
    -(h^3/3!) J M f and (h^4/4!) (J M^2 f - J J M f - J M J g
    + 3 H(-M f, g)). Linearity of jvp in its direction collapses the
    three J-applications into one on the h^3 bracket, and bilinearity of
    hvp pulls the sign out of H(-M f, g).
    """
    if p.jvp is None:
        raise MissingDerivativeError("jvp")
    if p.hvp is None:
        raise MissingDerivativeError("hvp")
    M = p.M
    if f0 is None:
        f0 = p.f(y0)
    if My0 is None:
        My0 = M @ y0
    g0 = f0 - My0
    Mf = M @ f0
    M2f = M @ Mf
    Jg = p.jvp(y0, g0)
    MJg = M @ Jg
    br = Jg - M @ g0
    Jbr = p.jvp(y0, br)
    Hgg = p.hvp(y0, g0, g0)
    JMf = p.jvp(y0, Mf)
    t3 = M2f - MJg
    b3 = t3 - JMf
    Jb3 = p.jvp(y0, b3)  # = J M^2 f - J M J g - J J M f
    HMfg = p.hvp(y0, Mf, g0)
    Mq = M @ (t3 + Hgg + Jbr)
    b4 = Jb3 - 3.0 * HMfg - Mq
    return (-0.5 * h * h) * Mf + (h**3 / 6.0) * b3 + (h**4 / 24.0) * b4


# ---------------------------------------------------------------------------
# steppers


def rk4_step(t: Tableau, p, y0, h, return_stages=False):
    """One explicit Runge-Kutta step on the full right-hand side."""
    A, b = t.A, t.b
    M, f = p.M, p.f
    Y = [y0]
    K = [f(y0) - M @ y0]
    for i in range(1, t.s):
        acc = _combine(A[i], i, K)
        Yi = y0 if acc is None else y0 + h * acc
        _check_stage(Yi, i)
        Y.append(Yi)
        K.append(f(Yi) - M @ Yi)
    y1 = y0 + h * _weighted_sum(b, K)
    _check_stage(y1, None)
    return StepResult(y=y1, stages=tuple(Y) if return_stages else None)


def mverk4_step(t: Tableau, cache: CoefficientCache, p, y0, return_stages=False):
    """One mverk4 step: classical stages, exponential update plus w4."""
    if t.s != 4:
        raise ConfigError("mverk4_step: the w4 correction assumes a 4-stage tableau")
    h = cache.h
    A, b = t.A, t.b
    M, f = p.M, p.f
    My0 = M @ y0
    F = [f(y0)]
    Y = [y0]
    K = [F[0] - My0]
    for i in range(1, 4):
        acc = _combine(A[i], i, K)
        Yi = y0 if acc is None else y0 + h * acc
        _check_stage(Yi, i)
        Y.append(Yi)
        Fi = f(Yi)
        F.append(Fi)
        if i < 3:  # the last stage's full rhs is never used
            K.append(Fi - M @ Yi)
    w4 = w4_mverk(p, y0, h, f0=F[0], My0=My0)
    y1 = cache.exp_full @ y0 + h * _weighted_sum(b, F) + w4
    _check_stage(y1, None)
    return StepResult(y=y1, stages=tuple(Y) if return_stages else None)


def sverk4_step(t: Tableau, cache: CoefficientCache, p, y0, return_stages=False):
    """One sverk4 step: exponentially shifted stages feeding f only."""
    if t.s != 4:
        raise ConfigError("sverk4_step: the w4 correction assumes a 4-stage tableau")
    h = cache.h
    A, b = t.A, t.b
    f = p.f
    bases = {0.0: y0}  # exp(-c h M) y0 per distinct stage fraction
    F = [f(y0)]
    Y = [y0]
    for i in range(1, 4):
        frac = float(t.c[i])
        base = bases.get(frac)
        if base is None:
            base = _stage_exponential(cache, frac) @ y0
            bases[frac] = base
        acc = _combine(A[i], i, F)
        Yi = base if acc is None else base + h * acc
        _check_stage(Yi, i)
        Y.append(Yi)
        F.append(f(Yi))
    w4 = w4_sverk(p, y0, h, f0=F[0])
    ey = bases.get(1.0)
    if ey is None:
        ey = cache.exp_full @ y0
    y1 = ey + h * _weighted_sum(b, F) + w4
    _check_stage(y1, None)
    return StepResult(y=y1, stages=tuple(Y) if return_stages else None)


def _hochbruck5_tableau(half, full):
    # phi_{j,i} means phi_j(-c_i h M); c = (0, 1/2, 1/2, 1, 1/2).
    _, p1h, p2h, p3h = half.matrices
    _, p1f, p2f, p3f = full.matrices
    a21 = 0.5 * p1h
    a31 = 0.5 * p1h - p2h
    a32 = p2h
    a41 = p1f - 2.0 * p2f
    a42 = p2f  # also a43
    a52 = 0.5 * p2h - p3f + 0.25 * p2f - 0.5 * p3h  # also a53
    a54 = 0.25 * p2h - a52
    a51 = 0.5 * p1h - 2.0 * a52 - a54
    b1 = p1f - 3.0 * p2f + 4.0 * p3f
    b4 = -p2f + 4.0 * p3f
    b5 = 4.0 * p2f - 8.0 * p3f
    e_h, e_f = half.matrices[0], full.matrices[0]
    return MatrixTableau(
        stage_exp=(e_h, e_h, e_f, e_h),
        stage_rows=(
            ((a21, (0,)),),
            ((a31, (0,)), (a32, (1,))),
            ((a41, (0,)), (a42, (1, 2))),
            ((a51, (0,)), (a52, (1, 2)), (a54, (3,))),
        ),
        weights=((b1, (0,)), (b4, (3,)), (b5, (4,))),
    )


def _krogstad4_tableau(half, full):
    # c = (0, 1/2, 1/2, 1); b2 = b3 share one matrix.
    _, p1h, p2h, _p3h = half.matrices
    _, p1f, p2f, p3f = full.matrices
    a21 = 0.5 * p1h
    a31 = 0.5 * p1h - p2h
    a32 = p2h
    a41 = p1f - 2.0 * p2f
    a43 = 2.0 * p2f
    b1 = p1f - 3.0 * p2f + 4.0 * p3f
    b23 = 2.0 * p2f - 4.0 * p3f
    b4 = -p2f + 4.0 * p3f
    e_h, e_f = half.matrices[0], full.matrices[0]
    return MatrixTableau(
        stage_exp=(e_h, e_h, e_f),
        stage_rows=(
            ((a21, (0,)),),
            ((a31, (0,)), (a32, (1,))),
            ((a41, (0,)), (a43, (2,))),
        ),
        weights=((b1, (0,)), (b23, (1, 2)), (b4, (3,))),
    )


def _apply_row(row, F):
    acc = None
    for mat, idx in row:
        v = F[idx[0]]
        for i in idx[1:]:
            v = v + F[i]
        term = mat @ v
        acc = term if acc is None else acc + term
    return acc


def _erk_step(mt: MatrixTableau, cache, p, y0, return_stages):
    h = cache.h
    f = p.f
    Y = [y0]
    F = [f(y0)]
    shifted = {}  # exp(-c_i h M) y0 per distinct exponential
    for i, (E, row) in enumerate(zip(mt.stage_exp, mt.stage_rows), start=1):
        key = id(E)
        base = shifted.get(key)
        if base is None:
            base = E @ y0
            shifted[key] = base
        Yi = base + h * _apply_row(row, F)
        _check_stage(Yi, i)
        Y.append(Yi)
        F.append(f(Yi))
    base = shifted.get(id(cache.exp_full))
    if base is None:
        base = cache.exp_full @ y0
    y1 = base + h * _apply_row(mt.weights, F)
    _check_stage(y1, None)
    return StepResult(y=y1, stages=tuple(Y) if return_stages else None)


def erk_hochbruck5_step(cache: CoefficientCache, p, y0, return_stages=False):
    """One step of the five-stage phi-function baseline."""
    return _erk_step(_matrix_tableau(cache, "erk-hochbruck5"), cache, p, y0, return_stages)


def erk_krogstad4_step(cache: CoefficientCache, p, y0, return_stages=False):
    """One step of the four-stage phi-function baseline."""
    return _erk_step(_matrix_tableau(cache, "erk-krogstad4"), cache, p, y0, return_stages)


# ---------------------------------------------------------------------------
# fixed-step driver


@dataclass
class Trajectory:
    method: str
    h: float
    t0: float
    t_end: float
    steps: int
    y_end: np.ndarray
    wall_step_s: float
    wall_cache_s: float
    states: list = None


def _step_count(t0, t_end, h):
    span = t_end - t0
    if h <= 0.0 or not np.isfinite(h):
        raise ConfigError(f"stepsize must be positive and finite, got {h}")
    if span <= 0.0:
        raise ConfigError(f"empty time span [{t0}, {t_end}]")
    ratio = span / h
    n = int(round(ratio))
    if n < 1 or abs(ratio - n) > 0.5 * np.spacing(max(1.0, ratio)):
        raise ConfigError(
            f"stepsize {h} does not divide the span {span} into whole steps "
            f"(span/h = {ratio!r})"
        )
    return n


def integrate(method, p, h, t_end=None, t0=None, tableau=None, record_states=False):
    """Advance a problem from t0 to t_end with a fixed stepsize.

    The span must be a whole number of steps (the benchmark grids use
    dyadic h on integer spans). Matrix-function work happens once, up
    front; the returned Trajectory reports that cache time separately
    from stepping time. Divergence aborts with the step index and time
    attached.
    """
    info = _info(method)
    t0 = p.t_span[0] if t0 is None else float(t0)
    t_end = p.t_span[1] if t_end is None else float(t_end)
    n = _step_count(t0, t_end, h)

    tab = resolve_tableau(method, tableau)
    cache_start = perf_counter()
    cache = None if info.family == "rk" else build_cache(p.M, h, method, tableau=tab)
    wall_cache = perf_counter() - cache_start

    if info.family == "mverk":
        step = lambda y: mverk4_step(tab, cache, p, y).y
    elif info.family == "sverk":
        step = lambda y: sverk4_step(tab, cache, p, y).y
    elif info.family == "rk":
        step = lambda y: rk4_step(tab, p, y, h).y
    elif method == "erk-hochbruck5":
        step = lambda y: erk_hochbruck5_step(cache, p, y).y
    else:
        step = lambda y: erk_krogstad4_step(cache, p, y).y

    y = p.y0.copy()
    states = [y.copy()] if record_states else None
    loop_start = perf_counter()
    for i in range(n):
        try:
            y = step(y)
        except DivergenceError as exc:
            raise DivergenceError(
                f"{method} diverged at step {i} (t = {t0 + i * h:g}): {exc}",
                stage=exc.stage,
                step=i,
                t=t0 + i * h,
            ) from exc
        if record_states:
            states.append(y.copy())
    wall_step = perf_counter() - loop_start

    return Trajectory(
        method=method,
        h=h,
        t0=t0,
        t_end=t_end,
        steps=n,
        y_end=y,
        wall_step_s=wall_step,
        wall_cache_s=wall_cache,
        states=states,
    )
