"""Convergence and efficiency measurement on top of the integrators.

A study runs one method over a dyadic stepsize grid h = 2^-k, measures
the final-time error against a reference, and fits the observed order.
Problems with closed-form solutions are compared against those directly;
everything else gets a numerical reference that is never trusted
blindly: two structurally different integrators must agree at the fine
stepsize or the study refuses to run.
"""

import csv
import json
import statistics
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, DivergenceError, UnreliableReferenceError
from .integrators import integrate

#: Relative disagreement beyond which a reference solution is rejected.
REFERENCE_CROSS_TOL = 1e-9

#: Multiple of unit roundoff * ||y_ref|| below which errors count as noise.
FLOOR_FACTOR = 100.0

CSV_HEADER = (
    "problem,method,k,h,steps,global_error,wall_time_total_s,wall_time_cache_s"
)


def global_error(y_num, y_ref):
    """Max-norm difference between a numerical and a reference state."""
    y_num = np.asarray(y_num, dtype=float)
    y_ref = np.asarray(y_ref, dtype=float)
    if y_num.shape != y_ref.shape:
        raise ValueError(
            f"global_error: shape mismatch {y_num.shape} vs {y_ref.shape}"
        )
    return float(np.max(np.abs(y_num - y_ref)))


def reference_solution(p, h_min, refinement=32, t_end=None):
    """Fine-stepsize final state, cross-checked between two integrators.

    Integrates with mverk41 at h_min/refinement and accepts the result
    only if erk-krogstad4 at the same stepsize lands within
    REFERENCE_CROSS_TOL relative in the max norm. The two methods share
    no stage structure, so silent common-mode failure is unlikely.
    """
    if int(refinement) != refinement or refinement < 32:
        raise ConfigError(
            f"reference refinement must be an integer >= 32, got {refinement}"
        )
    h_ref = h_min / int(refinement)
    ya = integrate("mverk41", p, h_ref, t_end=t_end).y_end
    yb = integrate("erk-krogstad4", p, h_ref, t_end=t_end).y_end
    scale = max(float(np.max(np.abs(ya))), np.finfo(float).tiny)
    gap = float(np.max(np.abs(ya - yb))) / scale
    if gap > REFERENCE_CROSS_TOL:
        raise UnreliableReferenceError(
            f"reference integrators disagree by {gap:.3e} relative "
            f"(> {REFERENCE_CROSS_TOL:.0e}) on {p.label!r} at h = {h_ref:g}"
        )
    return ya


@dataclass
class StudyRow:
    k: int
    h: float
    steps: int
    global_error: float
    wall_time_total_s: float
    wall_time_cache_s: float
    at_floor: bool = False
    diverged: bool = False

    def __post_init__(self):
        self.k = int(self.k)
        self.h = float(self.h)
        self.steps = int(self.steps)
        self.global_error = float(self.global_error)
        self.wall_time_total_s = float(self.wall_time_total_s)
        self.wall_time_cache_s = float(self.wall_time_cache_s)
        self.at_floor = bool(self.at_floor)
        self.diverged = bool(self.diverged)


@dataclass
class ConvergenceReport:
    problem: str
    method: str
    rows: list
    fitted_order: float
    pairwise_orders: list
    environment: dict = field(default_factory=dict)


def _fit_order(rows):
    """Least-squares slope of log(error) vs log(h) over trustworthy rows."""
    usable = [r for r in rows if not r.diverged and not r.at_floor]
    if len(usable) < 2:
        return float("nan"), []
    logh = np.log(np.array([r.h for r in usable]))
    loge = np.log(np.array([r.global_error for r in usable]))
    slope = float(np.polyfit(logh, loge, 1)[0])
    pairwise = [
        float((loge[i] - loge[i + 1]) / (logh[i] - logh[i + 1]))
        for i in range(len(usable) - 1)
    ]
    return slope, pairwise


def convergence_study(
    p,
    method,
    ks,
    t_end=None,
    ref_factor=32,
    reference=None,
    repeats=3,
    tableau=None,
):
    """Run one method over h = 2^-k for k in ks and fit the observed order.

    Wall times are medians over `repeats` identical runs, stepping and
    cache construction accounted separately. A divergence at some h is
    recorded in its row rather than aborting the study; errors at the
    roundoff floor are flagged and excluded from the order fit.

    The reference is the problem's closed-form solution when it has one
    (a fine integration would deposit its own accumulated roundoff on
    top of the floor). Otherwise a cross-checked fine integration is
    built lazily, at the first stepsize that actually produces a state,
    so a study whose every run diverges never needs one.
    """
    ks = sorted(int(k) for k in ks)
    if not ks:
        raise ConfigError("convergence_study: empty stepsize grid")
    if repeats < 1:
        raise ConfigError(f"convergence_study: repeats must be >= 1, got {repeats}")
    t_end = p.t_span[1] if t_end is None else float(t_end)
    if reference is not None:
        reference = np.asarray(reference, dtype=float)

    def ensure_reference():
        nonlocal reference
        if reference is None:
            if p.exact is not None:
                reference = np.asarray(p.exact(t_end), dtype=float)
            else:
                reference = reference_solution(
                    p, 2.0 ** -max(ks), ref_factor, t_end=t_end
                )
        return reference

    rows = []
    for k in ks:
        h = 2.0**-k
        try:
            runs = [
                integrate(method, p, h, t_end=t_end, tableau=tableau)
                for _ in range(repeats)
            ]
        except DivergenceError:
            n = int(round((t_end - p.t_span[0]) / h))
            rows.append(
                StudyRow(
                    k=k,
                    h=h,
                    steps=n,
                    global_error=float("inf"),
                    wall_time_total_s=float("nan"),
                    wall_time_cache_s=float("nan"),
                    diverged=True,
                )
            )
            continue
        ref = ensure_reference()
        floor = FLOOR_FACTOR * np.finfo(float).eps * float(np.max(np.abs(ref)))
        ge = global_error(runs[0].y_end, ref)
        at_floor = bool(ge <= floor)
        if ge == 0.0:
            ge = floor  # exact match: report the measurement floor, flagged
        cache_s = statistics.median(r.wall_cache_s for r in runs)
        step_s = statistics.median(r.wall_step_s for r in runs)
        rows.append(
            StudyRow(
                k=k,
                h=h,
                steps=runs[0].steps,
                global_error=ge,
                wall_time_total_s=step_s + cache_s,
                wall_time_cache_s=cache_s,
                at_floor=at_floor,
            )
        )

    # Largest h first, the order plots' conventional direction.
    rows.sort(key=lambda r: -r.h)
    fitted, pairwise = _fit_order(rows)
    return ConvergenceReport(
        problem=p.label,
        method=method,
        rows=rows,
        fitted_order=fitted,
        pairwise_orders=pairwise,
        environment={
            "dim": p.dim,
            "params": dict(p.params),
            "t_end": t_end,
            "ref_factor": int(ref_factor),
            "repeats": int(repeats),
            "fd_derivatives": bool(p.fd_derivatives),
        },
    )


def summarize(report):
    """One human-readable line per study."""
    live = [r for r in report.rows if not r.diverged]
    if live and all(r.at_floor for r in live):
        return (
            f"{report.problem}/{report.method}: exact to roundoff at every "
            f"stepsize (no order to fit)"
        )
    note = ""
    if any(r.diverged for r in report.rows):
        bad = [f"2^-{r.k}" for r in report.rows if r.diverged]
        note = f" (diverged at h = {', '.join(bad)})"
    return f"{report.problem}/{report.method}: fitted order {report.fitted_order:.2f}{note}"


def efficiency_table(reports):
    """(method, h, global_error, wall seconds) rows for one shared problem.

    Cache time is excluded: the table compares sustained per-run stepping
    cost at matched accuracy. Mixing problems is refused.
    """
    labels = {r.problem for r in reports}
    if len(labels) > 1:
        raise ConfigError(f"efficiency_table: reports mix problems {sorted(labels)}")
    rows = []
    for rep in reports:
        for row in rep.rows:
            if row.diverged:
                continue
            rows.append(
                (
                    rep.method,
                    row.h,
                    row.global_error,
                    row.wall_time_total_s - row.wall_time_cache_s,
                )
            )
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


# ---------------------------------------------------------------------------
# serialization


def write_csv(reports, path):
    """All study rows as one flat CSV with the fixed header."""
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        w = csv.writer(fh)
        for rep in reports:
            for r in rep.rows:
                w.writerow(
                    [
                        rep.problem,
                        rep.method,
                        r.k,
                        repr(r.h),
                        r.steps,
                        repr(r.global_error),
                        repr(r.wall_time_total_s),
                        repr(r.wall_time_cache_s),
                    ]
                )


def read_csv(path):
    """Rows back from write_csv output, numeric fields parsed."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER.split(","):
            raise ConfigError(f"unexpected CSV header in {path}: {reader.fieldnames}")
        for rec in reader:
            out.append(
                {
                    "problem": rec["problem"],
                    "method": rec["method"],
                    "k": int(rec["k"]),
                    "h": float(rec["h"]),
                    "steps": int(rec["steps"]),
                    "global_error": float(rec["global_error"]),
                    "wall_time_total_s": float(rec["wall_time_total_s"]),
                    "wall_time_cache_s": float(rec["wall_time_cache_s"]),
                }
            )
    return out


def report_to_dict(report):
    return {
        "problem": report.problem,
        "method": report.method,
        "fitted_order": report.fitted_order,
        "pairwise_orders": list(report.pairwise_orders),
        "environment": dict(report.environment),
        "rows": [asdict(r) for r in report.rows],
    }


def report_from_dict(obj):
    return ConvergenceReport(
        problem=obj["problem"],
        method=obj["method"],
        rows=[StudyRow(**r) for r in obj["rows"]],
        fitted_order=float(obj["fitted_order"]),
        pairwise_orders=[float(x) for x in obj["pairwise_orders"]],
        environment=dict(obj["environment"]),
    )


def write_json(reports, path, config=None):
    """Reports plus the fully resolved run configuration, round-trippable."""
    payload = {
        "config": dict(config) if config else {},
        "reports": [report_to_dict(r) for r in reports],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        payload = json.load(fh)
    return payload["config"], [report_from_dict(o) for o in payload["reports"]]
