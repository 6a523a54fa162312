"""Command line front end.

Two subcommands: `run` executes convergence studies over a dyadic
stepsize grid and optionally writes CSV/JSON; `check-tableau` prints the
eight fourth-order condition residuals for a tableau file.

Exit codes: 0 success, 2 unusable configuration, 3 divergence while
building the reference, 4 unreliable reference; 1 for anything else.
Fatal failures print one JSON object to stderr.
"""

import argparse
import hashlib
import inspect
import json
import platform
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import harness, tableau as tableau_mod
from .errors import ConfigError, DivergenceError, ExpverkError, UnreliableReferenceError
from .integrators import METHOD_IDS, METHODS
from .problems import allen_cahn, nls_pseudospectral, scalar_toy, wind_oscillation

DEFAULT_METHODS = (
    "mverk41",
    "mverk42",
    "sverk41",
    "sverk42",
    "erk-hochbruck5",
    "erk-krogstad4",
)

# factory, default k range, default t_end (the wind problem's span is 100
# but a quick run uses 10; pass --t-end 100 for the full span).
_PROBLEMS = {
    "wind": (wind_oscillation, (4, 8), 10.0),
    "allen-cahn": (allen_cahn, (9, 13), 10.0),
    "nls": (nls_pseudospectral, (3, 7), 10.0),
    "scalar-linear": (lambda **kw: scalar_toy(kind="linear", **kw), (4, 8), 1.0),
    "scalar-quadratic": (lambda **kw: scalar_toy(kind="quadratic", **kw), (4, 8), 1.0),
}


def _parse_k_range(text):
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
    elif re.fullmatch(r"\d+", text):
        a = b = int(text)
    else:
        raise ConfigError(f"--k expects A..B or a single integer, got {text!r}")
    if a > b:
        raise ConfigError(f"--k range is empty: {text}")
    return list(range(a, b + 1))


def _coerce(name, value, default):
    """Cast a --param string against the factory default's type."""
    try:
        if isinstance(default, bool):
            if value.lower() in ("true", "1", "yes"):
                return True
            if value.lower() in ("false", "0", "no"):
                return False
            raise ValueError(value)
        if isinstance(default, int) and not isinstance(default, bool):
            return int(value)
        if isinstance(default, float):
            return float(value)
        if isinstance(default, (tuple, list)):
            return tuple(float(x) for x in value.split(","))
        if isinstance(default, str):
            return value
        # No usable default type (e.g. None): accept float, fall back to str.
        try:
            return float(value)
        except ValueError:
            return value
    except ValueError as exc:
        raise ConfigError(f"--param {name}={value}: cannot coerce ({exc})") from exc


def _resolve_problem(name, param_args):
    try:
        factory, k_default, t_default = _PROBLEMS[name]
    except KeyError:
        raise ConfigError(
            f"unknown problem {name!r}; known: {', '.join(sorted(_PROBLEMS))}"
        ) from None
    sig = inspect.signature(factory)
    overrides = {}
    for item in param_args or []:
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        if key not in sig.parameters:
            known = ", ".join(k for k in sig.parameters if k != "kw")
            raise ConfigError(
                f"--param {key}: problem {name!r} has no such parameter (has: {known})"
            )
        overrides[key] = _coerce(key, value, sig.parameters[key].default)
    try:
        problem = factory(**overrides)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot build problem {name!r}: {exc}") from exc
    return problem, k_default, t_default


def _load_custom_tableau(path):
    tab = tableau_mod.load(path)
    digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
    report = tableau_mod.check_order4(tab) if tab.s == 4 else None
    if report is not None and not report.satisfied:
        print(
            f"warning: tableau {path} fails the fourth-order conditions "
            f"(max residual {np.max(np.abs(report.residuals)):.2e}); "
            "the w4 correction assumes order four",
            file=sys.stderr,
        )
    return tab, {"path": str(path), "sha256": digest}


def _cmd_run(args):
    problem, k_default, t_default = _resolve_problem(args.problem, args.param)
    ks = _parse_k_range(args.k) if args.k else list(range(k_default[0], k_default[1] + 1))
    t_end = args.t_end if args.t_end is not None else t_default

    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise ConfigError("--methods resolved to an empty list")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(
                f"unknown method {m!r}; known: {', '.join(sorted(METHODS))}"
            )

    if args.ref_factor < 32:
        raise ConfigError(f"--ref-factor must be >= 32, got {args.ref_factor}")

    custom = None
    custom_meta = None
    if args.tableau:
        custom, custom_meta = _load_custom_tableau(args.tableau)
    needs_custom = [m for m in methods if METHODS[m].family in ("mverk", "sverk")
                    and METHODS[m].tableau is None]
    if needs_custom and custom is None:
        raise ConfigError(
            f"methods {needs_custom} are generic steppers; supply --tableau FILE"
        )

    # One reference per run, shared by every method: the closed form when
    # the problem has one, otherwise a cross-checked fine integration.
    if problem.exact is not None:
        reference = np.asarray(problem.exact(t_end), dtype=float)
    else:
        reference = harness.reference_solution(
            problem, 2.0 ** -max(ks), args.ref_factor, t_end=t_end
        )

    def study(method):
        return harness.convergence_study(
            problem,
            method,
            ks,
            t_end=t_end,
            ref_factor=args.ref_factor,
            reference=reference,
            repeats=args.repeats,
            tableau=custom if METHODS[method].tableau is None and custom is not None
            else None,
        )

    if args.timing == "parallel":
        with ThreadPoolExecutor(max_workers=len(methods)) as pool:
            reports = list(pool.map(study, methods))
    else:
        reports = [study(m) for m in methods]

    for rep in reports:
        print(harness.summarize(rep))

    if args.out:
        config = {
            "problem": args.problem,
            "problem_params": dict(problem.params),
            "dim": problem.dim,
            "methods": methods,
            "k": ks,
            "t_end": t_end,
            "ref_factor": args.ref_factor,
            "repeats": args.repeats,
            "timing": args.timing,
            "tableau": custom_meta,
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
        harness.write_csv(reports, args.out + ".csv")
        harness.write_json(reports, args.out + ".json", config=config)
        print(f"wrote {args.out}.csv and {args.out}.json")
    return 0


def _cmd_check_tableau(args):
    tab = tableau_mod.load(args.path)
    if tab.s != 4:
        raise ConfigError(
            f"check-tableau: {args.path} declares {tab.s} stages; the order-four "
            "conditions assume 4"
        )
    report = tableau_mod.check_order4(tab)
    for label, res in zip(report.labels, report.residuals):
        print(f"{label:32s} residual {res: .3e}")
    if report.satisfied:
        print(f"order-4 conditions satisfied (tol {report.tol:.0e})")
        return 0
    print(f"order-4 conditions NOT satisfied (tol {report.tol:.0e})")
    return 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="expverk",
        description="Fourth-order exponential Runge-Kutta benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="convergence/efficiency study on one problem")
    runp.add_argument("--problem", required=True, help="wind | allen-cahn | nls | "
                      "scalar-linear | scalar-quadratic")
    runp.add_argument("--methods", default=",".join(DEFAULT_METHODS),
                      help="comma-separated method ids "
                           f"(default: {','.join(DEFAULT_METHODS)})")
    runp.add_argument("--k", default=None,
                      help="stepsize exponents A..B, h = 2^-k (per-problem default)")
    runp.add_argument("--t-end", type=float, default=None, dest="t_end")
    runp.add_argument("--ref-factor", type=int, default=32, dest="ref_factor",
                      help="reference stepsize refinement (>= 32)")
    runp.add_argument("--repeats", type=int, default=3,
                      help="timing repetitions per (method, h); median reported")
    runp.add_argument("--out", default=None,
                      help="output prefix; writes PREFIX.csv and PREFIX.json")
    runp.add_argument("--timing", choices=("sequential", "parallel"),
                      default="sequential",
                      help="parallel runs methods concurrently; wall times then "
                           "stop being comparable")
    runp.add_argument("--tableau", default=None,
                      help="JSON tableau file for the generic mverk4/sverk4 steppers")
    runp.add_argument("--param", action="append", default=[],
                      help="problem parameter override, key=value (repeatable)")
    runp.set_defaults(func=_cmd_run)

    checkp = sub.add_parser("check-tableau",
                            help="print the eight order-4 condition residuals")
    checkp.add_argument("path")
    checkp.set_defaults(func=_cmd_check_tableau)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _emit_error(exc)
        return 2
    except DivergenceError as exc:
        _emit_error(exc)
        return 3
    except UnreliableReferenceError as exc:
        _emit_error(exc)
        return 4
    except ExpverkError as exc:
        _emit_error(exc)
        return 1


def _emit_error(exc):
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
          file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
