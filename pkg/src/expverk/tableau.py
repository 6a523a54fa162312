"""Explicit Runge-Kutta tableaux and the fourth-order condition check.

A tableau here is the plain scalar (A, b, c) triple. The same
coefficients drive the classical steppers directly and the exponential
steppers through their stage recursions, so validity is enforced once,
at construction: A strictly lower triangular, c consistent with the row
sums of A.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

#: Residual threshold under which a tableau counts as order four.
ORDER4_TOL = 1e-14

BUILTIN_NAMES = ("classical-rk4", "three-eighths")

# Row-sum consistency allowance. Entries like 1/3 make exact agreement
# between a stored c and the recomputed row sum impossible, so a few ulp
# of slack are granted before the stored value is discarded in favour of
# the recomputed one.
_ROWSUM_TOL = 1e-14


@dataclass
class Tableau:
    """Coefficients of an s-stage explicit Runge-Kutta method."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray = None

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        s = self.b.shape[0] if self.b.ndim == 1 else -1
        if self.A.ndim != 2 or self.A.shape != (s, s):
            raise ValueError(
                f"tableau: A must be square and match b, got A {self.A.shape}, b {self.b.shape}"
            )
        if not (np.isfinite(self.A).all() and np.isfinite(self.b).all()):
            raise ValueError("tableau: non-finite coefficients")
        if np.any(np.triu(self.A) != 0.0):
            raise ValueError("tableau: A must be strictly lower triangular (explicit method)")
        rowsums = self.A.sum(axis=1)
        if self.c is not None:
            c = np.asarray(self.c, dtype=float)
            if c.shape != (s,):
                raise ValueError(f"tableau: c has shape {c.shape}, expected ({s},)")
            if np.max(np.abs(c - rowsums)) > _ROWSUM_TOL:
                raise ValueError("tableau: c inconsistent with row sums of A")
        # Store the row sums themselves so c_i == sum_j a_ij holds exactly.
        self.c = rowsums

    @property
    def s(self):
        return self.b.shape[0]


@dataclass
class OrderConditionReport:
    """Result of check_order4: signed residuals in the canonical order."""

    residuals: np.ndarray
    satisfied: bool
    tol: float = ORDER4_TOL
    labels: tuple = field(
        default=(
            "sum b_i = 1",
            "sum b_i c_i = 1/2",
            "sum b_i c_i^2 = 1/3",
            "sum b_i a_ij c_j = 1/6",
            "sum b_i c_i^3 = 1/4",
            "sum b_i c_i a_ij c_j = 1/8",
            "sum b_i a_ij c_j^2 = 1/12",
            "b_4 a_43 a_32 c_2 = 1/24",
        )
    )


def _stable_sum(terms):
    # Sum smallest magnitude first; keeps the dyadic builtin residuals at 0.
    return float(np.sum(np.asarray(sorted(terms, key=abs))))


def check_order4(t: Tableau) -> OrderConditionReport:
    """Evaluate the eight fourth-order conditions for a four-stage tableau.

    Returns the signed residuals (left side minus right side) in the
    canonical order; `satisfied` means every |residual| <= ORDER4_TOL.
    """
    if t.s != 4:
        raise ValueError(f"check_order4: got {t.s} stages, the conditions assume 4")
    A, b, c = t.A, t.b, t.c
    rng = range(4)

    cond = [
        (list(b), 1.0),
        ([b[i] * c[i] for i in rng], 0.5),
        ([b[i] * c[i] ** 2 for i in rng], 1.0 / 3.0),
        ([b[i] * A[i, j] * c[j] for i in rng for j in rng], 1.0 / 6.0),
        ([b[i] * c[i] ** 3 for i in rng], 0.25),
        ([b[i] * c[i] * A[i, j] * c[j] for i in rng for j in rng], 0.125),
        ([b[i] * A[i, j] * c[j] ** 2 for i in rng for j in rng], 1.0 / 12.0),
        ([b[3] * A[3, 2] * A[2, 1] * c[1]], 1.0 / 24.0),
    ]
    residuals = np.array([_stable_sum(terms) - rhs for terms, rhs in cond])
    return OrderConditionReport(
        residuals=residuals, satisfied=bool(np.max(np.abs(residuals)) <= ORDER4_TOL)
    )


def builtin(name: str) -> Tableau:
    """One of the two shipped fourth-order tableaux by name."""
    if name == "classical-rk4":
        A = np.zeros((4, 4))
        A[1, 0] = 0.5
        A[2, 1] = 0.5
        A[3, 2] = 1.0
        b = np.array([1.0, 2.0, 2.0, 1.0]) / 6.0
        return Tableau(A=A, b=b)
    if name == "three-eighths":
        A = np.zeros((4, 4))
        A[1, 0] = 1.0 / 3.0
        A[2, 0] = -1.0 / 3.0
        A[2, 1] = 1.0
        A[3, 0] = 1.0
        A[3, 1] = -1.0
        A[3, 2] = 1.0
        b = np.array([1.0, 3.0, 3.0, 1.0]) / 8.0
        return Tableau(A=A, b=b)
    raise KeyError(f"unknown builtin tableau {name!r}; have {BUILTIN_NAMES}")


def to_dict(t: Tableau) -> dict:
    return {
        "s": t.s,
        "A": [[float(x) for x in row] for row in t.A],
        "b": [float(x) for x in t.b],
        "c": [float(x) for x in t.c],
    }


def from_dict(obj) -> Tableau:
    try:
        s = obj["s"]
        A = np.asarray(obj["A"], dtype=float)
        b = np.asarray(obj["b"], dtype=float)
        c = np.asarray(obj["c"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"tableau file: malformed content ({exc})") from exc
    if A.shape != (s, s) or b.shape != (s,) or c.shape != (s,):
        raise ConfigError(
            f"tableau file: declared s={s} inconsistent with shapes "
            f"A {A.shape}, b {b.shape}, c {c.shape}"
        )
    try:
        return Tableau(A=A, b=b, c=c)
    except ValueError as exc:
        raise ConfigError(f"tableau file: {exc}") from exc


def load(path) -> Tableau:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"tableau file: cannot read {path} ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"tableau file: invalid JSON in {path} ({exc})") from exc
    return from_dict(obj)


def dump(t: Tableau, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_dict(t), fh, indent=2)
        fh.write("\n")
