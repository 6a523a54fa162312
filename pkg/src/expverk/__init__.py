"""Fourth-order exponential Runge-Kutta integrators and their benchmark harness.

The integrators target semilinear systems y' = -M y + f(y) whose linear
part is stiff or highly oscillatory. Two families keep a constant scalar
tableau and repair stiff order through an additive correction term; two
standard phi-function baselines and classical RK4 variants ride along
for comparison.
"""

from .errors import (
    CacheMissError,
    ConfigError,
    DivergenceError,
    ExpverkError,
    MissingDerivativeError,
    UnreliableReferenceError,
)
from .harness import (
    ConvergenceReport,
    StudyRow,
    convergence_study,
    efficiency_table,
    global_error,
    read_csv,
    read_json,
    reference_solution,
    summarize,
    write_csv,
    write_json,
)
from .integrators import (
    METHOD_IDS,
    METHODS,
    CoefficientCache,
    StepResult,
    Trajectory,
    build_cache,
    erk_hochbruck5_step,
    erk_krogstad4_step,
    integrate,
    mverk4_step,
    rk4_step,
    sverk4_step,
    w4_mverk,
    w4_sverk,
)
from .matfun import PhiSet, matexp, matvec, phi_recurrence_residuals, phi_set
from .problems import (
    Problem,
    allen_cahn,
    chebyshev_second_derivative,
    finite_difference_hvp,
    finite_difference_jvp,
    linear_homogeneous,
    nls_pseudospectral,
    periodic_spectral_second_derivative,
    scalar_toy,
    wind_oscillation,
)
from .tableau import (
    BUILTIN_NAMES,
    ORDER4_TOL,
    OrderConditionReport,
    Tableau,
    builtin,
    check_order4,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_NAMES",
    "CacheMissError",
    "CoefficientCache",
    "ConfigError",
    "ConvergenceReport",
    "DivergenceError",
    "ExpverkError",
    "METHODS",
    "METHOD_IDS",
    "MissingDerivativeError",
    "ORDER4_TOL",
    "OrderConditionReport",
    "PhiSet",
    "Problem",
    "StepResult",
    "StudyRow",
    "Tableau",
    "Trajectory",
    "UnreliableReferenceError",
    "allen_cahn",
    "build_cache",
    "builtin",
    "check_order4",
    "chebyshev_second_derivative",
    "convergence_study",
    "efficiency_table",
    "erk_hochbruck5_step",
    "erk_krogstad4_step",
    "finite_difference_hvp",
    "finite_difference_jvp",
    "global_error",
    "integrate",
    "linear_homogeneous",
    "matexp",
    "matvec",
    "mverk4_step",
    "nls_pseudospectral",
    "periodic_spectral_second_derivative",
    "phi_recurrence_residuals",
    "phi_set",
    "read_csv",
    "read_json",
    "reference_solution",
    "rk4_step",
    "scalar_toy",
    "summarize",
    "sverk4_step",
    "w4_mverk",
    "w4_sverk",
    "wind_oscillation",
    "write_csv",
    "write_json",
]
