"""Exception types shared across the package.

Plain ValueError/KeyError cover malformed arrays and unknown names; the
classes here exist where callers need to branch on the failure (the CLI
maps them to exit codes).
"""


class ExpverkError(Exception):
    """Base class for failures with a defined recovery path."""


class ConfigError(ExpverkError):
    """Unusable run configuration: unknown problem/method, bad grid, bad path."""


class DivergenceError(ExpverkError):
    """A stage or update produced a non-finite value.

    Carries enough context to locate the blow-up: the stage index within
    the step (None if the update itself went non-finite) and, once the
    time loop re-raises, the step index and time.
    """

    def __init__(self, message, stage=None, step=None, t=None):
        super().__init__(message)
        self.stage = stage
        self.step = step
        self.t = t


class CacheMissError(ExpverkError):
    """A stepper asked the coefficient cache for an entry it does not hold.

    Caches are immutable after construction; a miss is a programming error
    at the call site, never a trigger for silent recomputation.
    """


class MissingDerivativeError(ExpverkError):
    """The stiff-correction term needs jvp/hvp and the problem has none."""

    def __init__(self, name):
        super().__init__(
            f"problem provides no {name}; supply one or call "
            "Problem.with_fd_derivatives() to opt into the finite-difference fallback"
        )
        self.name = name


class UnreliableReferenceError(ExpverkError):
    """The two reference integrators disagree beyond tolerance."""
