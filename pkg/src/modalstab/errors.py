"""Exception hierarchy shared by all modalstab modules."""


class ModalStabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ModalStabError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(ModalStabError, ValueError):
    """A parameter combination the library refuses to handle."""


class UnsupportedConfigurationError(ConfigurationError):
    """The requested computation is undefined for this configuration."""


class QuadratureError(ModalStabError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes:
        estimate: best integral estimate obtained.
        error: estimated absolute error of ``estimate``.
    """

    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class NumericError(ModalStabError, ArithmeticError):
    """A dense linear-algebra step failed."""


class NotStateStabilizableError(ModalStabError):
    """An unstable mode cannot be reached by the input.

    ``witness`` is the :class:`~modalstab.modes.ModeRecord` of the offending mode.
    """

    def __init__(self, witness):
        super().__init__(
            f"mode n={witness.n} has eigenvalue {witness.lam!r} >= 0 and b_n = 0"
        )
        self.witness = witness


class SimulationDiverged(ModalStabError):
    """State norm exceeded the divergence guard; ``trajectory`` holds the samples so far."""

    def __init__(self, trajectory, guard):
        super().__init__(
            f"state norm exceeded {guard:g} after t={trajectory.times[-1]!r}"
            if len(trajectory.times)
            else f"state norm exceeded {guard:g} at t=0"
        )
        self.trajectory = trajectory
        self.guard = guard


class EstimationError(ModalStabError):
    """Not enough usable samples to fit a decay rate."""


class ConfigError(ModalStabError):
    """Malformed run configuration; names the offending key and line."""

    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
