"""Exception hierarchy shared across the package."""


class SwarmTuneError(Exception):
    """Base class for every error raised by this package."""


class SpaceError(SwarmTuneError):
    """Invalid search-space definition."""


class EncodingError(SwarmTuneError):
    """Genotype violates the normalized [0, 1] encoding."""


class ProtocolError(SwarmTuneError):
    """Ask/tell contract misuse (double ask, length mismatch, bad values)."""


class NoResultError(SwarmTuneError):
    """A result was requested before any evaluation completed."""


class OptimizationFailedError(SwarmTuneError):
    """Every candidate in a stage or rung failed to evaluate."""


class ScheduleError(SwarmTuneError):
    """Invalid successive-halving / bracket schedule parameters."""


class TrainingDivergedError(SwarmTuneError):
    """Training produced a non-finite loss."""


class InvalidDataError(SwarmTuneError):
    """Dataset contents violate a precondition (empty split, bad mask, ...)."""


class IngestionError(SwarmTuneError):
    """CSV parsing or validation failure."""


class InvalidWeightsError(SwarmTuneError):
    """Class-weight vector malformed or not derivable (single class)."""


class InvalidPlanError(SwarmTuneError):
    """Cross-validation plan request is unsatisfiable."""


class UndefinedMetricError(SwarmTuneError):
    """Metric undefined for the given inputs (e.g. AUC with one class)."""


class DegenerateTestError(SwarmTuneError):
    """Statistical test has no information (zero variance)."""


class CannotOversampleError(SwarmTuneError):
    """Minority class too small to synthesize from."""


class ConfigError(SwarmTuneError):
    """Experiment configuration invalid or unreadable."""


class IncomparableRunsError(SwarmTuneError):
    """Two run directories cannot be compared (plan mismatch, too few pairs)."""
