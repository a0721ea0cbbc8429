"""Exception hierarchy shared by all modules."""


class TrafoEnsError(Exception):
    """Base class for every error raised by this package."""


class InputError(TrafoEnsError, ValueError):
    """Malformed or non-finite input."""


class DomainError(InputError):
    """Argument outside the mathematical domain of an operation."""


class ShapeError(InputError):
    """Array shapes that do not line up (members, classes, grids)."""


class ValidationError(InputError):
    """A panel or prediction violates its invariants.

    ``violations`` holds the individual findings when available.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ScoreKindError(InputError):
    """Score kind not applicable to the sample space (e.g. Brier with K != 2)."""


class UnsupportedObservationError(InputError):
    """Observation type not supported by a score or metric (e.g. censored RPS)."""


class DegeneratePoolError(TrafoEnsError):
    """Pooled density has no mass left."""


class OptimizationError(TrafoEnsError):
    """Weight tuning could not find a finite starting objective."""


class UndefinedMetricError(TrafoEnsError):
    """Metric undefined on the given data (single-class AUC, degenerate kappa)."""


class UnstableMetricError(TrafoEnsError):
    """Too many bootstrap resamples produced an undefined metric."""


class DegenerateInputError(TrafoEnsError):
    """Input carries no information for the requested fit (e.g. constant predictions)."""


class TrainingError(TrafoEnsError):
    """Model training failed (non-finite loss at initialization)."""


class DegenerateDataError(TrainingError):
    """Training split does not contain every outcome class."""


class UndefinedBandError(TrafoEnsError):
    """Epistemic band needs at least two members."""
