"""Exception types shared across the package."""


class GrclabError(Exception):
    """Base class for all package-specific errors."""


class NegativeEigenvalue(GrclabError):
    """A spectrum entry is negative (covariances must be PSD)."""


class OneHotMassMismatch(GrclabError):
    """A spectrum tagged as one-hot does not sum to 1."""


class InvalidK(GrclabError):
    """Benchmark head size k is outside [1, d]."""


class InfeasibleEffectiveRank(GrclabError):
    """No threshold yields a tail with the required effective rank."""


class IndexSetTooLarge(GrclabError):
    """A head index set exceeds its cardinality budget."""


class NotAProbabilitySpectrum(GrclabError):
    """Categorical sampling requires a spectrum summing to 1."""


class DimensionMismatch(GrclabError):
    """Array shapes are inconsistent."""


class NotPSD(GrclabError):
    """A regularization matrix has a negative eigenvalue."""


class NotOneHot(GrclabError):
    """Operation requires a one-hot problem instance."""


class NotOneHotDesign(GrclabError):
    """Operation requires a design matrix of standard basis rows."""


class NotDiagonal(GrclabError):
    """Operation requires a diagonal regularizer."""


class KTooLarge(GrclabError):
    """Requested memory size exceeds what the data can supply."""


class InvalidProbability(GrclabError):
    """Probability parameter outside [0, 1]."""


class BudgetExceeded(GrclabError):
    """Exhaustive enumeration would exceed the state budget."""


class ConfigParse(GrclabError):
    """Experiment configuration file is malformed."""
