"""Exception and warning types shared across the package."""


class GeometryError(ValueError):
    """Raised when a FAR configuration cannot be evaluated (overlap, r <= a)."""


class ZeroRadialDistance(GeometryError):
    """A FAR centre coincides with the transmitter at the origin."""


class ConvergenceWarning(RuntimeWarning):
    """The two-FAR series hit ``max_terms`` before its terms fell below the floor."""


class DegenerateStats(ValueError):
    """A hypothesis variance is zero, so Q-function arguments are undefined."""


class MismatchedSlot(ValueError):
    """Joint statistics requested for two different slot indices."""


class SingleClass(ValueError):
    """Empirical AUC needs samples from both hypotheses."""
