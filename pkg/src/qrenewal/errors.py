"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument or configuration value is outside its valid domain."""


class NumericalQualityError(RuntimeError):
    """A numerical guard tripped; the result would not be trustworthy."""


class TruncationError(NumericalQualityError):
    """Too many trajectories hit the jump cap before reaching the final time."""


class ResolutionError(NumericalQualityError):
    """The convolution series could not reach the requested tolerance."""
