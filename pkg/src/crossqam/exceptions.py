"""Exception types raised by crossqam."""


class InvalidParameterError(ValueError):
    """A parameter is outside the domain an operation accepts."""


class NotACodewordError(ValueError):
    """A vector is not in the image of the labeling being inverted."""


class ConstructionFailedError(RuntimeError):
    """A randomized construction did not converge within its round budget."""


class ConfigurationError(ValueError):
    """An experiment configuration is inconsistent or unsupported."""
