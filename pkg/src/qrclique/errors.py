"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A parameter is outside its admissible range."""


class NonConvergenceError(ArithmeticError):
    """A series evaluation needed more terms than the configured cap."""


class RootFindingError(ArithmeticError):
    """Base class for failures while isolating real roots."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class KurtzPreconditionError(RootFindingError):
    """The Kurtz criterion does not hold, so real-rootedness is not guaranteed."""


class RootCountError(RootFindingError):
    """Fewer sign changes were found than roots expected."""


class BracketingError(RootFindingError):
    """A root could not be bracketed or certified after all fallbacks."""


class DistinctnessError(RootFindingError):
    """Two root enclosures overlap after refinement."""


class PartitionSizeError(ValueError):
    """Part-size rounding would leave a part empty."""


class GraphFormatError(ValueError):
    """Malformed edge-list or witness file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TailMassError(ArithmeticError):
    """The truncated weight sequence leaves too much mass in its tail."""
