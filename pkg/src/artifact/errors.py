"""Exception types shared across the package."""


class ArtifactError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ArtifactError):
    pass


class BudgetExceeded(ArtifactError):
    """A search ran past its node or time budget.

    ``bounds`` carries whatever partial information the search had when it
    stopped (for example best known lower/upper bounds).
    """

    def __init__(self, message, bounds=None):
        super().__init__(message)
        self.bounds = bounds or {}


class WindowOverflow(ArtifactError):
    pass


class NotACovering(ArtifactError):
    pass


class Unbounded(ArtifactError):
    pass


class NegativeFunction(ArtifactError):
    pass


class PrefixTooShort(ArtifactError):
    pass


class OrdinalOverflow(ArtifactError):
    pass


class NotHereditary(ArtifactError):
    pass


class InsufficientDensity(ArtifactError):
    pass


class Overflow(ArtifactError):
    pass


class NotComparability(ArtifactError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DegenerateInterval(ArtifactError):
    pass


class NotIndependentInput(ArtifactError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class EmptySpace(ArtifactError):
    pass


class NotHomogeneous(ArtifactError):
    pass


class NotInFront(ArtifactError):
    pass


class UnknownSubcommand(ValidationError):
    pass


class InvalidParams(ValidationError):
    pass
