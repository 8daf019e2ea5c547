"""Exception and warning types raised across the package."""


class RandThreshError(ValueError):
    """Base class for all input/domain errors. ``code`` is a stable name used in records."""

    code = "Error"


class ZeroMargin(RandThreshError):
    code = "ZeroMargin"


class ZeroCell(RandThreshError):
    code = "ZeroCell"

    def __init__(self, message, cells=()):
        super().__init__(message)
        self.cells = tuple(cells)


class ZeroCellWarning(UserWarning):
    pass


class NotRealizable(RandThreshError):
    code = "NotRealizable"


class SigmaOutOfRange(RandThreshError):
    code = "SigmaOutOfRange"


class DegenerateMarginal(RandThreshError):
    code = "DegenerateMarginal"


class NotFeasible(RandThreshError):
    code = "NotFeasible"


class GenerationFailed(RuntimeError):
    code = "GenerationFailed"


class ConstructionFailed(RandThreshError):
    code = "ConstructionFailed"


class AllDegenerate(RandThreshError):
    code = "AllDegenerate"


class EmptyRange(RandThreshError):
    code = "EmptyRange"
