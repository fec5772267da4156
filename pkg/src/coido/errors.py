"""Exception hierarchy shared by all coido modules."""


class CoidoError(Exception):
    """Base class for every error raised by this package."""


# dataset ingestion / validation
class MalformedRecord(CoidoError):
    pass


class DimensionMismatch(CoidoError):
    pass


class DuplicateId(CoidoError):
    pass


class EmptyDataset(CoidoError):
    pass


class NonFiniteInput(CoidoError):
    pass


class IoFailure(CoidoError):
    pass


# numerics
class ZeroVector(CoidoError):
    pass


class NotSymmetric(CoidoError):
    pass


class NonFinite(CoidoError):
    pass


class NoConvergence(CoidoError):
    pass


class InvalidK(CoidoError):
    pass


class Empty(CoidoError):
    pass


# clustering
class InvalidM(CoidoError):
    pass


class TooFewPoints(CoidoError):
    pass


class EigenFailure(CoidoError):
    pass


# proxy / scorer / objective
class LabelOutOfRange(CoidoError):
    pass


class ShapeMismatch(CoidoError):
    pass


class LengthMismatch(CoidoError):
    pass


class NotNormalized(CoidoError):
    pass


class InconsistentBatch(CoidoError):
    pass


# pipeline / bench / cli
class DivergedLoss(CoidoError):
    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class EmptySelection(CoidoError):
    pass


class UnknownStrategy(CoidoError):
    pass


class InvalidSpec(CoidoError):
    pass


class InvalidConfig(CoidoError):
    pass
