class CensembleError(Exception):
    """Base class for all errors raised by this package."""


class DecodeError(CensembleError):
    pass


class TooSmall(CensembleError):
    pass


class ZeroDimension(CensembleError):
    pass


class UnknownTransform(CensembleError, KeyError):
    pass


class BadParams(CensembleError, ValueError):
    pass


class DegenerateScales(CensembleError):
    pass


class TransformFailed(CensembleError):
    def __init__(self, transform_id, reason):
        super().__init__(f"{transform_id}: {reason}")
        self.transform_id = transform_id
        self.reason = reason


class EmptyCorpus(CensembleError):
    pass


class SchemaMismatch(CensembleError):
    pass


class GroupTooSmall(CensembleError):
    pass


class ClassTooSmall(CensembleError):
    pass


class SingularCovariance(CensembleError):
    pass


class MissingYear(CensembleError):
    pass


class SpanTooSmall(CensembleError):
    pass


class ZeroVector(CensembleError):
    pass


class ConfigError(CensembleError):
    pass


class RankDeficientWarning(UserWarning):
    pass


class UnderdeterminedWarning(UserWarning):
    pass


class InsufficientNeighborsWarning(UserWarning):
    pass
