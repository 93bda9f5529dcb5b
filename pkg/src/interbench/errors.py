"""Exception hierarchy shared across the package."""


class InterbenchError(Exception):
    """Base class for every error raised by interbench."""


class InvalidInterval(InterbenchError, ValueError):
    """An interval with lower > upper, a non-finite bound, or a negative half-range."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ParseError(InterbenchError, ValueError):
    pass


class MissingTarget(InterbenchError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing target"


class DegenerateSplit(InterbenchError, ValueError):
    pass


class DimensionMismatch(InterbenchError, ValueError):
    pass


class EmptyBatch(InterbenchError, ValueError):
    pass


class NonFiniteUpdate(InterbenchError, FloatingPointError):
    pass


class TrainingDiverged(InterbenchError, RuntimeError):
    pass


class RankDeficient(InterbenchError, ValueError):
    pass


class IterationLimit(InterbenchError, RuntimeError):
    pass


class BandwidthInvalid(InterbenchError, ValueError):
    pass


class LengthMismatch(InterbenchError, ValueError):
    pass


class ConfigError(InterbenchError, ValueError):
    pass


class ExperimentError(InterbenchError, RuntimeError):
    """A model failed inside an experiment; carries where it happened."""

    def __init__(self, model, replication, cause):
        super().__init__(f"model {model!r}, replication {replication}: {cause}")
        self.model = model
        self.replication = replication
        self.cause = cause
