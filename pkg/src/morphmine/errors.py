"""Exception types shared across the package, with CLI exit codes attached."""


class MorphmineError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 3


class ConfigError(MorphmineError):
    """Bad command-line usage, option values, or configuration files."""

    exit_code = 1


class DataError(MorphmineError):
    """Malformed or missing input data or pipeline artifacts."""

    exit_code = 2


class InvariantError(MorphmineError):
    """Internal consistency violation; indicates a bug, not bad input."""

    exit_code = 3


class MissingEmbeddingError(DataError):
    """No member of an abstract form has a vector in the embedding table."""


class StageError(MorphmineError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 3)
