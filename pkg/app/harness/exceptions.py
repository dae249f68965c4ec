class HarnessError(Exception):
    """Base exception for experiment configuration and run orchestration errors."""
    pass

class ConfigError(HarnessError):
    """Exception raised when an experiment config cannot be parsed or validated.

    ``errors`` lists one ``{"field": ..., "message": ...}`` entry per problem;
    JSON syntax errors also carry ``line`` and ``column``.
    """

    def __init__(self, message: str, errors: list[dict] | None = None):
        super().__init__(message)
        self.errors = errors or []

class RegressionFileError(HarnessError):
    """Exception raised for unreadable regression files or freezing a failed report."""
    pass
