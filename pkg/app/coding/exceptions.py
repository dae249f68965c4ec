class CodingError(Exception):
    """Base exception for coding-engine errors."""
    pass

class CodingFailedError(CodingError):
    """Exception raised when no admissible vertex or label continues a coding."""
    pass

class CoderConstructionError(CodingError):
    """Exception raised when a finitary point coder edge fails its inclusion."""
    pass

class NestingSearchExhaustedError(CodingError):
    """Exception raised when a nesting search hits its budget without a witness."""

    def __init__(self, message: str, budget: int):
        super().__init__(message)
        self.budget = budget
