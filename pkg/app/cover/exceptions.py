class CoverError(Exception):
    """Base exception for cover and automaton errors."""
    pass

class ConstantsError(CoverError):
    """Exception raised when a separation constant cannot be estimated or certified."""
    pass

class CoverConstructionError(CoverError):
    """Exception raised when no verified cover of the circle could be assembled."""
    pass

class EdgeNestingError(CoverError):
    """Exception raised when an automaton edge fails its nesting inclusions."""

    def __init__(self, message: str, source: int, target: int, label: str):
        super().__init__(message)
        self.source = source
        self.target = target
        self.label = label

class CoverFileError(CoverError):
    """Exception raised for unreadable or inconsistent cover and automaton files."""
    pass
