class CuspedSpaceError(Exception):
    """Base exception for cusped-space errors."""
    pass

class BallBudgetError(CuspedSpaceError):
    """Exception raised when a ball exceeds its vertex budget."""
    pass

class VertexNotInBallError(CuspedSpaceError):
    """Exception raised when a query names a vertex outside the ball."""
    pass

class BallFileError(CuspedSpaceError):
    """Exception raised for unreadable or inconsistent ball files."""
    pass

class RegularizationError(CuspedSpaceError):
    """Exception raised when a horoball transit has no regular replacement of equal length."""
    pass
