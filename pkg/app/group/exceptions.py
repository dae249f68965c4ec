class GroupError(Exception):
    """Base exception for word, matrix and representation errors."""
    pass

class WordParseError(GroupError):
    """Exception raised when a word contains letters outside the alphabet."""
    pass

class RepresentationError(GroupError):
    """Exception raised for invalid generator assignments."""
    pass

class NotInvertibleError(GroupError):
    """Exception raised when a matrix with zero determinant is inverted."""
    pass

class FixedPointError(GroupError):
    """Exception raised when fixed points are requested for the identity."""
    pass
