class BoundaryError(Exception):
    """Base exception for boundary-model errors."""
    pass

class PointFormatError(BoundaryError):
    """Exception raised when a point string cannot be parsed."""
    pass

class ArcError(BoundaryError):
    """Exception raised for malformed arcs or unsupported arc operations."""
    pass

class TailCertificationError(BoundaryError):
    """Exception raised when the orbit tail of an arc cannot be certified."""
    pass
