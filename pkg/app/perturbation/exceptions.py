class PerturbationError(Exception):
    """Base exception for perturbation and semi-conjugacy errors."""
    pass

class ParabolicSemiconjugacyError(PerturbationError):
    """Exception raised when no semi-conjugacy of the cusp action can be built for a deformation."""

    def __init__(self, message: str, measured: float | None = None):
        super().__init__(message)
        self.measured = measured

class SameCombinatoricsError(PerturbationError):
    """Exception raised when no candidate deformation keeps the combinatorics of the cover."""

    def __init__(self, message: str, attempts: list | None = None):
        super().__init__(message)
        self.attempts = attempts or []
