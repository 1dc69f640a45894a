"""Exception hierarchy shared by every hybridlab module."""


class HybridLabError(Exception):
    """Base class for all library errors."""


class ShapeError(HybridLabError, ValueError):
    """Operand dimensions or label counts do not match."""


class DomainError(HybridLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(HybridLabError, ValueError):
    """A requested Hilbert-space dimension exceeds the configured cap."""


class InvariantError(HybridLabError, ValueError):
    """A constructed object violates one of its type invariants.

    ``step`` is set when the violation came from a map generated inside a
    trajectory slice.
    """

    def __init__(self, message, step=None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class DegenerateStateError(InvariantError):
    """Canonicalization removed every branch of a hybrid state."""


class LocalityError(HybridLabError, ValueError):
    """A Hamiltonian term couples S and M directly."""


class ConfigError(HybridLabError, ValueError):
    """A scenario configuration failed to parse or validate."""
