class CapExceededError(ValueError):
    """A problem size exceeds a hard limit (factorial table, Fock oracle)."""


class NumericalHealthError(RuntimeError):
    """A computed distribution failed its normalization check."""


class ZeroProbabilityError(ValueError):
    """Conditioning on an event of probability zero."""
