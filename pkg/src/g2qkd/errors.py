"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` so the CLI can map
them to a single exit status; configuration problems use :class:`ConfigError`.
"""


class G2QKDError(Exception):
    """Base class for all package errors."""


class NumericalError(G2QKDError):
    """A computation could not produce a meaningful number."""

    quantity = "value"

    def __init__(self, message: str, quantity: str | None = None):
        super().__init__(message)
        if quantity is not None:
            self.quantity = quantity


class NonConvergent(NumericalError):
    quantity = "mu"


class InvalidDistribution(NumericalError):
    quantity = "P0"


class DegenerateMean(NumericalError):
    quantity = "mu"


class DegenerateGain(NumericalError):
    quantity = "Q_mu"


class DegenerateReference(NumericalError):
    quantity = "reference_g2"


class InsufficientCoincidences(NumericalError):
    quantity = "side_peaks"


class InfeasibleLink(NumericalError):
    quantity = "waiting_time"


class DomainError(G2QKDError, ValueError):
    """Argument outside the mathematical domain of a function."""


class ConfigError(G2QKDError):
    """Scenario configuration is malformed or out of bounds."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics) or "invalid configuration")
