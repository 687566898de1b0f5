"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain (e.g. non-positive volume)."""


class AdmissibilityError(ValueError):
    """Shock states or relaxation time violate an admissibility condition."""


class ConsistencyError(RuntimeError):
    """Internally computed quantities contradict each other."""


class StiffnessError(RuntimeError):
    """Profile ODE denominator collapsed during integration."""


class BlowUpError(RuntimeError):
    """Non-finite values or loss of positivity during time stepping."""

    def __init__(self, message, cell=None, time=None):
        super().__init__(message)
        self.cell = cell
        self.time = time


class ConfigError(ValueError):
    """Invalid run configuration."""
