"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ShapeError(ValueError):
    """Fields defined on different grids were combined."""


class ConfigError(ValueError):
    """A scenario or problem is misconfigured."""


class SingularPointError(DomainError):
    """A closed form hits a logarithm of zero or a vanishing denominator."""


class FitError(RuntimeError):
    """Integration constants could not be fitted to the requested endpoints."""


class IntegrationError(RuntimeError):
    """An initial-value integration failed before reaching its end point."""

    def __init__(self, message, last_r=None, last_state=None):
        super().__init__(message)
        self.last_r = last_r
        self.last_state = last_state


class BvpSingularError(RuntimeError):
    """Boundary conditions are not independent (singular matching matrix)."""
