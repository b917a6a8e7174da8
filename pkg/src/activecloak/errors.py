"""Exception and warning types raised across the package."""


class ActiveCloakError(Exception):
    """Base class for package errors."""


class DomainError(ActiveCloakError, ValueError):
    """Argument outside the supported domain of a special function."""


class SingularityError(ActiveCloakError, ValueError):
    """Evaluation at a point where a field or kernel is singular."""


class GeometryError(ActiveCloakError, ValueError):
    """Invalid or inconsistent geometric configuration."""


class NumericalError(ActiveCloakError, ArithmeticError):
    """A numerical procedure failed (non-convergence, ill-conditioning)."""


class LevelSetNotFound(NumericalError):
    """No crossing of the requested level set along a search segment."""


class NearBoundaryWarning(UserWarning):
    """Quadrature evaluated too close to the integration curve."""
