"""Exception hierarchy shared by all modules."""


class ClusterOptError(Exception):
    """Base class for errors raised by clusteropt."""


class DomainError(ClusterOptError, ValueError):
    """A numeric input is outside the domain of an operation (NaN, inf, out of range)."""


class SingularPhaseError(DomainError):
    """A phase sits on a pole of tan/cot, or gives a degenerate squeeze."""


class NotSymplecticError(DomainError):
    """A matrix fails the determinant / symplectic-form check."""


class DimensionError(ClusterOptError, ValueError):
    """Operands have incompatible shapes."""
