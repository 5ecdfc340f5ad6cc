"""Exception hierarchy shared across the toolkit."""


class RoutePEError(Exception):
    """Base class for all toolkit errors."""


class StructuralError(RoutePEError, ValueError):
    """A route or solution is malformed (missing depot endpoints, bad indices)."""


class ConfigError(RoutePEError, ValueError):
    """Invalid or inconsistent configuration."""


class SchemaError(RoutePEError, ValueError):
    """A serialized object does not match the expected schema."""


class InfeasibleInstanceError(RoutePEError):
    """No feasible solution can be constructed for an instance."""


class DegenerateRouteError(RoutePEError, ValueError):
    """A route has zero length where a positive length is required."""


class UndefinedCorrelationError(RoutePEError, ValueError):
    """Correlation requested on constant input."""


class NumericalError(RoutePEError, ArithmeticError):
    """A numerical routine failed to converge or violated its residual contract."""
