"""Exception hierarchy shared by the solvers and the command line."""


class TrussTubeError(Exception):
    """Base class for all package errors."""


class DomainError(TrussTubeError, ValueError):
    """A parameter lies outside the domain where the construction exists."""


class DegenerateAxisError(TrussTubeError):
    """No unique rotation about the requested axis maps the given diads."""


class SingularAxisError(DomainError):
    """The axis angle sits on phi = +-pi/4 where curvature is indeterminate."""


class GeometryError(DomainError):
    """A seed ring cannot be placed around the axis."""


class LockError(TrussTubeError):
    """The bar-length constraints admit no real continuation."""

    def __init__(self, message: str, ring_index: int):
        super().__init__(f"{message} (ring {ring_index})")
        self.ring_index = ring_index


class BranchAmbiguityError(TrussTubeError):
    """Both trilateration candidates are equally continuous with the previous ring."""


class StepSizeError(DomainError):
    pass


class ConsistencyError(DomainError):
    """Initial data violate the asymptotic ordering of the continuum model."""


class EmptyContour(DomainError):
    pass


class RangeError(DomainError):
    """A sampled profile does not cover the requested interval."""


class DegenerateFitError(TrussTubeError):
    """A convergence fit has no meaningful slope."""


class ConfigError(DomainError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
