"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Input data violates a documented precondition (non-finite, bad shape, ...)."""


class InvalidParameterError(ValueError):
    """A configuration parameter is out of its allowed range."""


class DimensionMismatchError(ValueError):
    """Operand shapes or lengths are inconsistent."""


class StructureError(ValueError):
    """A sparse matrix violates its structural invariants."""


class SingularFactorError(RuntimeError):
    """A triangular solve met a zero diagonal entry."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class FactorBreakdownError(RuntimeError):
    """An incomplete factorization hit a zero or non-positive pivot."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class PcgBreakdownError(RuntimeError):
    """The conjugate gradient iteration lost positive definiteness."""

    def __init__(self, message: str, iteration: int, outer_iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration
        self.outer_iteration = outer_iteration


class UndefinedMetricError(ValueError):
    """A metric was requested on inputs where it is undefined."""


class PhmFormatError(ValueError):
    """A phase-map file failed to parse; ``offset`` is the failing byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
