"""Exception types shared across the package."""


class UosfitError(Exception):
    """Base class for all errors raised by this package."""


class NonFinite(UosfitError, ValueError):
    """Input contains NaN or infinite entries."""


class NonSymmetric(UosfitError, ValueError):
    """Matrix is not symmetric/Hermitian within tolerance."""


class DimensionMismatch(UosfitError, ValueError):
    """Operands have incompatible shapes or ambient dimensions."""


class IndexOutOfRange(UosfitError, ValueError):
    """Partition assignment refers to a cell index outside [0, num_cells)."""


class EmptyDataSet(UosfitError, ValueError):
    """The operation requires at least one data vector."""


class TooLarge(UosfitError, ValueError):
    """Exhaustive enumeration would exceed the safety guard."""


class LengthMismatch(UosfitError, ValueError):
    """Signal length does not match the shift structure."""


class StructureMismatch(UosfitError, ValueError):
    """Invalid shift structure (shift step must divide the signal length)."""


class ParseError(UosfitError, ValueError):
    """Malformed input file; message carries the row/column location."""


class RaggedRows(ParseError):
    """CSV rows do not all have the same number of columns."""


class InvalidSpec(UosfitError, ValueError):
    """Invalid generation or run configuration."""
