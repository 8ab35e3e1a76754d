"""Exception hierarchy shared by every herdkit module."""


class HerdkitError(Exception):
    """Base class for all library errors."""


class DimensionError(HerdkitError, ValueError):
    pass


class PartitionError(HerdkitError, ValueError):
    pass


class PermutationError(HerdkitError, ValueError):
    pass


class NumericError(HerdkitError, ValueError):
    """Non-finite values reached a computation that requires finite input."""


class ArgumentError(HerdkitError, ValueError):
    pass


class SymmetryError(HerdkitError, ValueError):
    pass


class CoverageError(HerdkitError):
    """Some follower cannot be reached from the leader set."""


class StructureError(HerdkitError):
    """An internal structural assumption failed (usually a zero-tolerance issue)."""


class CertificateAssemblyError(HerdkitError):
    pass


class NotATreeError(HerdkitError):
    pass


class DepthError(HerdkitError):
    pass


class ZeroGammaError(HerdkitError, ValueError):
    pass


class NotHerdableError(HerdkitError):
    pass


class ParseError(HerdkitError, ValueError):
    pass


class ConventionError(ParseError):
    pass
