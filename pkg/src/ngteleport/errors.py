"""Exception hierarchy shared by all modules."""


class NGTeleportError(Exception):
    """Base class for library errors."""


class InvalidSpecError(NGTeleportError, ValueError):
    """A state or sweep specification is inconsistent."""


class TruncationError(NGTeleportError):
    """The Fock cutoff is too small for the requested state."""


class ZeroNormError(NGTeleportError):
    """An operator mapped a state onto the zero vector."""


class InvalidCovarianceError(NGTeleportError, ValueError):
    """A covariance matrix is unphysical or malformed."""


class ConvergenceError(NGTeleportError):
    """A numerical quadrature failed its self-consistency check."""
