"""Exception hierarchy shared by all modules.

Every error carries a short ``kind`` tag so the CLI can print a one-line,
machine-parseable reason and pick the right exit code.
"""


class SphcsError(Exception):
    kind = "error"
    exit_code = 2


class DomainError(SphcsError, ValueError):
    """Input outside the mathematical domain of an operation."""

    kind = "domain"


class OutOfRegimeError(DomainError):
    """No small-angle root exists for the requested radius/window."""

    kind = "regime"


class WindowError(DomainError):
    """Angle lies outside the principal-part window ``|theta| < s_d``."""

    kind = "window"


class CutoffError(DomainError):
    """Truncated Fourier basis too small for the requested label."""

    kind = "cutoff"


class TruncationError(SphcsError, ArithmeticError):
    """Lattice window cannot certify the requested tolerance."""

    kind = "truncation"
    exit_code = 3


class OracleUnavailableError(SphcsError, ArithmeticError):
    """Spectral oracle cannot converge for these parameters."""

    kind = "oracle"
    exit_code = 3


class QuadratureError(SphcsError, ArithmeticError):
    kind = "quadrature"
    exit_code = 3
