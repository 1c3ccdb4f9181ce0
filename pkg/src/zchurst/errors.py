"""Exception types shared across the package.

Two broad families matter to callers: input problems (bad lengths, parameters
outside their domain) and numerical failures (an embedding or quadrature that
did not do its job). The CLI maps the first family to exit code 2 and the
second to exit code 3.
"""


class ZchurstError(Exception):
    """Base class for all package-specific errors."""


class InputError(ZchurstError):
    """A caller-supplied value is unusable (wrong shape, out of domain)."""


class NumericalError(ZchurstError):
    """A numerical procedure failed to produce a trustworthy result."""


class BadLength(InputError):
    """A sequence is too short for the requested operation."""


class DomainError(InputError):
    """A scalar parameter lies outside the operation's domain."""


class DegenerateCorrelation(InputError):
    """A correlation argument sits on the |rho| = 1 boundary where the
    formula degenerates."""


class EmbeddingNotPSD(NumericalError):
    """The circulant embedding produced an eigenvalue below the clamping
    tolerance; synthesis cannot proceed for this (H, n)."""


class NotPositiveDefinite(NumericalError):
    """A correlation matrix required to be strictly positive definite
    is not."""


class QuadratureNotConverged(NumericalError):
    """Doubling the quadrature nodes moved the result by more than the
    configured absolute tolerance."""


class UnsupportedOrder(InputError):
    """A Taylor order beyond the implemented derivatives was requested."""


class CapReached(NumericalError):
    """An upward search exhausted its cap without meeting its target."""

    def __init__(self, cap, message=None):
        self.cap = cap
        super().__init__(message or f"search reached cap k={cap}")
