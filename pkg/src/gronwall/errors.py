"""Exception hierarchy shared by every module of the toolkit."""


class GronwallError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(GronwallError, ValueError):
    """Operands have incompatible lengths or shapes."""


class InvariantError(GronwallError, ValueError):
    """Input violates a structural invariant (NaN, negative entry, ...)."""


class ParameterError(GronwallError, ValueError):
    """A scalar parameter is outside its allowed range."""


class PreconditionError(GronwallError, ValueError):
    """Data do not satisfy the precondition of the requested bound."""


class AdmissibilityError(GronwallError):
    """A spectral hypothesis (B*rho_K < 1, B < lambda_1, C*rho_K < 1) fails.

    ``hypothesis`` is a short formula naming the violated condition and
    ``value`` the quantity that was compared against its threshold.
    """

    def __init__(self, message, hypothesis=None, value=None):
        super().__init__(message)
        self.hypothesis = hypothesis
        self.value = value


class NumericError(GronwallError, ArithmeticError):
    """Overflow, non-finite iterate or singular system."""


class ConvergenceError(GronwallError):
    """An iterative procedure failed to converge."""


class DivergenceError(ConvergenceError):
    """Picard iterates blew up."""


class ResourceError(GronwallError):
    """Requested computation exceeds a hard size cap."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required
