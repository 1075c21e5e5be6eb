"""Exception hierarchy."""


class CliffDiracError(Exception):
    """Base class for all package errors."""


class GradeError(CliffDiracError, ValueError):
    """An operand has the wrong grade for the requested operation."""


class SingularMultivectorError(CliffDiracError, ArithmeticError):
    """Left multiplication by the multivector is not invertible."""


class DegenerateMetricError(CliffDiracError, ValueError):
    """Metric violates det < 0 / signature -2 at some point."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class BoundaryError(CliffDiracError, ValueError):
    """A finite-difference stencil would leave the chart box."""


class NotSpinError(CliffDiracError, ValueError):
    pass


class OffShellError(CliffDiracError, ValueError):
    """Momentum does not satisfy p_mu p^mu = m^2."""


class CompatibilityError(CliffDiracError, ValueError):
    """Contorsion/torsion fails the required index symmetry."""


class PreconditionError(CliffDiracError, ValueError):
    pass


class ConfigError(CliffDiracError, ValueError):
    pass
