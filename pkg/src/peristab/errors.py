"""Exception hierarchy shared by all modules."""


class PeristabError(Exception):
    """Base class for library errors."""


class ContractViolation(PeristabError, ValueError):
    """An operation was called outside its stated preconditions."""


class ConfigurationError(PeristabError, ValueError):
    """Invalid grid, boundary-condition or experiment configuration."""


class EmptyFamilyError(ConfigurationError):
    """Horizon too small to give any node a neighbour."""


class SingularShapeTensor(PeristabError, ArithmeticError):
    """Shape tensor is singular or too ill-conditioned to invert.

    Usually signals a degenerate family geometry (e.g. collinear bonds in 2D).
    """


class CollapsedBond(PeristabError, ArithmeticError):
    """A deformed bond shrank to (nearly) zero length."""

    def __init__(self, message, bond=None):
        super().__init__(message)
        self.bond = bond


class SimulationAborted(PeristabError, RuntimeError):
    """Explicit integration produced non-finite values."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
