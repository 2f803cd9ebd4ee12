"""Exception types raised across the package."""


class PairspinError(Exception):
    """Base class; ``kind`` is the machine-readable tag used by the CLI."""

    kind = "Error"


class ConfigError(PairspinError, ValueError):
    kind = "ConfigError"

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class UnsupportedPolarization(PairspinError, ValueError):
    kind = "UnsupportedPolarization"


class StepUnderflow(PairspinError, ArithmeticError):
    kind = "StepUnderflow"


class NonFiniteState(PairspinError, ArithmeticError):
    kind = "NonFiniteState"


class SingularShooting(PairspinError, ArithmeticError):
    kind = "SingularShooting"


class UnresolvedWinding(PairspinError, ArithmeticError):
    kind = "UnresolvedWinding"


class GridPointError(PairspinError):
    """A backend failure at one grid point, with the point attached."""

    kind = "GridPointError"

    def __init__(self, momentum, cause):
        self.momentum = tuple(float(v) for v in momentum)
        self.cause = cause
        super().__init__(f"at p={self.momentum}: {type(cause).__name__}: {cause}")
