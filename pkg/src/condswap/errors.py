"""Exception types raised across the package."""


class CondSwapError(Exception):
    """Base class for all package errors."""


class ZeroDetuning(CondSwapError, ZeroDivisionError):
    """A detuning that appears as a divisor vanishes (outside the dispersive regime)."""


class CutoffTooSmall(CondSwapError, ValueError):
    """Fock truncation discards more probability than the tolerance allows."""


class ZeroState(CondSwapError, ValueError):
    """A state with vanishing norm was passed where a normalizable one is needed."""


class NonUnitary(CondSwapError, ValueError):
    """A mode transform is not unitary to the required precision."""


class StepFailure(CondSwapError, RuntimeError):
    """The adaptive integrator could not meet its tolerance."""


class SwapUnreachable(CondSwapError, ValueError):
    """No full swap can accumulate for the given coupling-to-detuning ratio."""


class RegimeViolation(CondSwapError, ValueError):
    """Parameters violate the validity inequalities of the effective model.

    Attributes
    ----------
    failures : list of str
        Names of the failing inequalities.
    """

    def __init__(self, failures, message=None):
        self.failures = list(failures)
        if message is None:
            message = "validity checks failed: " + ", ".join(self.failures)
        super().__init__(message)


class ZeroBranch(CondSwapError, ValueError):
    """A measurement branch with (numerically) zero probability was requested."""


class NotSECSShape(CondSwapError, ValueError):
    """A superposition is not of the form w1|a,b> + w2|b,a>."""


class ZeroDenominator(CondSwapError, ZeroDivisionError):
    """Cavity damping and drive detuning are both zero."""


class ConfigError(CondSwapError, ValueError):
    """Invalid or incomplete run configuration.

    Attributes
    ----------
    path : str
        Dotted ``section.key`` location of the problem.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"[{path.split('.')[0]}].{'.'.join(path.split('.')[1:])}: {message}"
                         if "." in path else f"{path}: {message}")
