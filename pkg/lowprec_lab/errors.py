"""
Exception hierarchy for lowprec-lab.

Every error raised by the library derives from LabError and from the closest
builtin, so callers may catch either. The command-line front end maps these
classes onto exit codes; library code never prints or exits.
"""

from typing import Any, Optional, Sequence, Tuple


class LabError(Exception):
    """Base class for all lowprec-lab errors."""


class ConfigError(LabError, ValueError):
    """Invalid or unknown configuration key or value."""


class FormatError(LabError, ValueError):
    """A binary fixture or telemetry file does not match its declared format."""


class QuantizationError(LabError, ValueError):
    """
    Quantiser input or output falls outside the modelled range.

    Attributes:
        value: Offending input value
        index: Array index of the offending entry, or None for scalars
    """

    def __init__(self, message: str, value: float, index: Optional[Tuple[int, ...]] = None):
        self.value = value
        self.index = index
        where = f" at {index}" if index is not None else ""
        super().__init__(f"{message}{where}: {value!r}")


class NonFiniteInput(QuantizationError):
    """NaN or infinity handed to the quantiser."""

    def __init__(self, value: float, index: Optional[Tuple[int, ...]] = None):
        super().__init__("non-finite quantiser input", value, index)


class SubnormalInput(QuantizationError):
    """Subnormal input; the relative error bound does not hold there."""

    def __init__(self, value: float, index: Optional[Tuple[int, ...]] = None):
        super().__init__("subnormal quantiser input", value, index)


class OverflowAfterRounding(QuantizationError):
    """Rounding carried the exponent past the host format's maximum."""

    def __init__(self, value: float, index: Optional[Tuple[int, ...]] = None):
        super().__init__("overflow after rounding", value, index)


class ZeroNorm(LabError, ArithmeticError):
    """Relative error requested for a zero reference."""


class NonFiniteEntries(LabError, ValueError):
    """A matrix that must be finite contains NaN or infinity."""


class DimMismatch(LabError, ValueError):
    """Operand shapes do not agree."""


class ZeroMatrix(LabError, ValueError):
    """msign of the zero matrix is undefined."""


class NoConvergence(LabError, RuntimeError):
    """An iterative kernel hit its sweep cap."""

    def __init__(self, message: str, sweeps: int):
        self.sweeps = sweeps
        super().__init__(f"{message} after {sweeps} sweeps")


class NonFiniteGradient(LabError, FloatingPointError):
    """Gradient handed to an optimiser step contains NaN or infinity."""


class PreconditionViolated(LabError, ValueError):
    """
    One or more named bound preconditions do not hold.

    Attributes:
        names: Violated condition names, in check order
    """

    def __init__(self, names: Sequence[str]):
        self.names = list(names)
        super().__init__("precondition violated: " + "; ".join(self.names))


class BoundInputMismatch(LabError, ValueError):
    """Run telemetry and bound input describe different configurations."""


class LemmaViolated(LabError, AssertionError):
    """
    A numerically certified inequality failed.

    Attributes:
        name: Lemma name as used in the suite report
        witness: Inputs and both sides of the failing instance
    """

    def __init__(self, name: str, witness: Any):
        self.name = name
        self.witness = witness
        super().__init__(f"lemma {name} violated: {witness!r}")


class TrainingError(LabError, RuntimeError):
    """
    Failure inside the training loop, tagged with the iteration index.

    The original exception is chained as __cause__.
    """

    def __init__(self, iteration: int, cause: BaseException):
        self.iteration = iteration
        super().__init__(f"iteration {iteration}: {type(cause).__name__}: {cause}")
