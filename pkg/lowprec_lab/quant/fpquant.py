"""
Bit-exact floating-point quantisation emulator.

Values stay in binary64. Quantising to M mantissa bits keeps the sign and the
11-bit exponent and rounds away the low 52 - M mantissa bits. Rounding is
integer arithmetic on the magnitude bits, so a carry out of the mantissa
field increments the exponent on its own.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from ..constants import HOST_MANTISSA_BITS
from ..errors import NonFiniteInput, OverflowAfterRounding, SubnormalInput, ZeroNorm
from .rng import RngStream

_SIGN = np.uint64(1 << 63)
_MAGNITUDE = np.uint64((1 << 63) - 1)
_EXP_SHIFT = np.uint64(HOST_MANTISSA_BITS)
_EXP_ALL_ONES = np.uint64(0x7FF)
_MANT_MASK = np.uint64((1 << HOST_MANTISSA_BITS) - 1)


class Rounding(str, Enum):
    TRUNCATE = "truncate"
    NEAREST_EVEN = "nearest_even"
    STOCHASTIC = "stochastic"


@dataclass(frozen=True)
class QuantSpec:
    """
    One quantisation configuration.

    mantissa_bits at or above 52 is the identity on binary64 values. q_override
    replaces the reported bound 2^-M for formats whose constant differs from 1.
    """
    mantissa_bits: int = HOST_MANTISSA_BITS
    rounding: Rounding = Rounding.STOCHASTIC
    enabled: bool = False
    q_override: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.rounding, Rounding):
            object.__setattr__(self, "rounding", Rounding(self.rounding))
        self.validate()

    def validate(self) -> None:
        if self.mantissa_bits < 0:
            raise ValueError(f"mantissa_bits must be >= 0, got {self.mantissa_bits}")
        if self.q_override is not None and not 0.0 <= self.q_override < 1.0:
            raise ValueError(f"q_override must be in [0, 1), got {self.q_override}")

    @property
    def dropped_bits(self) -> int:
        return max(0, HOST_MANTISSA_BITS - self.mantissa_bits)

    @property
    def is_identity(self) -> bool:
        return not self.enabled or self.dropped_bits == 0

    @property
    def q(self) -> float:
        """Relative error bound reported to the theory module (0 when disabled)."""
        if not self.enabled:
            return 0.0
        if self.q_override is not None:
            return self.q_override
        return 2.0 ** (-self.mantissa_bits)


def _check_inputs(bits: np.ndarray, values: np.ndarray) -> None:
    exponent = (bits & _MAGNITUDE) >> _EXP_SHIFT
    bad = exponent == _EXP_ALL_ONES
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise NonFiniteInput(float(values[idx]), idx)
    sub = (exponent == 0) & ((bits & _MANT_MASK) != 0)
    if sub.any():
        idx = tuple(int(i) for i in np.argwhere(sub)[0])
        raise SubnormalInput(float(values[idx]), idx)


def _round_magnitude(mag: np.ndarray, spec: QuantSpec, rng: Optional[RngStream]) -> np.ndarray:
    k = spec.dropped_bits
    low_mask = np.uint64((1 << k) - 1)
    keep_mask = ~low_mask

    if spec.rounding is Rounding.TRUNCATE:
        return mag & keep_mask

    if spec.rounding is Rounding.NEAREST_EVEN:
        half = np.uint64(1 << (k - 1))
        low = mag & low_mask
        lsb = (mag >> np.uint64(k)) & np.uint64(1)
        round_up = (low > half) | ((low == half) & (lsb == np.uint64(1)))
        return (mag & keep_mask) + np.where(round_up, np.uint64(1 << k), np.uint64(0))

    if rng is None:
        raise ValueError("stochastic rounding needs an RngStream")
    # uniform integer in [0, 2^k): rounds up with probability low / 2^k
    noise = rng.generator().integers(0, 1 << k, size=mag.shape, dtype=np.uint64)
    return (mag + noise) & keep_mask


def quantize_mat(X: np.ndarray, spec: QuantSpec, rng: Optional[RngStream] = None) -> np.ndarray:
    """
    Quantise every entry of X and return the dequantised values.

    X may have any shape (matrices and bias vectors alike); the result is a
    new float64 array. Stochastic rounding draws from `rng`.

    Raises:
        NonFiniteInput: NaN or infinity in X
        SubnormalInput: nonzero subnormal entry in X
        OverflowAfterRounding: carry past the largest exponent
    """
    values = np.array(X, dtype=np.float64, copy=True)
    if spec.is_identity:
        return values

    bits = values.view(np.uint64)
    _check_inputs(bits, values)

    sign = bits & _SIGN
    mag = _round_magnitude(bits & _MAGNITUDE, spec, rng)

    overflow = (mag >> _EXP_SHIFT) == _EXP_ALL_ONES
    if overflow.any():
        idx = tuple(int(i) for i in np.argwhere(overflow)[0])
        raise OverflowAfterRounding(float(values[idx]), idx)

    return (sign | mag).view(np.float64)


def quantize_scalar(x: float, spec: QuantSpec, rng: Optional[RngStream] = None) -> float:
    """Quantise one value; see quantize_mat for the error contract."""
    try:
        return float(quantize_mat(np.array([x], dtype=np.float64), spec, rng)[0])
    except (NonFiniteInput, SubnormalInput, OverflowAfterRounding) as e:
        raise type(e)(e.value) from None


def measure_rel_error(X: np.ndarray, XQ: np.ndarray) -> float:
    """
    Relative quantisation error ||XQ - X||_F / ||X||_F.

    Raises:
        ZeroNorm: If X is zero
    """
    X = np.asarray(X, dtype=np.float64)
    norm = float(np.linalg.norm(X))
    if norm == 0.0:
        raise ZeroNorm("relative error of a zero reference")
    return float(np.linalg.norm(np.asarray(XQ, dtype=np.float64) - X)) / norm


def measure_rel_error_blocks(Xs: Sequence[np.ndarray], XQs: Sequence[np.ndarray]) -> Optional[float]:
    """
    Pooled relative error over several blocks, sqrt(sum ||dX||^2 / sum ||X||^2).

    Returns None when every reference block is zero.
    """
    num = 0.0
    den = 0.0
    for X, XQ in zip(Xs, XQs):
        X = np.asarray(X, dtype=np.float64)
        num += float(np.sum((np.asarray(XQ, dtype=np.float64) - X) ** 2))
        den += float(np.sum(X * X))
    if den == 0.0:
        return None
    return float(np.sqrt(num / den))


def bracket(x: float, mantissa_bits: int) -> Tuple[float, float]:
    """
    The two values representable at `mantissa_bits` that enclose x.

    Both entries equal x when x is representable.
    """
    spec = QuantSpec(mantissa_bits=mantissa_bits, rounding=Rounding.TRUNCATE, enabled=True)
    toward_zero = quantize_scalar(x, spec)
    if toward_zero == x:
        return x, x
    ulp = np.ldexp(1.0, int(np.frexp(abs(toward_zero))[1]) - 1 - min(mantissa_bits, HOST_MANTISSA_BITS))
    away = toward_zero + ulp if x > 0 else toward_zero - ulp
    return (toward_zero, away) if x > 0 else (away, toward_zero)
