"""Four-component quantisation policy (weights, gradients, first and second moment)."""

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Optional

from ..constants import COMPONENT_SYMBOLS, COMPONENTS
from .fpquant import QuantSpec, Rounding


@dataclass(frozen=True)
class QuantPolicy:
    """
    Per-component QuantSpecs.

    The reported bounds (q_W, q_G, q_M, q_V) are 2^-M for enabled components
    and 0 for disabled ones.
    """
    weights: QuantSpec = field(default_factory=QuantSpec)
    gradients: QuantSpec = field(default_factory=QuantSpec)
    moment1: QuantSpec = field(default_factory=QuantSpec)
    moment2: QuantSpec = field(default_factory=QuantSpec)

    @classmethod
    def disabled(cls) -> "QuantPolicy":
        return cls()

    @classmethod
    def uniform(cls, mantissa_bits: int, rounding: Rounding = Rounding.STOCHASTIC,
                components: Optional[Iterable[str]] = None) -> "QuantPolicy":
        """Policy quantising `components` (default: all four) at one mantissa length."""
        return cls().with_mantissa(mantissa_bits, components, rounding)

    def spec(self, component: str) -> QuantSpec:
        if component not in COMPONENTS:
            raise KeyError(f"Unknown component '{component}'. Must be one of: {list(COMPONENTS)}")
        return getattr(self, component)

    def with_mantissa(self, mantissa_bits: int, components: Optional[Iterable[str]] = None,
                      rounding: Optional[Rounding] = None) -> "QuantPolicy":
        """Copy with the selected components enabled at `mantissa_bits`."""
        selected = list(COMPONENTS) if components is None else list(components)
        updates = {}
        for name in selected:
            current = self.spec(name)
            updates[name] = replace(
                current,
                mantissa_bits=mantissa_bits,
                enabled=True,
                rounding=rounding if rounding is not None else current.rounding,
            )
        return replace(self, **updates)

    def bounds(self) -> Dict[str, float]:
        """{"q_W": ..., "q_G": ..., "q_M": ..., "q_V": ...}"""
        return {f"q_{COMPONENT_SYMBOLS[name]}": self.spec(name).q for name in COMPONENTS}

    @property
    def any_enabled(self) -> bool:
        return any(self.spec(name).enabled for name in COMPONENTS)

    @property
    def q_W(self) -> float:
        return self.weights.q

    @property
    def q_G(self) -> float:
        return self.gradients.q

    @property
    def q_M(self) -> float:
        return self.moment1.q

    @property
    def q_V(self) -> float:
        return self.moment2.q
