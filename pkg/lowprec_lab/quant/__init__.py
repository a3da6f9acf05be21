"""
Floating-point quantisation emulator.

Key modules:
    - fpquant: QuantSpec, quantize_scalar / quantize_mat, measured relative error
    - rng: counter-based RngStream
    - policy: QuantPolicy over weights, gradients and the two moments
"""

from .fpquant import (
    QuantSpec,
    Rounding,
    bracket,
    measure_rel_error,
    measure_rel_error_blocks,
    quantize_mat,
    quantize_scalar,
)
from .policy import QuantPolicy
from .rng import RngStream, component_stream

__all__ = [
    "QuantSpec",
    "Rounding",
    "bracket",
    "measure_rel_error",
    "measure_rel_error_blocks",
    "quantize_mat",
    "quantize_scalar",
    "QuantPolicy",
    "RngStream",
    "component_stream",
]
