"""Dense matrix kernel: checked arithmetic, norms, Jacobi SVD and msign."""

from .densemat import (
    Mat,
    OrthoMethod,
    SvdResult,
    add,
    as_mat,
    elementwise_map,
    frob_norm,
    hadamard,
    jacobi_svd,
    matmul,
    msign,
    msign_tolerance,
    nuclear_norm,
    scale,
    spectral_norm,
    symmetric_jacobi_eigvalsh,
    transpose,
)

__all__ = [
    "Mat",
    "OrthoMethod",
    "SvdResult",
    "add",
    "as_mat",
    "elementwise_map",
    "frob_norm",
    "hadamard",
    "jacobi_svd",
    "matmul",
    "msign",
    "msign_tolerance",
    "nuclear_norm",
    "scale",
    "spectral_norm",
    "symmetric_jacobi_eigvalsh",
    "transpose",
]
