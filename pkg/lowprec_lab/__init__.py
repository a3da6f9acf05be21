"""
lowprec-lab: emulated low-precision training with quantised Adam and Muon,
the convergence bounds that cover them and numerical checks of both.

Weights, gradients and optimiser moments are stored at a reduced mantissa
length (truncation, round-to-nearest-even or stochastic rounding) while all
arithmetic stays in binary64, so the effect of storage precision can be
isolated and compared against the bounds.

Key modules:
    - quant: mantissa quantiser, counter-based random streams, quantisation policy
    - linalg: dense matrix kernel, Jacobi SVD and the matrix sign msign
    - problems: matrix Rosenbrock, synthetic-data MLP, convex quadratic
    - optim: quantised Adam and Muon steps, full-precision references
    - training: master/worker loop, telemetry, mantissa sweeps
    - theory: Adam and Muon bounds, lemma certification, run-vs-bound checks
    - cli_main: argparse command-line interface

See Also:
    - run_config.py: `section.key = value` configuration files and overrides
    - configs/: bundled run configurations and bound parameter files
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
