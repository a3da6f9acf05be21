"""Shared constants for lowprec-lab."""

# Quantised components in canonical order. The policy, the telemetry columns
# and the bound reports all index components through this tuple.
COMPONENTS = ("weights", "gradients", "moment1", "moment2")

# Short symbols used in telemetry column names and bound inputs (q_W, q_G, ...).
COMPONENT_SYMBOLS = {
    "weights": "W",
    "gradients": "G",
    "moment1": "M",
    "moment2": "V",
}

ROUNDING_MODES = ("truncate", "nearest_even", "stochastic")

# binary64 host format
HOST_MANTISSA_BITS = 52
HOST_EXPONENT_BITS = 11

# Mantissa lengths of the reference sweep
DEFAULT_MANTISSA_SWEEP = (4, 8, 16, 24, 32, 52)

# Quintic Newton-Schulz coefficients (a, b, c)
NS_COEFFS = (3.4445, -4.7750, 2.0315)

# Relative cut below which singular directions are dropped from msign
MSIGN_RANK_TOL = 1e-12

TAIL_WINDOW = 100

CSV_HEADER = (
    "t",
    "loss",
    "grad_norm_F",
    "qerr_W",
    "qerr_G",
    "qerr_M",
    "qerr_V",
    "update_norm_F",
    "wall_ns",
)

SWEEP_SUMMARY_HEADER = (
    "M",
    "tail_grad_norm",
    "mean_qerr_W",
    "mean_qerr_G",
    "mean_qerr_M",
    "mean_qerr_V",
)

DATASET_MAGIC = b"LPOPTDS1"
STATE_MAGIC = b"LPOPTST1"

# Process exit codes of the command-line front end
EXIT_OK = 0
EXIT_LEMMA_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_PRECONDITION = 4
