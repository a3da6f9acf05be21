"""Training configuration."""

from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Iterable, Optional

from ..constants import TAIL_WINDOW
from ..optim.base import OptimizerKind
from ..optim.hyper import AdamHyper, MuonHyper
from ..problems.base import ProblemKind, ProblemSpec
from ..quant.policy import QuantPolicy


@dataclass(frozen=True)
class TrainConfig:
    """
    One quantised training run.

    B is the number of simulated workers contributing a gradient each
    iteration; `workers` is the size of the thread pool evaluating them
    (1 evaluates in the calling thread). aux_adam trains the bias vectors of
    the MLP when the optimiser is Muon and defaults to Adam with the Muon
    step size. weight_decay is a decoupled shrink applied by the loop
    (0 disables it).
    """
    problem: ProblemSpec = field(default_factory=ProblemSpec)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    adam: AdamHyper = field(default_factory=AdamHyper)
    muon: MuonHyper = field(default_factory=MuonHyper)
    aux_adam: Optional[AdamHyper] = None
    policy: QuantPolicy = field(default_factory=QuantPolicy)
    T: int = 10_000
    B: int = 1
    seed: int = 0
    telemetry_every: int = 1
    batch_size: int = 1
    workers: int = 1
    record_wall_time: bool = False
    weight_decay: float = 0.0
    tail_window: int = TAIL_WINDOW

    def __post_init__(self):
        object.__setattr__(self, "optimizer", OptimizerKind(self.optimizer))
        self.validate()

    def validate(self) -> None:
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.B < 1:
            raise ValueError(f"B must be >= 1, got {self.B}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.telemetry_every < 1:
            raise ValueError(f"telemetry_every must be >= 1, got {self.telemetry_every}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.weight_decay < 0.0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.tail_window < 1:
            raise ValueError(f"tail_window must be >= 1, got {self.tail_window}")

    @property
    def effective_aux_adam(self) -> Optional[AdamHyper]:
        """Auxiliary Adam for MLP biases under Muon, None when unused."""
        if self.optimizer is not OptimizerKind.MUON or self.problem.kind is not ProblemKind.SYNTHETIC_MLP:
            return None
        return self.aux_adam if self.aux_adam is not None else AdamHyper(eta=self.muon.eta)

    @property
    def eta(self) -> float:
        return self.adam.eta if self.optimizer is OptimizerKind.ADAM else self.muon.eta

    def with_mantissa(self, mantissa_bits: int, components: Optional[Iterable[str]] = None) -> "TrainConfig":
        """Copy whose policy quantises `components` (default all) at `mantissa_bits`."""
        return replace(self, policy=self.policy.with_mantissa(mantissa_bits, components))

    def echo(self) -> Dict[str, Any]:
        """Flat, sorted key -> scalar map of every setting."""
        flat: Dict[str, Any] = {}

        def put(prefix: str, value: Any) -> None:
            if isinstance(value, dict):
                for k, v in value.items():
                    put(f"{prefix}.{k}" if prefix else k, v)
            elif isinstance(value, (list, tuple)):
                flat[prefix] = ",".join(str(_plain(v)) for v in value)
            else:
                flat[prefix] = _plain(value)

        put("", asdict(self))
        return dict(sorted(flat.items()))


def _plain(value: Any) -> Any:
    return value.value if hasattr(value, "value") and not isinstance(value, (int, float)) else value
