"""
Run configuration interface for lowprec-lab.

Configuration files are flat text, one `section.key = value` per line with
`#` comments. Command-line overrides use the same keys and take precedence
over the file. Every key is checked against the known sections so a typo is
an error rather than a silently ignored setting.
"""

import logging
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union, get_args, get_origin

from .constants import COMPONENTS, DEFAULT_MANTISSA_SWEEP
from .errors import ConfigError
from .optim.base import OptimizerKind
from .optim.hyper import AdamHyper, MuonHyper
from .problems.base import ProblemSpec
from .quant.fpquant import QuantSpec
from .quant.policy import QuantPolicy
from .theory.adam_bound import AdamBoundInput
from .theory.muon_bound import MuonBoundInput
from .training.config import TrainConfig

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("csv", "jsonl")
BOUND_KINDS = ("adam", "muon")

_TRAIN_KEYS = ("T", "B", "seed", "telemetry_every", "batch_size", "workers", "record_wall_time",
               "weight_decay", "tail_window")
# config spelling -> QuantSpec field
_POLICY_KEYS = {"mantissa": "mantissa_bits", "rounding": "rounding", "enabled": "enabled",
                "q_override": "q_override"}
_SECTIONS = {"problem": ProblemSpec, "adam": AdamHyper, "muon": MuonHyper, "aux_adam": AdamHyper}


@dataclass(frozen=True)
class CliConfig:
    """
    Everything one command needs: the training run, where its files go and
    the mantissa sweep.
    """
    train: TrainConfig = field(default_factory=TrainConfig)
    output_dir: str = "out"
    format: str = "csv"
    mantissas: Tuple[int, ...] = DEFAULT_MANTISSA_SWEEP
    sweep_components: Optional[Tuple[str, ...]] = None
    sweep_workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.format not in OUTPUT_FORMATS:
            raise ValueError(f"Invalid format '{self.format}'. Must be one of: {list(OUTPUT_FORMATS)}")
        if not self.mantissas:
            raise ValueError("sweep.mantissas must list at least one mantissa length")
        if min(self.mantissas) < 0:
            raise ValueError(f"mantissa lengths must be >= 0, got {list(self.mantissas)}")
        if self.sweep_components is not None:
            unknown = [c for c in self.sweep_components if c not in COMPONENTS]
            if unknown:
                raise ValueError(f"Unknown sweep components {unknown}. Must be among: {list(COMPONENTS)}")
        if self.sweep_workers < 1:
            raise ValueError(f"sweep.max_workers must be >= 1, got {self.sweep_workers}")


@dataclass(frozen=True)
class BoundParams:
    """A bound evaluation request: which bound, its input and an optional T grid."""
    kind: str
    input: Union[AdamBoundInput, MuonBoundInput]
    grid: Tuple[int, ...] = ()


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def convert(tp: Any, text: str) -> Any:
    """Convert config text to the annotated field type."""
    text = text.strip()
    origin = get_origin(tp)
    if origin is Union:
        inner = [a for a in get_args(tp) if a is not type(None)][0]
        return None if text.lower() in ("", "none") else convert(inner, text)
    if origin in (tuple, list):
        elem = get_args(tp)[0]
        return tuple(convert(elem, part) for part in text.split(",") if part.strip())
    if tp is bool:
        return _parse_bool(text)
    if tp is int:
        return int(text)
    if tp is float:
        return float(text)
    if isinstance(tp, type) and issubclass(tp, Enum):
        return tp(text)
    return text


def _field_types(cls) -> Dict[str, Any]:
    return {f.name: f.type for f in fields(cls)}


class RunConfigLoader:
    """
    Run configuration loader and factory.

    Loads `section.key = value` files, merges command-line overrides over
    them and builds validated CliConfig / BoundParams objects. Every
    failure surfaces as ConfigError.
    """

    def __init__(self):
        self.default_config = CliConfig()

    def parse_text(self, text: str, source: str = "<text>") -> Dict[str, str]:
        values: Dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{lineno}: expected 'section.key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ConfigError(f"{source}:{lineno}: missing key")
            values[key] = value
        return values

    def load_from_file(self, config_path: Union[str, Path]) -> Dict[str, str]:
        """
        Raises:
            ConfigError: If the file doesn't exist, can't be read or is malformed
        """
        config_path = Path(config_path)
        if not config_path.is_file():
            raise ConfigError(f"Configuration file not found: {config_path}")
        try:
            text = config_path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Failed to read configuration file {config_path}: {e}") from None
        values = self.parse_text(text, str(config_path))
        logger.debug("Loaded %d keys from %s", len(values), config_path)
        return values

    def parse_overrides(self, overrides: Iterable[str]) -> Dict[str, str]:
        """`key=value` strings as given on the command line."""
        values: Dict[str, str] = {}
        for item in overrides:
            if "=" not in item:
                raise ConfigError(f"Override must look like key=value, got {item!r}")
            key, value = item.split("=", 1)
            values[key.strip()] = value.strip()
        return values

    def merge(self, base: Dict[str, str], overrides: Dict[str, str]) -> Dict[str, str]:
        merged = dict(base)
        merged.update(overrides)
        return merged

    def _section_kwargs(self, values: Dict[str, str], section: str, cls) -> Dict[str, Any]:
        types = _field_types(cls)
        return {key[len(section) + 1:]: convert(types[key[len(section) + 1:]], text)
                for key, text in values.items() if key.startswith(section + ".")}

    def _build_policy(self, values: Dict[str, str]) -> QuantPolicy:
        types = _field_types(QuantSpec)
        settings: Dict[str, Dict[str, str]] = {name: {} for name in COMPONENTS}
        # component-specific keys win over policy.all.*
        for scope in ("all",) + COMPONENTS:
            for key, text in values.items():
                if key.startswith(f"policy.{scope}."):
                    targets = COMPONENTS if scope == "all" else (scope,)
                    for name in targets:
                        settings[name][key.rsplit(".", 1)[1]] = text
        specs = {}
        for name in COMPONENTS:
            given = settings[name]
            kwargs = {_POLICY_KEYS[k]: convert(types[_POLICY_KEYS[k]], v) for k, v in given.items()}
            kwargs.setdefault("enabled", "mantissa" in given)
            specs[name] = QuantSpec(**kwargs)
        return QuantPolicy(**specs)

    def _check_keys(self, values: Dict[str, str]) -> None:
        unknown = [key for key in values if not self._known_key(key)]
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {unknown}")

    @staticmethod
    def _known_key(key: str) -> bool:
        section, _, rest = key.partition(".")
        if section in _SECTIONS:
            return rest in _field_types(_SECTIONS[section])
        if section == "policy":
            scope, _, name = rest.partition(".")
            return scope in ("all",) + COMPONENTS and name in _POLICY_KEYS
        if section == "train":
            return rest in _TRAIN_KEYS
        return key in ("optimizer.kind", "output.dir", "output.format", "sweep.mantissas",
                       "sweep.components", "sweep.max_workers")

    def build(self, values: Dict[str, str]) -> CliConfig:
        """
        Build a CliConfig from merged key/value text.

        Raises:
            ConfigError: On unknown keys, unparsable values or invalid settings
        """
        self._check_keys(values)
        try:
            train_types = _field_types(TrainConfig)
            train_kwargs = {key: convert(train_types[key], values[f"train.{key}"])
                            for key in _TRAIN_KEYS if f"train.{key}" in values}
            aux = self._section_kwargs(values, "aux_adam", AdamHyper)
            train = TrainConfig(
                problem=ProblemSpec(**self._section_kwargs(values, "problem", ProblemSpec)),
                optimizer=OptimizerKind(values.get("optimizer.kind", OptimizerKind.ADAM.value)),
                adam=AdamHyper(**self._section_kwargs(values, "adam", AdamHyper)),
                muon=MuonHyper(**self._section_kwargs(values, "muon", MuonHyper)),
                aux_adam=AdamHyper(**aux) if aux else None,
                policy=self._build_policy(values),
                **train_kwargs,
            )
            components = values.get("sweep.components")
            return CliConfig(
                train=train,
                output_dir=values.get("output.dir", self.default_config.output_dir),
                format=values.get("output.format", self.default_config.format),
                mantissas=(convert(Tuple[int, ...], values["sweep.mantissas"])
                           if "sweep.mantissas" in values else self.default_config.mantissas),
                sweep_components=(convert(Tuple[str, ...], components)
                                  if components and components.lower() != "all" else None),
                sweep_workers=int(values.get("sweep.max_workers", self.default_config.sweep_workers)),
            )
        except ConfigError:
            raise
        except (ValueError, TypeError) as e:
            raise ConfigError(str(e)) from e

    def load(self, config_path: Optional[Union[str, Path]] = None, overrides: Sequence[str] = (),
             seed: Optional[int] = None) -> CliConfig:
        """
        Complete workflow: file, then overrides, then an explicit seed.
        """
        base = self.load_from_file(config_path) if config_path is not None else {}
        values = self.merge(base, self.parse_overrides(overrides))
        if seed is not None:
            values["train.seed"] = str(seed)
        return self.build(values)

    def build_bound_params(self, values: Dict[str, str]) -> BoundParams:
        """
        Keys: bound.kind (adam or muon), bound.<input field>, grid.T.

        Raises:
            ConfigError: On unknown keys or invalid bound inputs
        """
        kind = values.get("bound.kind", "adam")
        if kind not in BOUND_KINDS:
            raise ConfigError(f"Invalid bound.kind '{kind}'. Must be one of: {list(BOUND_KINDS)}")
        cls = AdamBoundInput if kind == "adam" else MuonBoundInput
        types = _field_types(cls)
        unknown = [key for key in values
                   if key not in ("bound.kind", "grid.T")
                   and not (key.startswith("bound.") and key[len("bound."):] in types)]
        if unknown:
            raise ConfigError(f"Unknown {kind} bound keys: {unknown}")
        try:
            bound_input = cls(**self._section_kwargs({k: v for k, v in values.items() if k != "bound.kind"},
                                                     "bound", cls))
            grid = convert(Tuple[int, ...], values["grid.T"]) if "grid.T" in values else ()
        except (ValueError, TypeError) as e:
            raise ConfigError(str(e)) from e
        return BoundParams(kind=kind, input=bound_input, grid=grid)

    def load_bound_params(self, params_path: Union[str, Path], overrides: Sequence[str] = ()) -> BoundParams:
        values = self.merge(self.load_from_file(params_path), self.parse_overrides(overrides))
        return self.build_bound_params(values)


_default_loader = RunConfigLoader()


def load_run_config(config_path: Optional[Union[str, Path]] = None, overrides: Sequence[str] = (),
                    seed: Optional[int] = None) -> CliConfig:
    return _default_loader.load(config_path, overrides, seed)


def load_bound_params(params_path: Union[str, Path], overrides: Sequence[str] = ()) -> BoundParams:
    return _default_loader.load_bound_params(params_path, overrides)


def dotted_overrides(extra: List[str]) -> List[str]:
    """
    Turn leftover `--section.key=value` / `--section.key value` arguments
    into `section.key=value` overrides.

    Raises:
        ConfigError: On an argument that is not a dotted option
    """
    out: List[str] = []
    i = 0
    while i < len(extra):
        arg = extra[i]
        if not arg.startswith("--") or "." not in arg.split("=", 1)[0]:
            raise ConfigError(f"Unrecognised argument {arg!r}")
        if "=" in arg:
            out.append(arg[2:])
            i += 1
        elif i + 1 < len(extra):
            out.append(f"{arg[2:]}={extra[i + 1]}")
            i += 2
        else:
            raise ConfigError(f"Missing value for {arg}")
    return out
