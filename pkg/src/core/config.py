"""Experiment configuration: one frozen record per run, mirroring the CLI flags."""

import json
import logging
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional, Tuple

from src.core.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

COMMANDS = (
    "schedule-report",
    "tree-gen",
    "tree-prune",
    "ps-sample",
    "ps-name",
    "encode",
    "decode",
    "roundtrip",
    "bounds-table",
    "mc",
    "find-n0",
    "parity-demo",
    "oracle-use",
)

SEED_LIMIT = 1 << 64
DEFAULT_MC_TRIALS = 1000


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on.

    Unset sources fall back to defaults: the full tree at l_N, the all-zero
    name, and the global seed for the tree and system samplers.
    """

    command: str
    # schedule
    schedule: str = "exponential"
    n_max: int = 4
    levels: Optional[Tuple[int, ...]] = None
    densities: Optional[Tuple[str, ...]] = None
    scale: Optional[int] = None
    naming_slack: int = 2
    # tree source
    tree: Optional[str] = None
    tree_budget: Optional[str] = None
    tree_seed: Optional[int] = None
    prune: bool = False
    # system source
    system: Optional[str] = None
    name: Optional[str] = None
    system_seed: Optional[int] = None
    height: Optional[int] = None
    # coding
    codec: str = "partition"
    z: Optional[str] = None
    y: Optional[str] = None
    sigma0: str = ""
    tau0: str = ""
    auto_start: bool = False
    # measurement
    level: int = 0
    trials: Optional[int] = None
    seed: int = 0
    workers: int = 1
    # outputs
    out: Optional[str] = None
    csv: Optional[str] = None
    save: Optional[str] = None
    verbose: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInputError(
                f"Unknown command '{self.command}' (expected one of {', '.join(COMMANDS)})"
            )
        for name in ("seed", "tree_seed", "system_seed"):
            value = getattr(self, name)
            if value is not None and not 0 <= value < SEED_LIMIT:
                raise InvalidInputError(f"{name} must be a 64-bit unsigned integer, got {value}")
        if self.trials is not None and self.trials < 1:
            raise InvalidInputError(f"trials must be at least 1, got {self.trials}")
        if self.workers < 1:
            raise InvalidInputError(f"workers must be at least 1, got {self.workers}")
        if self.codec not in ("partition", "kg"):
            raise InvalidInputError(f"Unknown codec '{self.codec}'")

    @property
    def effective_trials(self) -> int:
        """`mc` samples by default; `bounds-table` only when --trials is given."""
        if self.trials is not None:
            return self.trials
        return DEFAULT_MC_TRIALS if self.command == "mc" else 0

    @property
    def effective_tree_seed(self) -> int:
        return self.seed if self.tree_seed is None else self.tree_seed

    @property
    def effective_system_seed(self) -> int:
        return self.seed if self.system_seed is None else self.system_seed

    def to_dict(self) -> Dict[str, Any]:
        """Canonical form: sorted keys, tuples as lists."""
        data = asdict(self)
        for key in ("levels", "densities"):
            if data[key] is not None:
                data[key] = list(data[key])
        return dict(sorted(data.items()))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidInputError(f"Unknown configuration field(s): {', '.join(unknown)}")
        values = dict(data)
        try:
            if values.get("levels") is not None:
                values["levels"] = tuple(int(v) for v in values["levels"])
            if values.get("densities") is not None:
                values["densities"] = tuple(str(q) for q in values["densities"])
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"Invalid levels or densities in configuration: {str(e)}")
        try:
            return cls(**values)
        except TypeError as e:
            raise InvalidInputError(f"Invalid configuration: {str(e)}")

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        """Load the JSON form written by to_dict."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidInputError(f"Config file {path} is not valid JSON: {str(e)}")
        if not isinstance(data, dict):
            raise InvalidInputError(f"Config file {path} must hold a JSON object")
        logger.info(f"Loaded configuration for '{data.get('command')}' from {path}")
        return cls.from_dict(data)

    @classmethod
    def from_args(cls, args: Any) -> "ExperimentConfig":
        """Build from an argparse namespace; a --config file supplies the base values.

        Parser defaults are None, so only flags given on the command line are
        present and override the file.
        """
        explicit = {
            f.name: getattr(args, f.name)
            for f in fields(cls)
            if hasattr(args, f.name) and getattr(args, f.name) is not None
        }
        config_path = getattr(args, "config", None)
        if not config_path:
            return cls.from_dict(explicit)
        base = cls.from_file(config_path)
        if base.command != explicit["command"]:
            raise InvalidInputError(
                f"Config file is for '{base.command}', not '{explicit['command']}'"
            )
        overrides = {key: value for key, value in explicit.items() if key != "command"}
        return replace(base, **overrides)
