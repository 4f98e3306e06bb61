import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from training.strategy import MAIN_STRATEGIES, Strategy

load_dotenv()

DEVICE = os.getenv("SPLITANTE_DEVICE", "cpu")
LOG_LEVEL = os.getenv("SPLITANTE_LOG_LEVEL", "INFO")


class TrainConfigError(ValueError):
    """Invalid or inconsistent training configuration"""


def _default_embeddings() -> List[Dict[str, Any]]:
    return [
        {"kind": "trainable-lookup", "dimension": 64},
        {"kind": "char-conv", "char_dimension": 8, "filter_widths": [3, 4, 5], "filters": 50},
    ]


def _from_dict(cls, data: dict, where: str):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise TrainConfigError(f"Unknown keys in {where}: {sorted(unknown)}. Available: {sorted(known)}")
    return cls(**data)


@dataclass
class ModelConfig:
    embeddings: List[Dict[str, Any]] = field(default_factory=_default_embeddings)
    lstm_hidden: int = 200
    head_hidden: int = 150
    width_dimension: int = 20
    distance_dimension: int = 20
    ffnn_hidden: int = 150
    ffnn_layers: int = 2
    dropout: float = 0.2
    lexical_dropout: float = 0.5
    max_candidates: int = 250
    train_on_all_mentions: bool = True

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return _from_dict(cls, data, "model")


@dataclass
class OptimizerConfig:
    learning_rate: float = 1e-3
    final_learning_rate_ratio: float = 0.0
    max_grad_norm: float = 5.0

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizerConfig":
        return _from_dict(cls, data, "optimizer")


@dataclass
class StageConfig:
    name: str
    strategy: Strategy
    aux: List[str] = field(default_factory=list)
    steps: Optional[int] = None
    alternate: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "StageConfig":
        stage = _from_dict(cls, data, f"stage '{data.get('name', '?')}'")
        try:
            stage.strategy = Strategy(stage.strategy)
        except ValueError:
            raise TrainConfigError(
                f"Unknown strategy '{stage.strategy}' in stage '{stage.name}'. Available: {[s.value for s in Strategy]}"
            ) from None
        stage.aux = list(stage.aux)
        return stage

    @property
    def uses_main(self) -> bool:
        return self.strategy in MAIN_STRATEGIES


@dataclass
class TrainConfig:
    main: str
    stages: List[StageConfig]
    total_steps: Optional[int] = 200000
    seed: int = 0
    dev: Optional[str] = None
    extend_main_anaphors: bool = True
    reset_optimizer: bool = True
    checkpoint_interval: int = 10000
    log_interval: int = 1
    model: ModelConfig = field(default_factory=ModelConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    base_dir: Path = field(default=Path("."), compare=False)

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path = Path(".")) -> "TrainConfig":
        values = dict(data)
        for key in ("main", "stages"):
            if key not in values:
                raise TrainConfigError(f"Training config is missing '{key}'")
        values["stages"] = [StageConfig.from_dict(s) for s in values["stages"]]
        values["model"] = ModelConfig.from_dict(values.get("model", {}))
        values["optimizer"] = OptimizerConfig.from_dict(values.get("optimizer", {}))
        values.pop("name", None)
        values.pop("description", None)
        config = _from_dict(cls, values, "training config")
        config.base_dir = Path(base_dir)
        config.validate()
        return config

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def stage_steps(self) -> List[int]:
        """Steps per stage; stages without an explicit budget split the remainder equally."""
        explicit = sum(s.steps for s in self.stages if s.steps is not None)
        open_stages = [i for i, s in enumerate(self.stages) if s.steps is None]
        if self.total_steps is None:
            if open_stages:
                raise TrainConfigError("Without total_steps every stage needs an explicit 'steps'")
            return [s.steps for s in self.stages]
        remaining = self.total_steps - explicit
        if remaining < 0 or (not open_stages and remaining != 0):
            raise TrainConfigError(
                f"Stage steps sum to {explicit} but total_steps is {self.total_steps}"
            )
        steps = [s.steps for s in self.stages]
        for n, i in enumerate(open_stages):
            share = remaining // len(open_stages)
            steps[i] = share + (remaining - share * len(open_stages) if n == len(open_stages) - 1 else 0)
        return steps

    def validate(self):
        if not self.stages:
            raise TrainConfigError("At least one training stage is required")
        for stage in self.stages:
            if stage.steps is not None and stage.steps < 0:
                raise TrainConfigError(f"Stage '{stage.name}' has negative steps")
            if stage.strategy == Strategy.PRETRAIN and not stage.aux:
                raise TrainConfigError(f"Pre-training stage '{stage.name}' needs auxiliary corpora")
            if stage.strategy == Strategy.MAIN and stage.aux:
                raise TrainConfigError(f"Stage '{stage.name}' uses strategy 'main' but lists auxiliary corpora")
        if not self.stages[-1].uses_main:
            raise TrainConfigError(
                f"The final stage must train on the main corpus (strategy one of {[s.value for s in MAIN_STRATEGIES]})"
            )
        early = [s.name for s in self.stages[:-1] if s.uses_main]
        if early:
            raise TrainConfigError(f"Only the final stage may use the main corpus; offending stages: {early}")
        if sum(self.stage_steps()) <= 0:
            raise TrainConfigError("Training needs a positive number of steps")
        if self.checkpoint_interval <= 0 or self.log_interval <= 0:
            raise TrainConfigError("checkpoint_interval and log_interval must be positive")

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("base_dir")
        data["main"] = str(self.resolve(self.main))
        data["dev"] = str(self.resolve(self.dev)) if self.dev else None
        data["stages"] = [
            {**asdict(s), "strategy": s.strategy.value, "aux": [str(self.resolve(p)) for p in s.aux]}
            for s in self.stages
        ]
        return data

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
