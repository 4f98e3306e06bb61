import logging
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Tuple, Union

import torch

from encoder.vocabulary import Vocabulary
from scorer.resolver import SplitAntecedentResolver
from training.config import ModelConfig

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
CHECKPOINT_NAME = "checkpoint.pt"


class CheckpointError(ValueError):
    """Unreadable checkpoint or parameters that do not fit the model"""


class CheckpointManager:
    """Versioned parameter archives: weights, optimizer state, model config, vocabulary, config hash, step"""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)

    @property
    def path(self) -> Path:
        return self.directory / CHECKPOINT_NAME

    def exists(self) -> bool:
        return self.path.exists()

    def save(self, model: SplitAntecedentResolver, model_config: ModelConfig, vocabulary: Vocabulary,
             config_hash: str, stage: str, step: int, optimizer: Optional[torch.optim.Optimizer] = None) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        torch.save({
            "format_version": FORMAT_VERSION,
            "model_state": model.state_dict(),
            "optimizer_state": optimizer.state_dict() if optimizer is not None else None,
            "model_config": asdict(model_config),
            "vocabulary": vocabulary.to_dict(),
            "config_hash": config_hash,
            "stage": stage,
            "step": step,
        }, self.path)
        logger.info("Saved checkpoint %s (stage %s, step %d)", self.path, stage, step)
        return self.path


def read_checkpoint(path: Union[str, Path]) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / CHECKPOINT_NAME
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    archive = torch.load(path, map_location="cpu")
    if not isinstance(archive, dict) or archive.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"{path} is not a version {FORMAT_VERSION} checkpoint")
    return archive


def load_parameters(model: SplitAntecedentResolver, archive: dict):
    try:
        model.load_state_dict(archive["model_state"])
    except RuntimeError as e:
        raise CheckpointError(f"Checkpoint parameters do not fit the model: {e}") from e


def restore_model(path: Union[str, Path]) -> Tuple[SplitAntecedentResolver, ModelConfig, Vocabulary, dict]:
    archive = read_checkpoint(path)
    model_config = ModelConfig.from_dict(archive["model_config"])
    vocabulary = Vocabulary.from_dict(archive["vocabulary"])
    model = SplitAntecedentResolver.from_config(model_config, vocabulary)
    load_parameters(model, archive)
    model.eval()
    return model, model_config, vocabulary, archive
