import json
import logging
from pathlib import Path
from typing import Dict, List, Union

from corpus.synthetic import SyntheticConfig
from training.config import TrainConfig, TrainConfigError

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).parent / "configs"


def read_json(path: Union[str, Path]) -> dict:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise TrainConfigError(f"Error parsing config file {path}: {e}") from e


class ConfigLoader:
    """Loads shipped or user-supplied JSON configs"""

    def __init__(self, config_dir: Union[str, Path] = CONFIG_DIR):
        self.config_dir = Path(config_dir)

    def list_configs(self) -> List[str]:
        return sorted(p.stem for p in self.config_dir.glob("*.json"))

    def get_config_info(self) -> Dict[str, str]:
        """config name -> description"""
        return {name: read_json(self.config_dir / f"{name}.json").get("description", "") for name in self.list_configs()}

    def _path(self, name_or_path: Union[str, Path]) -> Path:
        path = Path(name_or_path)
        if path.suffix == ".json" or path.exists():
            return path
        if name_or_path not in self.list_configs():
            raise TrainConfigError(f"Config '{name_or_path}' not found. Available: {self.list_configs()}")
        return self.config_dir / f"{name_or_path}.json"

    def load_train_config(self, name_or_path: Union[str, Path]) -> TrainConfig:
        path = self._path(name_or_path)
        config = TrainConfig.from_dict(read_json(path), base_dir=path.parent)
        logger.info("Loaded training config %s (hash %s)", path, config.config_hash[:12])
        return config

    def load_synthetic_config(self, name_or_path: Union[str, Path]) -> SyntheticConfig:
        data = dict(read_json(self._path(name_or_path)))
        data.pop("description", None)
        return SyntheticConfig.from_dict(data)
