import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Union

VERSION = "0.1.0"
MANIFEST_NAME = "manifest.json"
SOURCE_PACKAGES = ("corpus", "auxiliary", "encoder", "scorer", "training", "evaluation", "cli")

ROOT = Path(__file__).resolve().parent.parent


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def artifact_version() -> str:
    """Package version plus a short digest of the library sources."""
    digest = hashlib.sha256()
    for package in SOURCE_PACKAGES:
        for path in sorted((ROOT / package).rglob("*.py")):
            digest.update(str(path.relative_to(ROOT)).encode("utf-8"))
            digest.update(path.read_bytes())
    return f"{VERSION}+{digest.hexdigest()[:12]}"


def file_digest(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """What produced an output directory; one manifest.json per directory"""

    command: str
    seed: Optional[int] = None
    config_hash: Optional[str] = None
    inputs: List[str] = field(default_factory=list)
    outputs: Dict[str, str] = field(default_factory=dict)
    options: Dict[str, object] = field(default_factory=dict)
    version: str = field(default_factory=artifact_version)
    started_at: str = field(default_factory=_now)
    finished_at: Optional[str] = None

    def add_output(self, path: Union[str, Path]):
        """Records a produced file with its sha256"""
        path = Path(path)
        self.outputs[path.name] = file_digest(path)

    def write(self, out_dir: Union[str, Path]) -> Path:
        self.finished_at = _now()
        path = Path(out_dir) / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(asdict(self), f, indent=2, default=str)
        return path


def read_manifest(out_dir: Union[str, Path]) -> RunManifest:
    with open(Path(out_dir) / MANIFEST_NAME, "r", encoding="utf-8") as f:
        return RunManifest(**json.load(f))
