import json
import logging
import os
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from corpus.model import Corpus, Document
from encoder.vocabulary import Vocabulary

logger = logging.getLogger(__name__)


class EmbeddingDimensionError(ValueError):
    """A provider produced vectors of the wrong size"""


class EmbeddingCoverageError(ValueError):
    """Precomputed vectors do not cover every token of a document"""


class EmbeddingProvider(nn.Module, ABC):
    """Abstract base class for per-token embedding sources"""

    kind: str = ""

    def __init__(self, dimension: int):
        super().__init__()
        self.dimension = dimension

    @abstractmethod
    def embed(self, doc: Document) -> torch.Tensor:
        """Return a [len(doc.tokens), dimension] tensor"""

    def is_available(self) -> bool:
        return True

    def get_name(self) -> str:
        return f"{self.kind} ({self.dimension})"

    def _device(self) -> torch.device:
        for tensor in list(self.parameters()) + list(self.buffers()):
            return tensor.device
        return torch.device("cpu")


class TrainableLookupProvider(EmbeddingProvider):
    """Word embeddings learned from scratch; unknown words share row 0"""

    kind = "trainable-lookup"

    def __init__(self, vocabulary: Vocabulary, dimension: int = 64):
        super().__init__(dimension)
        self.vocabulary = vocabulary
        self.embedding = nn.Embedding(len(vocabulary), dimension)

    def embed(self, doc: Document) -> torch.Tensor:
        ids = torch.tensor(self.vocabulary.word_ids(doc.tokens), dtype=torch.long, device=self._device())
        return self.embedding(ids)


class StaticLookupProvider(EmbeddingProvider):
    """Frozen pretrained word vectors read from a GloVe-style text file"""

    kind = "static-lookup"

    def __init__(self, vocabulary: Vocabulary, path: str, dimension: int):
        super().__init__(dimension)
        self.vocabulary = vocabulary
        self.path = path
        table = np.zeros((len(vocabulary), dimension), dtype=np.float32)
        known = np.zeros(len(vocabulary), dtype=bool)
        with open(path, "r", encoding="utf-8") as f:
            for line_number, line in enumerate(f, 1):
                parts = line.rstrip().split(" ")
                if len(parts) < 2:
                    continue
                word, values = parts[0], parts[1:]
                if len(values) != dimension:
                    raise EmbeddingDimensionError(
                        f"{path}:{line_number}: vector for '{word}' has {len(values)} values, expected {dimension}"
                    )
                index = vocabulary.word_id(word)
                if index:
                    table[index] = np.asarray(values, dtype=np.float32)
                    known[index] = True
        self.register_buffer("table", torch.from_numpy(table))
        self.register_buffer("known", torch.from_numpy(known))
        self.unknown = nn.Parameter(torch.zeros(dimension))
        logger.info("Loaded %d/%d static vectors from %s", int(known.sum()), len(vocabulary), path)

    def embed(self, doc: Document) -> torch.Tensor:
        ids = torch.tensor(self.vocabulary.word_ids(doc.tokens), dtype=torch.long, device=self._device())
        vectors = self.table[ids]
        return torch.where(self.known[ids].unsqueeze(-1), vectors, self.unknown.expand_as(vectors))

    def is_available(self) -> bool:
        return os.path.exists(self.path)


class PrecomputedContextualProvider(EmbeddingProvider):
    """Frozen contextual vectors consumed from a sidecar file.

    ``.npz``: one [T, d] array per doc_id. ``.jsonl``: one
    {"doc_id", "token", "vector"} object per token.
    """

    kind = "precomputed-contextual"

    def __init__(self, path: str, dimension: int):
        super().__init__(dimension)
        self.path = path
        self._vectors: Dict[str, torch.Tensor] = self._load(Path(path))

    def _load(self, path: Path) -> Dict[str, torch.Tensor]:
        if path.suffix == ".npz":
            with np.load(path) as archive:
                arrays = {doc_id: np.asarray(archive[doc_id], dtype=np.float32) for doc_id in archive.files}
        else:
            rows: Dict[str, Dict[int, List[float]]] = {}
            with open(path, "r", encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        item = json.loads(line)
                        rows.setdefault(str(item["doc_id"]), {})[int(item["token"])] = item["vector"]
            arrays = {}
            for doc_id, by_token in rows.items():
                if sorted(by_token) != list(range(len(by_token))):
                    raise EmbeddingCoverageError(f"{path}: token indices of '{doc_id}' are not contiguous from 0")
                arrays[doc_id] = np.asarray([by_token[i] for i in range(len(by_token))], dtype=np.float32)
        for doc_id, array in arrays.items():
            if array.ndim != 2 or array.shape[1] != self.dimension:
                raise EmbeddingDimensionError(
                    f"{path}: vectors for '{doc_id}' have shape {array.shape}, expected [T, {self.dimension}]"
                )
        return {doc_id: torch.from_numpy(array) for doc_id, array in arrays.items()}

    def check_coverage(self, corpus: Corpus):
        for doc in corpus:
            self._lookup(doc)

    def _lookup(self, doc: Document) -> torch.Tensor:
        vectors = self._vectors.get(doc.doc_id)
        if vectors is None:
            raise EmbeddingCoverageError(f"No precomputed vectors for document '{doc.doc_id}' in {self.path}")
        if vectors.shape[0] != len(doc.tokens):
            raise EmbeddingCoverageError(
                f"Document '{doc.doc_id}' has {len(doc.tokens)} tokens but {vectors.shape[0]} precomputed vectors"
            )
        return vectors

    def embed(self, doc: Document) -> torch.Tensor:
        return self._lookup(doc).to(self._device())

    def is_available(self) -> bool:
        return os.path.exists(self.path)


class CharConvProvider(EmbeddingProvider):
    """Character embeddings max-pooled over convolutions of several widths"""

    kind = "char-conv"

    def __init__(self, vocabulary: Vocabulary, char_dimension: int = 8,
                 filter_widths: Sequence[int] = (3, 4, 5), filters: int = 50):
        super().__init__(filters * len(filter_widths))
        self.vocabulary = vocabulary
        self.filter_widths = tuple(filter_widths)
        self.char_embedding = nn.Embedding(vocabulary.char_count, char_dimension)
        self.convolutions = nn.ModuleList(nn.Conv1d(char_dimension, filters, w) for w in self.filter_widths)

    def embed(self, doc: Document) -> torch.Tensor:
        longest = max([len(t) for t in doc.tokens] + [max(self.filter_widths)])
        ids = torch.zeros((len(doc.tokens), longest), dtype=torch.long, device=self._device())
        for i, token in enumerate(doc.tokens):
            if token:
                ids[i, :len(token)] = torch.tensor([self.vocabulary.char_id(c) for c in token], dtype=torch.long)
        # [T, char_dim, L]
        chars = self.char_embedding(ids).transpose(1, 2)
        pooled = [F.relu(conv(chars)).max(dim=-1).values for conv in self.convolutions]
        return torch.cat(pooled, dim=-1)


PROVIDERS = {
    TrainableLookupProvider.kind: TrainableLookupProvider,
    StaticLookupProvider.kind: StaticLookupProvider,
    PrecomputedContextualProvider.kind: PrecomputedContextualProvider,
    CharConvProvider.kind: CharConvProvider,
}


def build_providers(specs: Sequence[Dict[str, Any]], vocabulary: Vocabulary) -> List[EmbeddingProvider]:
    """Instantiate providers from config entries such as {"kind": "char-conv", "filters": 50}"""
    if not specs:
        raise ValueError("At least one embedding provider is required")
    providers = []
    for spec in specs:
        options = dict(spec)
        kind = options.pop("kind", None)
        if kind not in PROVIDERS:
            raise ValueError(f"Unknown embedding provider '{kind}'. Available: {sorted(PROVIDERS)}")
        if kind != PrecomputedContextualProvider.kind:
            options["vocabulary"] = vocabulary
        provider = PROVIDERS[kind](**options)
        if not provider.is_available():
            raise FileNotFoundError(f"Embedding provider {provider.get_name()} is not available: {options.get('path')}")
        providers.append(provider)
    return providers
