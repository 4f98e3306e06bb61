"""Corpus data model for split-antecedent anaphora.

Mentions are token-indexed spans, inclusive at both ends. A mention precedes
another when its (start, end) pair is strictly smaller.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

from corpus.errors import CorpusError, UnknownMentionError


class BridgingRelation(str, Enum):
    ELEMENT_OF = "element-of"
    ELEMENT_OF_INVERSE = "element-of-inverse"
    OTHER = "other"


class QualityTier(str, Enum):
    GOLD = "gold"
    SILVER = "silver"
    NOISY = "noisy"


@dataclass(frozen=True)
class Mention:
    id: str
    start: int
    end: int

    @property
    def width(self) -> int:
        return self.end - self.start + 1

    @property
    def span(self) -> Tuple[int, int]:
        return (self.start, self.end)

    def precedes(self, other: "Mention") -> bool:
        return self.span < other.span


@dataclass(frozen=True)
class BridgingLink:
    anaphor: str
    antecedent: str
    relation: BridgingRelation


@dataclass(frozen=True)
class CrowdAnnotation:
    annotator_id: str
    anaphor_id: str
    antecedents: Tuple[str, ...]


@dataclass
class Document:
    doc_id: str
    tokens: List[str]
    mentions: List[Mention]
    clusters: List[List[str]]
    split_anaphors: Dict[str, List[str]] = field(default_factory=dict)
    bridging: List[BridgingLink] = field(default_factory=list)
    crowd: List[CrowdAnnotation] = field(default_factory=list)

    # Derived lookups. Documents are treated as immutable; use replace() to derive new ones.

    @cached_property
    def mention_index(self) -> Dict[str, Mention]:
        return {m.id: m for m in self.mentions}

    @cached_property
    def ordered_mentions(self) -> List[Mention]:
        return sorted(self.mentions, key=lambda m: (m.start, m.end, m.id))

    @cached_property
    def mention_rank(self) -> Dict[str, int]:
        return {m.id: rank for rank, m in enumerate(self.ordered_mentions)}

    @cached_property
    def cluster_map(self) -> Dict[str, int]:
        """mention id -> cluster index (the gold single-antecedent cluster map)"""
        mapping = {}
        for cluster_id, cluster in enumerate(self.clusters):
            for mention_id in cluster:
                mapping.setdefault(mention_id, cluster_id)
        return mapping

    def mention(self, mention_id: str) -> Mention:
        try:
            return self.mention_index[mention_id]
        except KeyError:
            raise UnknownMentionError(self.doc_id, mention_id) from None

    def cluster_of(self, mention_id: str) -> int:
        try:
            return self.cluster_map[mention_id]
        except KeyError:
            raise UnknownMentionError(self.doc_id, mention_id) from None

    def cluster_members(self, mention_id: str) -> List[str]:
        return self.clusters[self.cluster_of(mention_id)]

    def position(self, mention_id: str) -> Tuple[int, int]:
        return self.mention(mention_id).span

    def precedes(self, first: str, second: str) -> bool:
        return self.mention(first).precedes(self.mention(second))

    def anaphor_count(self) -> int:
        return len(self.split_anaphors)

    def link_count(self) -> int:
        return sum(len(ants) for ants in self.split_anaphors.values())

    def with_split_anaphors(self, split_anaphors: Mapping[str, Sequence[str]], keep_layers: bool = True) -> "Document":
        updated = {a: list(ants) for a, ants in split_anaphors.items()}
        if keep_layers:
            return replace(self, split_anaphors=updated)
        return replace(self, split_anaphors=updated, bridging=[], crowd=[])


@dataclass
class Corpus:
    documents: List[Document]
    name: str = "corpus"
    quality_tier: QualityTier = QualityTier.GOLD

    def __post_init__(self):
        seen = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise CorpusError(f"Duplicate doc_id '{doc.doc_id}' in corpus '{self.name}'")
            seen.add(doc.doc_id)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    @cached_property
    def by_id(self) -> Dict[str, Document]:
        return {doc.doc_id: doc for doc in self.documents}

    def get(self, doc_id: str) -> Document:
        if doc_id not in self.by_id:
            raise CorpusError(f"Document '{doc_id}' not in corpus '{self.name}'")
        return self.by_id[doc_id]

    def anaphor_count(self) -> int:
        return sum(doc.anaphor_count() for doc in self.documents)

    def link_count(self) -> int:
        return sum(doc.link_count() for doc in self.documents)

    def derive(self, documents: Iterable[Document], name: str = None, quality_tier: QualityTier = None) -> "Corpus":
        return Corpus(
            documents=list(documents),
            name=name or self.name,
            quality_tier=quality_tier or self.quality_tier,
        )
