"""Seeded synthetic corpora with a learnable split-antecedent signal.

Every split anaphor starts with a marker token ``mk<c>`` and ends with
``they``; each of its antecedents starts with the same marker. Mentions of one
cluster share their final entity token, so single-antecedent coreference is
learnable too.
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List

import numpy as np

from corpus.errors import InfeasibleConfigError
from corpus.model import BridgingLink, BridgingRelation, Corpus, CrowdAnnotation, Document, Mention, QualityTier
from corpus.validation import validate_document

logger = logging.getLogger(__name__)

MENTION_WIDTHS = (2, 3)
ANAPHOR_TOKEN = "they"


@dataclass
class SyntheticConfig:
    num_documents: int = 50
    tokens_per_document: int = 200
    mention_density: float = 0.25
    split_anaphor_rate: float = 0.1
    antecedent_counts: Dict[int, float] = field(default_factory=lambda: {2: 0.8, 3: 0.2})
    vocabulary_size: int = 200
    entity_vocabulary_size: int = 60
    marker_count: int = 8
    coreference_rate: float = 0.3
    bridging_rate: float = 0.05
    annotators: int = 3
    crowd_accuracy: float = 0.7
    crowd_false_positive_rate: float = 0.02
    seed: int = 13
    name: str = "synthetic"

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InfeasibleConfigError(
                f"Unknown synthetic config keys: {sorted(unknown)}. Available: {sorted(cls.__dataclass_fields__)}"
            )
        values = dict(data)
        if "antecedent_counts" in values:
            values["antecedent_counts"] = {int(k): float(v) for k, v in values["antecedent_counts"].items()}
        return cls(**values)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["antecedent_counts"] = {str(k): v for k, v in self.antecedent_counts.items()}
        return data

    @property
    def mentions_per_document(self) -> int:
        return int(round(self.tokens_per_document * self.mention_density))

    def check(self):
        if self.num_documents < 0:
            raise InfeasibleConfigError("num_documents must be non-negative")
        for name in ("mention_density", "split_anaphor_rate", "coreference_rate", "bridging_rate",
                     "crowd_accuracy", "crowd_false_positive_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InfeasibleConfigError(f"{name} must lie in [0, 1], got {value}")
        if not self.antecedent_counts or any(k not in range(2, 6) for k in self.antecedent_counts):
            raise InfeasibleConfigError(
                f"antecedent_counts must be a distribution over 2..5, got {self.antecedent_counts}"
            )
        if sum(self.antecedent_counts.values()) <= 0 or any(v < 0 for v in self.antecedent_counts.values()):
            raise InfeasibleConfigError("antecedent_counts weights must be non-negative with a positive sum")
        n = self.mentions_per_document
        needed = n * (max(MENTION_WIDTHS) + 1)
        if n < 1 or needed > self.tokens_per_document:
            raise InfeasibleConfigError(
                f"Cannot place {n} mentions in {self.tokens_per_document} tokens "
                f"(needs at least {needed} tokens and one mention)"
            )
        if self.marker_count < 1 or self.vocabulary_size < 1 or self.entity_vocabulary_size < 1:
            raise InfeasibleConfigError("vocabulary sizes and marker_count must be positive")


def generate_synthetic(config: SyntheticConfig) -> Corpus:
    config.check()
    rng = np.random.default_rng(config.seed)
    documents = [_generate_document(f"{config.name}-{i:04d}", config, rng) for i in range(config.num_documents)]
    corpus = Corpus(documents=documents, name=config.name, quality_tier=QualityTier.GOLD)
    logger.info(
        "Generated %d synthetic documents with %d split anaphors (seed %d)",
        len(corpus), corpus.anaphor_count(), config.seed,
    )
    return corpus


def _layout(config: SyntheticConfig, rng: np.random.Generator) -> List[Mention]:
    n = config.mentions_per_document
    widths = rng.choice(MENTION_WIDTHS, size=n, p=[0.7, 0.3])
    slack = config.tokens_per_document - int(widths.sum()) - n
    extra = rng.multinomial(slack, [1.0 / (n + 1)] * (n + 1))
    mentions, cursor = [], 0
    for i in range(n):
        start = cursor + 1 + int(extra[i])
        end = start + int(widths[i]) - 1
        mentions.append(Mention(id=f"m{i}", start=start, end=end))
        cursor = end + 1
    return mentions


def _generate_document(doc_id: str, config: SyntheticConfig, rng: np.random.Generator) -> Document:
    mentions = _layout(config, rng)
    tokens = [f"w{rng.integers(config.vocabulary_size)}" for _ in range(config.tokens_per_document)]
    counts = sorted(config.antecedent_counts)
    weights = np.array([config.antecedent_counts[k] for k in counts], dtype=float)
    weights /= weights.sum()
    max_count = max(counts)

    clusters: List[List[str]] = []
    cluster_of: Dict[str, int] = {}
    cluster_marker: Dict[int, str] = {}
    cluster_entity: Dict[int, str] = {}
    free: List[str] = []  # regular mentions not yet used as antecedents
    split_anaphors: Dict[str, List[str]] = {}
    by_id = {m.id: m for m in mentions}

    def open_cluster(mention_id: str) -> int:
        clusters.append([mention_id])
        cluster_id = len(clusters) - 1
        cluster_of[mention_id] = cluster_id
        cluster_entity[cluster_id] = f"e{rng.integers(config.entity_vocabulary_size)}"
        return cluster_id

    for mention in mentions:
        free_clusters = sorted({cluster_of[m] for m in free})
        if len(free_clusters) >= max_count and rng.random() < config.split_anaphor_rate:
            k = int(rng.choice(counts, p=weights))
            chosen = rng.choice(free_clusters, size=k, replace=False)
            antecedents = []
            for cluster_id in sorted(int(c) for c in chosen):
                options = [m for m in free if cluster_of[m] == cluster_id]
                antecedents.append(options[int(rng.integers(len(options)))])
            marker = f"mk{len(split_anaphors) % config.marker_count}"
            for antecedent in antecedents:
                free.remove(antecedent)
                tokens[by_id[antecedent].start] = marker
            antecedents.sort(key=lambda m: by_id[m].span)
            split_anaphors[mention.id] = antecedents
            cluster_marker[open_cluster(mention.id)] = marker
            tokens[mention.start] = marker
            tokens[mention.end] = ANAPHOR_TOKEN
            continue

        if clusters and rng.random() < config.coreference_rate:
            cluster_id = int(rng.integers(len(clusters)))
            clusters[cluster_id].append(mention.id)
            cluster_of[mention.id] = cluster_id
        else:
            cluster_id = open_cluster(mention.id)
        if cluster_id in cluster_marker:
            tokens[mention.start] = cluster_marker[cluster_id]
            tokens[mention.end] = ANAPHOR_TOKEN
        else:
            tokens[mention.end] = cluster_entity[cluster_id]
            free.append(mention.id)

    doc = Document(
        doc_id=doc_id,
        tokens=tokens,
        mentions=mentions,
        clusters=clusters,
        split_anaphors=split_anaphors,
        bridging=_bridging_links(mentions, cluster_of, split_anaphors, config, rng),
        crowd=_crowd_annotations(mentions, cluster_of, split_anaphors, config, rng),
    )
    violations = validate_document(doc)
    if violations:
        raise InfeasibleConfigError(f"Generated document {doc_id} is invalid: {violations}")
    return doc


def _bridging_links(mentions, cluster_of, split_anaphors, config, rng) -> List[BridgingLink]:
    relations = [BridgingRelation.ELEMENT_OF, BridgingRelation.ELEMENT_OF_INVERSE, BridgingRelation.OTHER]
    links = []
    for i, mention in enumerate(mentions):
        if i == 0 or mention.id in split_anaphors or rng.random() >= config.bridging_rate:
            continue
        options = [m.id for m in mentions[:i] if cluster_of[m.id] != cluster_of[mention.id]]
        if not options:
            continue
        antecedent = options[int(rng.integers(len(options)))]
        relation = relations[int(rng.choice(3, p=[0.45, 0.45, 0.1]))]
        links.append(BridgingLink(anaphor=mention.id, antecedent=antecedent, relation=relation))
    return links


def _crowd_annotations(mentions, cluster_of, split_anaphors, config, rng) -> List[CrowdAnnotation]:
    rank = {m.id: i for i, m in enumerate(mentions)}
    annotations = []
    for i, mention in enumerate(mentions):
        preceding = [m.id for m in mentions[:i]]
        if mention.id in split_anaphors:
            gold = split_anaphors[mention.id]
            for a in range(config.annotators):
                chosen = list(gold)
                if rng.random() >= config.crowd_accuracy:
                    chosen = _perturb(chosen, preceding, cluster_of, rng)
                chosen.sort(key=rank.__getitem__)
                annotations.append(CrowdAnnotation(f"annotator{a}", mention.id, tuple(chosen)))
        elif i >= 2 and rng.random() < config.crowd_false_positive_rate:
            by_cluster = {}
            for m in preceding:
                by_cluster.setdefault(cluster_of[m], m)
            if len(by_cluster) >= 2:
                picks = rng.choice(sorted(by_cluster), size=2, replace=False)
                chosen = sorted((by_cluster[int(c)] for c in picks), key=rank.__getitem__)
                annotations.append(CrowdAnnotation("annotator0", mention.id, tuple(chosen)))
    return annotations


def _perturb(chosen: List[str], preceding: List[str], cluster_of, rng) -> List[str]:
    drop = int(rng.integers(len(chosen)))
    kept = [m for j, m in enumerate(chosen) if j != drop]
    taken = {cluster_of[m] for m in chosen}
    options = [m for m in preceding if cluster_of[m] not in taken]
    if not options:
        return chosen
    return kept + [options[int(rng.integers(len(options)))]]
