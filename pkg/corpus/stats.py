from collections import Counter
from dataclasses import dataclass, field
from typing import Dict

from corpus.model import Corpus


@dataclass
class CorpusStats:
    name: str
    quality_tier: str
    documents: int
    documents_with_anaphors: int
    anaphors: int
    links: int
    antecedent_histogram: Dict[int, int] = field(default_factory=dict)
    bridging: Dict[str, int] = field(default_factory=dict)
    crowd_annotations: int = 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "quality_tier": self.quality_tier,
            "documents": self.documents,
            "documents_with_anaphors": self.documents_with_anaphors,
            "anaphors": self.anaphors,
            "links": self.links,
            "antecedent_histogram": {str(k): v for k, v in sorted(self.antecedent_histogram.items())},
            "bridging": dict(sorted(self.bridging.items())),
            "crowd_annotations": self.crowd_annotations,
        }

    def format(self) -> str:
        lines = [
            f"Corpus: {self.name} ({self.quality_tier})",
            f"  Documents: {self.documents} ({self.documents_with_anaphors} with split anaphors)",
            f"  Split anaphors: {self.anaphors} ({self.links} links)",
            "  Antecedent counts:",
        ]
        for count, n in sorted(self.antecedent_histogram.items()):
            lines.append(f"    {count}: {n}")
        if self.bridging:
            lines.append("  Bridging: " + ", ".join(f"{k}={v}" for k, v in sorted(self.bridging.items())))
        lines.append(f"  Crowd annotations: {self.crowd_annotations}")
        return "\n".join(lines)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    histogram = Counter(len(ants) for doc in corpus for ants in doc.split_anaphors.values())
    bridging = Counter(link.relation.value for doc in corpus for link in doc.bridging)
    return CorpusStats(
        name=corpus.name,
        quality_tier=corpus.quality_tier.value,
        documents=len(corpus),
        documents_with_anaphors=sum(1 for doc in corpus if doc.split_anaphors),
        anaphors=corpus.anaphor_count(),
        links=corpus.link_count(),
        antecedent_histogram=dict(histogram),
        bridging=dict(bridging),
        crowd_annotations=sum(len(doc.crowd) for doc in corpus),
    )
