import json
from dataclasses import dataclass
from typing import Set, Tuple

from auxiliary.builders import AuxBuildError, AuxCorpus
from corpus.model import Corpus

Link = Tuple[str, str, int]


@dataclass
class QualityReport:
    recall: float
    precision: float
    f1: float
    aux_links: int
    gold_links: int
    correct_links: int

    def to_dict(self) -> dict:
        return {
            "recall": self.recall,
            "precision": self.precision,
            "f1": self.f1,
            "link_counts": {"aux": self.aux_links, "gold": self.gold_links, "correct": self.correct_links},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _links(corpus: Corpus, gold: Corpus) -> Set[Link]:
    """(doc_id, anaphor, gold cluster of antecedent) for every anaphor -> antecedent link"""
    links = set()
    for doc in corpus.documents:
        gold_doc = gold.get(doc.doc_id)
        for anaphor, antecedents in doc.split_anaphors.items():
            gold_doc.mention(anaphor)
            for antecedent in antecedents:
                links.add((doc.doc_id, anaphor, gold_doc.cluster_of(antecedent)))
    return links


def harmonic_mean(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


def corpus_quality(aux: AuxCorpus, gold: Corpus) -> QualityReport:
    """Link-level recall/precision/F1 of an auxiliary corpus against gold split antecedents.

    Gold documents absent from the auxiliary corpus count as missed links.
    """
    unknown = sorted(set(aux.corpus.by_id) - set(gold.by_id))
    if unknown:
        raise AuxBuildError(f"Auxiliary documents missing from gold corpus '{gold.name}': {unknown[:5]}")
    aux_links = _links(aux.corpus, gold)
    gold_links = _links(gold, gold)
    correct = len(aux_links & gold_links)
    recall = correct / len(gold_links) if gold_links else 0.0
    precision = correct / len(aux_links) if aux_links else 0.0
    return QualityReport(
        recall=recall,
        precision=precision,
        f1=harmonic_mean(precision, recall),
        aux_links=len(aux_links),
        gold_links=len(gold_links),
        correct_links=correct,
    )
