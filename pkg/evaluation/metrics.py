"""Lenient and strict split-antecedent evaluation.

A predicted antecedent is credited when it falls in the gold cluster of one
of the anaphor's gold antecedents; each gold antecedent is credited at most
once. Lenient scores are micro-averaged over links.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Sequence, Tuple

from corpus.model import Corpus, Document


class PredictionCoverageError(ValueError):
    """Predictions do not cover exactly the gold split anaphors"""


@dataclass
class PredictionSet:
    doc_id: str
    predictions: Dict[str, List[str]]
    scores: Dict[str, List[float]] = field(default_factory=dict)


@dataclass
class AnaphorScore:
    doc_id: str
    anaphor: str
    matched: int
    gold_links: int
    predicted_links: int
    strict_correct: bool


@dataclass
class LenientScores:
    recall: float
    precision: float
    f1: float
    matched: float = 0
    gold_links: float = 0
    predicted_links: float = 0

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.recall, self.precision, self.f1


def f1_score(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


def score_anaphor(doc: Document, anaphor: str, predicted: Sequence[str]) -> AnaphorScore:
    gold_clusters = {doc.cluster_of(a) for a in doc.split_anaphors[anaphor]}
    predicted_clusters = {doc.cluster_of(p) for p in predicted}
    return AnaphorScore(
        doc_id=doc.doc_id,
        anaphor=anaphor,
        matched=len(predicted_clusters & gold_clusters),
        gold_links=len(doc.split_anaphors[anaphor]),
        predicted_links=len(predicted),
        strict_correct=predicted_clusters == gold_clusters,
    )


def _aligned(pred: Sequence[PredictionSet], gold: Corpus) -> Iterator[Tuple[Document, str, List[str]]]:
    by_doc: Dict[str, PredictionSet] = {}
    for prediction_set in pred:
        if prediction_set.doc_id in by_doc:
            raise PredictionCoverageError(f"Duplicate predictions for document '{prediction_set.doc_id}'")
        gold.get(prediction_set.doc_id)
        by_doc[prediction_set.doc_id] = prediction_set

    for doc in gold.documents:
        predictions = by_doc[doc.doc_id].predictions if doc.doc_id in by_doc else {}
        extra = sorted(set(predictions) - set(doc.split_anaphors))
        if extra:
            raise PredictionCoverageError(f"Predictions for non-gold anaphors in '{doc.doc_id}': {extra}")
        for anaphor in sorted(doc.split_anaphors, key=doc.mention_rank.__getitem__):
            if anaphor not in predictions:
                raise PredictionCoverageError(f"Missing prediction for anaphor '{anaphor}' in '{doc.doc_id}'")
            yield doc, anaphor, predictions[anaphor]


def anaphor_scores(pred: Sequence[PredictionSet], gold: Corpus) -> List[AnaphorScore]:
    return [score_anaphor(doc, anaphor, predicted) for doc, anaphor, predicted in _aligned(pred, gold)]


def micro_scores(scores: Sequence[AnaphorScore]) -> LenientScores:
    matched = sum(s.matched for s in scores)
    gold_links = sum(s.gold_links for s in scores)
    predicted_links = sum(s.predicted_links for s in scores)
    recall = matched / gold_links if gold_links else 0.0
    precision = matched / predicted_links if predicted_links else 0.0
    return LenientScores(recall, precision, f1_score(precision, recall), matched, gold_links, predicted_links)


def strict_fraction(scores: Sequence[AnaphorScore]) -> float:
    return sum(s.strict_correct for s in scores) / len(scores) if scores else 0.0


def lenient_scores(pred: Sequence[PredictionSet], gold: Corpus) -> LenientScores:
    return micro_scores(anaphor_scores(pred, gold))


def strict_accuracy(pred: Sequence[PredictionSet], gold: Corpus) -> float:
    return strict_fraction(anaphor_scores(pred, gold))


def macro_lenient(pred: Sequence[PredictionSet], gold: Corpus) -> LenientScores:
    """Per-anaphor lenient recall/precision/F1 averaged over anaphors."""
    scores = anaphor_scores(pred, gold)
    if not scores:
        return LenientScores(0.0, 0.0, 0.0)
    recalls = [s.matched / s.gold_links for s in scores]
    precisions = [s.matched / s.predicted_links if s.predicted_links else 0.0 for s in scores]
    f1s = [f1_score(p, r) for p, r in zip(precisions, recalls)]
    n = len(scores)
    return LenientScores(sum(recalls) / n, sum(precisions) / n, sum(f1s) / n)


@dataclass
class CountRow:
    label: str
    anaphors: int
    lenient: LenientScores
    strict: float

    @property
    def empty(self) -> bool:
        return self.anaphors == 0


COUNT_GROUPS = (("2", lambda n: n == 2), ("3+", lambda n: n >= 3))


def breakdown_by_count(pred: Sequence[PredictionSet], gold: Corpus) -> List[CountRow]:
    """Lenient and strict scores for anaphors with 2 and with 3+ gold antecedents."""
    scores = anaphor_scores(pred, gold)
    rows = []
    for label, member in COUNT_GROUPS:
        group = [s for s in scores if member(s.gold_links)]
        rows.append(CountRow(label=label, anaphors=len(group), lenient=micro_scores(group), strict=strict_fraction(group)))
    return rows
