"""Naive reference systems: recent-m and random."""
import zlib
from typing import List

import numpy as np

from corpus.candidates import DEFAULT_WINDOW, candidate_antecedents
from corpus.model import Corpus, Document
from evaluation.metrics import PredictionSet
from scorer.pair_scorer import PairScore
from scorer.selection import MAX_ANTECEDENTS, MIN_ANTECEDENTS, select_antecedents


def _gold_anaphors(doc: Document) -> List[str]:
    return sorted(doc.split_anaphors, key=doc.mention_rank.__getitem__)


def baseline_recent_m(doc: Document, m: int) -> PredictionSet:
    """The m nearest preceding mentions, skipping repeated clusters."""
    if not MIN_ANTECEDENTS <= m <= MAX_ANTECEDENTS:
        raise ValueError(f"recent-m needs {MIN_ANTECEDENTS} <= m <= {MAX_ANTECEDENTS}, got {m}")
    predictions = {}
    for anaphor in _gold_anaphors(doc):
        chosen, seen = [], set()
        for candidate in candidate_antecedents(doc, anaphor, window=len(doc.mentions)):
            cluster = doc.cluster_of(candidate)
            if cluster in seen:
                continue
            seen.add(cluster)
            chosen.append(candidate)
            if len(chosen) == m:
                break
        predictions[anaphor] = chosen
    return PredictionSet(doc_id=doc.doc_id, predictions=predictions)


def document_rng(seed: int, doc_id: str) -> np.random.Generator:
    """Per-document generator, independent of document order."""
    return np.random.default_rng([seed, zlib.crc32(doc_id.encode("utf-8"))])


def _logit(p: float) -> float:
    p = float(np.clip(p, 1e-12, 1 - 1e-12))
    return float(np.log(p) - np.log1p(-p))


def baseline_random(doc: Document, seed: int, window: int = DEFAULT_WINDOW) -> PredictionSet:
    """Uniform(0, 1) probabilities for every candidate, then the trained models' selection rule."""
    rng = document_rng(seed, doc.doc_id)
    predictions, scores = {}, {}
    for anaphor in _gold_anaphors(doc):
        candidates = candidate_antecedents(doc, anaphor, window)
        draws = rng.random(len(candidates))
        pair_scores = [
            PairScore(anaphor=anaphor, candidate=c, logit=_logit(p), probability=float(p))
            for c, p in zip(candidates, draws)
        ]
        selected = select_antecedents(pair_scores, doc.cluster_map)
        probability = {s.candidate: s.probability for s in pair_scores}
        predictions[anaphor] = selected
        scores[anaphor] = [probability[c] for c in selected]
    return PredictionSet(doc_id=doc.doc_id, predictions=predictions, scores=scores)


def recent_m_corpus(corpus: Corpus, m: int) -> List[PredictionSet]:
    return [baseline_recent_m(doc, m) for doc in corpus]


def random_corpus(corpus: Corpus, seed: int, window: int = DEFAULT_WINDOW) -> List[PredictionSet]:
    return [baseline_random(doc, seed, window) for doc in corpus]


BASELINES = {f"recent-{m}": m for m in range(MIN_ANTECEDENTS, MAX_ANTECEDENTS + 1)}


def run_baseline(name: str, corpus: Corpus, seed: int = 0) -> List[PredictionSet]:
    """Dispatch by name: 'random' or 'recent-2' ... 'recent-5'."""
    if name == "random":
        return random_corpus(corpus, seed)
    if name not in BASELINES:
        raise ValueError(f"Baseline '{name}' not found. Available: {['random'] + list(BASELINES)}")
    return recent_m_corpus(corpus, BASELINES[name])
