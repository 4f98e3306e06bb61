"""Aggregation of raw crowd split-antecedent annotations for one anaphor."""
from collections import defaultdict
from typing import Callable, Dict, FrozenSet, Mapping, Optional, Sequence, Tuple, Union

from corpus.model import CrowdAnnotation

Order = Union[Mapping[str, Tuple[int, int]], Callable[[str], Tuple]]


def _position_key(order: Optional[Order]) -> Callable[[str], Tuple]:
    if order is None:
        return lambda mention_id: (mention_id,)
    if callable(order):
        return order
    return lambda mention_id: (tuple(order[mention_id]), mention_id)


def _check(annotations: Sequence[CrowdAnnotation]):
    if not annotations:
        raise ValueError("majority_vote needs at least one annotation")
    anaphors = {a.anaphor_id for a in annotations}
    if len(anaphors) > 1:
        raise ValueError(f"Annotations must concern a single anaphor, got {sorted(anaphors)}")


def majority_vote(annotations: Sequence[CrowdAnnotation], order: Optional[Order] = None) -> FrozenSet[str]:
    """Whole-set majority vote over annotators.

    Ties go to the set with the higher per-link vote total, then to the set
    holding the earliest mention on which the tied sets differ. ``order`` maps
    mention ids to document positions; without it ids are compared as strings.
    """
    _check(annotations)
    set_votes: Dict[FrozenSet[str], set] = defaultdict(set)
    link_votes: Dict[str, set] = defaultdict(set)
    for annotation in annotations:
        antecedents = frozenset(annotation.antecedents)
        set_votes[antecedents].add(annotation.annotator_id)
        for mention_id in antecedents:
            link_votes[mention_id].add(annotation.annotator_id)

    def support(candidate: FrozenSet[str]) -> Tuple[int, int]:
        return len(set_votes[candidate]), sum(len(link_votes[m]) for m in candidate)

    best = max(support(s) for s in set_votes)
    tied = [s for s in set_votes if support(s) == best]
    if len(tied) == 1:
        return tied[0]

    key = _position_key(order)
    universe = sorted(set().union(*tied), key=key)
    # The earliest differing mention decides: compare membership vectors in document order.
    return max(tied, key=lambda s: tuple(m in s for m in universe))


def link_vote(annotations: Sequence[CrowdAnnotation], order: Optional[Order] = None) -> FrozenSet[str]:
    """Keep each antecedent chosen by more than half of the annotators."""
    _check(annotations)
    annotators = {a.annotator_id for a in annotations}
    chosen_by: Dict[str, set] = defaultdict(set)
    for annotation in annotations:
        for mention_id in annotation.antecedents:
            chosen_by[mention_id].add(annotation.annotator_id)
    kept = frozenset(m for m, who in chosen_by.items() if 2 * len(who) > len(annotators))
    if len(kept) >= 2:
        return kept
    return majority_vote(annotations, order)
