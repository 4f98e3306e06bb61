from typing import Hashable, List, Mapping, Sequence

from scorer.pair_scorer import PairScore

THRESHOLD = 0.5
MIN_ANTECEDENTS = 2
MAX_ANTECEDENTS = 5


class SelectionError(ValueError):
    """Fewer than two cluster-distinct candidates exist for an anaphor"""


def select_antecedents(scores: Sequence[PairScore], clusters: Mapping[str, Hashable],
                       threshold: float = THRESHOLD, minimum: int = MIN_ANTECEDENTS,
                       maximum: int = MAX_ANTECEDENTS) -> List[str]:
    """Pick 2-5 cluster-distinct antecedents for one anaphor.

    Candidates are ranked by probability. Those strictly above the threshold
    are taken greedily, skipping repeated clusters, up to ``maximum``. When
    fewer than ``minimum`` qualify, the top ``minimum`` cluster-distinct
    candidates are returned regardless of score. The dummy antecedent is
    ignored.
    """
    ranked = sorted((s for s in scores if not s.is_epsilon), key=lambda s: -s.probability)

    distinct, seen = [], set()
    for score in ranked:
        cluster = clusters[score.candidate]
        if cluster not in seen:
            seen.add(cluster)
            distinct.append(score)
    if len(distinct) < minimum:
        anaphor = scores[0].anaphor if scores else "?"
        raise SelectionError(
            f"Anaphor '{anaphor}' has {len(distinct)} cluster-distinct candidates, needs at least {minimum}"
        )

    selected = [s.candidate for s in distinct if s.probability > threshold][:maximum]
    if len(selected) < minimum:
        selected = [s.candidate for s in distinct[:minimum]]
    return selected
