from typing import List

from corpus.model import Document

DEFAULT_WINDOW = 250


def candidate_antecedents(doc: Document, anaphor: str, window: int = DEFAULT_WINDOW) -> List[str]:
    """Up to `window` mentions strictly preceding the anaphor, nearest first."""
    target = doc.mention(anaphor)
    preceding = [m for m in doc.ordered_mentions if m.precedes(target)]
    return [m.id for m in reversed(preceding)][:window]


def mention_distance(doc: Document, antecedent: str, anaphor: str) -> int:
    """Number of mentions between the two in document order (adjacent = 1)."""
    return doc.mention_rank[anaphor] - doc.mention_rank[antecedent]
