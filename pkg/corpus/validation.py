from collections import Counter
from typing import List

from corpus.model import Document


def validate_document(doc: Document, min_antecedents: int = 2) -> List[str]:
    """Check every Document invariant and return one description per violation.

    An empty list means the document is valid. ``min_antecedents`` is 2 for
    split-antecedent data and 1 for auxiliary corpora.
    """
    violations = []
    known = set()

    id_counts = Counter(m.id for m in doc.mentions)
    for mention_id, count in id_counts.items():
        if count > 1:
            violations.append(f"duplicate mention id: {mention_id}")
    for m in doc.mentions:
        known.add(m.id)
        if not (0 <= m.start <= m.end < len(doc.tokens)):
            violations.append(f"mention span out of range: {m.id} ({m.start}, {m.end}) with {len(doc.tokens)} tokens")

    membership = Counter()
    for cluster in doc.clusters:
        for mention_id in cluster:
            if mention_id not in known:
                violations.append(f"unknown mention id in clusters: {mention_id}")
            membership[mention_id] += 1
    for mention_id in sorted(known):
        if membership[mention_id] == 0:
            violations.append(f"mention belongs to no cluster: {mention_id}")
        elif membership[mention_id] > 1:
            violations.append(f"mention belongs to several clusters: {mention_id}")

    clusters_ok = all(membership[m] == 1 for m in known) and set(membership) <= known
    for anaphor, antecedents in doc.split_anaphors.items():
        missing = [m for m in [anaphor, *antecedents] if m not in known]
        if missing:
            violations.append(f"unknown mention id in split_anaphors: {', '.join(missing)}")
            continue
        if len(set(antecedents)) < min_antecedents:
            violations.append(f"split anaphor must have ≥{min_antecedents} antecedents: {anaphor}")
        for antecedent in antecedents:
            if not doc.precedes(antecedent, anaphor):
                violations.append(f"antecedent must precede its anaphor: {anaphor} <- {antecedent}")
        if clusters_ok:
            clusters = Counter(doc.cluster_of(a) for a in set(antecedents))
            shared = sorted(a for a in set(antecedents) if clusters[doc.cluster_of(a)] > 1)
            if shared:
                violations.append(
                    f"antecedents of one anaphor must lie in distinct clusters: {anaphor} ({', '.join(shared)})"
                )

    for link in doc.bridging:
        missing = [m for m in (link.anaphor, link.antecedent) if m not in known]
        if missing:
            violations.append(f"unknown mention id in bridging: {', '.join(missing)}")

    for annotation in doc.crowd:
        if not annotation.antecedents:
            violations.append(f"crowd annotation without antecedents: {annotation.annotator_id}/{annotation.anaphor_id}")
        missing = [m for m in (annotation.anaphor_id, *annotation.antecedents) if m not in known]
        if missing:
            violations.append(f"unknown mention id in crowd: {', '.join(missing)}")

    return violations
