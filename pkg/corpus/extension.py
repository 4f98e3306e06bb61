import logging

from corpus.model import Corpus, Document

logger = logging.getLogger(__name__)


def extend_anaphors(doc: Document) -> Document:
    """Give cluster-mates of each split anaphor the same antecedents.

    A mate qualifies when every antecedent precedes it. Existing entries are
    never overwritten; with several anaphors in one cluster the earliest wins.
    Only meant for training data.
    """
    extended = {a: list(ants) for a, ants in doc.split_anaphors.items()}
    for anaphor in sorted(doc.split_anaphors, key=lambda a: doc.mention_rank[a]):
        antecedents = doc.split_anaphors[anaphor]
        for mate in doc.cluster_members(anaphor):
            if mate == anaphor or mate in extended:
                continue
            if all(doc.precedes(a, mate) for a in antecedents):
                extended[mate] = list(antecedents)

    if len(extended) == len(doc.split_anaphors):
        return doc
    return doc.with_split_anaphors(extended)


def extend_corpus(corpus: Corpus) -> Corpus:
    extended = corpus.derive(extend_anaphors(doc) for doc in corpus.documents)
    logger.info(
        "Extended split anaphors in %s: %d -> %d",
        corpus.name, corpus.anaphor_count(), extended.anaphor_count(),
    )
    return extended
