"""Builders for the auxiliary training corpora.

Each builder returns an AuxCorpus whose documents keep tokens, mentions and
clusters and carry the auxiliary links as split_anaphors. Auxiliary items may
have a single antecedent.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np

from auxiliary.voting import link_vote, majority_vote
from corpus.model import BridgingRelation, Corpus, Document, QualityTier
from corpus.validation import validate_document

logger = logging.getLogger(__name__)


class AuxSource(str, Enum):
    PD_SILVER = "pd-silver"
    PD_CROWD = "pd-crowd"
    ELEMENT_OF = "element-of"
    SINGLE_COREF = "single-coref"


class AuxBuildError(ValueError):
    """The source corpus lacks the annotation layer a builder needs"""


@dataclass
class AuxCorpus:
    corpus: Corpus
    source: AuxSource

    @property
    def link_count(self) -> int:
        return self.corpus.link_count()

    @property
    def anaphor_count(self) -> int:
        return self.corpus.anaphor_count()

    def __len__(self) -> int:
        return len(self.corpus)


def _clean_links(doc: Document, anaphor: str, antecedents: Sequence[str], min_antecedents: int) -> Optional[List[str]]:
    """Drop antecedents that do not precede the anaphor, keep the nearest one per cluster."""
    nearest: Dict[int, str] = {}
    for antecedent in sorted(set(antecedents), key=lambda m: doc.mention_rank[m], reverse=True):
        if antecedent == anaphor or not doc.precedes(antecedent, anaphor):
            continue
        nearest.setdefault(doc.cluster_of(antecedent), antecedent)
    kept = sorted(nearest.values(), key=lambda m: doc.mention_rank[m])
    return kept if len(kept) >= min_antecedents else None


def _assemble(source: AuxSource, src: Corpus, links: Dict[str, Dict[str, List[str]]],
              tier: QualityTier, min_antecedents: int) -> AuxCorpus:
    documents, dropped = [], 0
    for doc in src.documents:
        cleaned = {}
        for anaphor, antecedents in links.get(doc.doc_id, {}).items():
            kept = _clean_links(doc, anaphor, antecedents, min_antecedents)
            if kept is None:
                dropped += 1
            else:
                cleaned[anaphor] = kept
        if not cleaned:
            continue
        built = doc.with_split_anaphors(cleaned, keep_layers=False)
        violations = validate_document(built, min_antecedents=min_antecedents)
        if violations:
            raise AuxBuildError(f"{source.value} item in '{doc.doc_id}' is invalid: {violations}")
        documents.append(built)

    corpus = Corpus(documents=documents, name=f"{src.name}.{source.value}", quality_tier=tier)
    aux = AuxCorpus(corpus=corpus, source=source)
    logger.info(
        "Built %s from %s: %d documents, %d anaphors, %d links (%d items dropped)",
        source.value, src.name, len(corpus), aux.anaphor_count, aux.link_count, dropped,
    )
    return aux


def build_silver(pd: Corpus) -> AuxCorpus:
    """Documents whose silver labels contain at least one split anaphor."""
    links = {doc.doc_id: dict(doc.split_anaphors) for doc in pd.documents if doc.split_anaphors}
    return _assemble(AuxSource.PD_SILVER, pd, links, QualityTier.SILVER, min_antecedents=2)


def build_crowd(pd_raw: Corpus, aggregation: str = "set") -> AuxCorpus:
    """Aggregate raw crowd split-antecedent annotations per anaphor.

    ``aggregation`` is "set" (whole-set majority vote) or "link" (per-link vote).
    Vote ties compare mentions in document order; mentions with identical
    spans are ordered by id.
    """
    voters = {"set": majority_vote, "link": link_vote}
    if aggregation not in voters:
        raise AuxBuildError(f"Unknown aggregation '{aggregation}'. Available: {sorted(voters)}")
    vote = voters[aggregation]

    links = {}
    for doc in pd_raw.documents:
        per_anaphor = defaultdict(list)
        for annotation in doc.crowd:
            if len(set(annotation.antecedents)) >= 2:
                per_anaphor[annotation.anaphor_id].append(annotation)
        if per_anaphor:
            rank = doc.mention_rank
            links[doc.doc_id] = {
                anaphor: sorted(vote(annotations, lambda m: (rank[m],)), key=rank.__getitem__)
                for anaphor, annotations in per_anaphor.items()
            }
    return _assemble(AuxSource.PD_CROWD, pd_raw, links, QualityTier.NOISY, min_antecedents=2)


def build_element_of(src: Corpus) -> AuxCorpus:
    """Element-of and element-of-inverse bridging links as anaphor -> antecedent items."""
    relations = (BridgingRelation.ELEMENT_OF, BridgingRelation.ELEMENT_OF_INVERSE)
    links = {}
    for doc in src.documents:
        per_anaphor = defaultdict(list)
        for link in doc.bridging:
            # element-of: singular anaphor -> plural antecedent; inverse: plural anaphor -> singular antecedent
            if link.relation in relations:
                per_anaphor[link.anaphor].append(link.antecedent)
        if per_anaphor:
            links[doc.doc_id] = dict(per_anaphor)
    return _assemble(AuxSource.ELEMENT_OF, src, links, QualityTier.GOLD, min_antecedents=1)


def build_single_coref(src: Corpus) -> AuxCorpus:
    """Link every non-first cluster mention to its nearest preceding cluster-mate.

    A mention whose span equals its predecessor's gets no link, since
    neither strictly precedes the other.
    """
    links = {}
    for doc in src.documents:
        per_anaphor = {}
        for cluster in doc.clusters:
            ordered = sorted(cluster, key=lambda m: doc.mention_rank[m])
            for previous, current in zip(ordered, ordered[1:]):
                per_anaphor[current] = [previous]
        if per_anaphor:
            links[doc.doc_id] = per_anaphor
    return _assemble(AuxSource.SINGLE_COREF, src, links, QualityTier.GOLD, min_antecedents=1)


def subsample_links(aux: AuxCorpus, max_links: int, seed: int = 0) -> AuxCorpus:
    """Randomly keep whole anaphor items until ``max_links`` links are reached."""
    items = [(doc.doc_id, anaphor) for doc in aux.corpus for anaphor in doc.split_anaphors]
    order = np.random.default_rng(seed).permutation(len(items))
    kept, total = defaultdict(dict), 0
    for index in order:
        doc_id, anaphor = items[int(index)]
        antecedents = aux.corpus.get(doc_id).split_anaphors[anaphor]
        if total + len(antecedents) > max_links:
            continue
        kept[doc_id][anaphor] = antecedents
        total += len(antecedents)

    documents = [
        doc.with_split_anaphors({a: ants for a, ants in doc.split_anaphors.items() if a in kept[doc.doc_id]})
        for doc in aux.corpus if kept.get(doc.doc_id)
    ]
    corpus = aux.corpus.derive(documents, name=f"{aux.corpus.name}.{max_links}")
    logger.info("Subsampled %s to %d links (requested %d)", aux.corpus.name, total, max_links)
    return AuxCorpus(corpus=corpus, source=aux.source)


BUILDERS = {
    "silver": build_silver,
    "crowd": build_crowd,
    "element-of": build_element_of,
    "single-coref": build_single_coref,
}


def build_aux(kind: str, src: Corpus, **options) -> AuxCorpus:
    """Dispatch to a builder by kind, checking the needed layer is present."""
    if kind not in BUILDERS:
        raise AuxBuildError(f"Unknown auxiliary kind '{kind}'. Available: {sorted(BUILDERS)}")
    needed = {"crowd": "crowd", "element-of": "bridging"}.get(kind)
    if needed and not any(getattr(doc, needed) for doc in src.documents):
        raise AuxBuildError(f"Corpus '{src.name}' has no {needed} layer; cannot build '{kind}'")
    return BUILDERS[kind](src, **options)
