"""JSONL interchange format: one document per line.

Keys: doc_id, tokens, mentions, clusters, split_anaphors, bridging, crowd.
Missing bridging/crowd keys mean empty layers.
"""
import json
import logging
from pathlib import Path
from typing import Union

from corpus.errors import CorpusFormatError, CorpusValidationError
from corpus.model import BridgingLink, BridgingRelation, Corpus, CrowdAnnotation, Document, Mention, QualityTier
from corpus.validation import validate_document

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ("doc_id", "tokens", "mentions", "clusters", "split_anaphors")


def document_from_dict(data: dict) -> Document:
    missing = [key for key in REQUIRED_KEYS if key not in data]
    if missing:
        raise KeyError(f"missing keys: {', '.join(missing)}")
    return Document(
        doc_id=str(data["doc_id"]),
        tokens=[str(t) for t in data["tokens"]],
        mentions=[Mention(id=str(m["id"]), start=int(m["start"]), end=int(m["end"])) for m in data["mentions"]],
        clusters=[[str(m) for m in cluster] for cluster in data["clusters"]],
        split_anaphors={str(a): [str(x) for x in ants] for a, ants in data["split_anaphors"].items()},
        bridging=[
            BridgingLink(anaphor=str(b["anaphor"]), antecedent=str(b["antecedent"]), relation=BridgingRelation(b["relation"]))
            for b in data.get("bridging", [])
        ],
        crowd=[
            CrowdAnnotation(
                annotator_id=str(c["annotator"]),
                anaphor_id=str(c["anaphor"]),
                antecedents=tuple(str(x) for x in c["antecedents"]),
            )
            for c in data.get("crowd", [])
        ],
    )


def document_to_dict(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "tokens": list(doc.tokens),
        "mentions": [{"id": m.id, "start": m.start, "end": m.end} for m in doc.mentions],
        "clusters": [list(cluster) for cluster in doc.clusters],
        "split_anaphors": {a: list(ants) for a, ants in doc.split_anaphors.items()},
        "bridging": [{"anaphor": b.anaphor, "antecedent": b.antecedent, "relation": b.relation.value} for b in doc.bridging],
        "crowd": [{"annotator": c.annotator_id, "anaphor": c.anaphor_id, "antecedents": list(c.antecedents)} for c in doc.crowd],
    }


def document_to_line(doc: Document) -> str:
    return json.dumps(document_to_dict(doc), ensure_ascii=False)


def load_corpus(
    path: Union[str, Path],
    name: str = None,
    quality_tier: QualityTier = QualityTier.GOLD,
    min_antecedents: int = 2,
) -> Corpus:
    """Load and validate a JSONL corpus, preserving document order."""
    path = Path(path)
    documents = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                doc = document_from_dict(json.loads(line))
            except json.JSONDecodeError as e:
                raise CorpusFormatError(path, line_number, f"invalid JSON ({e.msg})") from e
            except (KeyError, TypeError, ValueError, AttributeError) as e:
                raise CorpusFormatError(path, line_number, f"malformed document ({e})") from e
            violations = validate_document(doc, min_antecedents=min_antecedents)
            if violations:
                raise CorpusValidationError(doc.doc_id, violations)
            documents.append(doc)

    logger.info("Loaded %d documents from %s", len(documents), path)
    return Corpus(documents=documents, name=name or path.stem, quality_tier=QualityTier(quality_tier))


def save_corpus(corpus: Corpus, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for doc in corpus.documents:
            f.write(document_to_line(doc) + "\n")
    logger.info("Wrote %d documents to %s", len(corpus), path)
    return path
