"""Prediction JSONL: one line per (document, anaphor)."""
import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

from tqdm import tqdm

from corpus.errors import CorpusFormatError
from corpus.model import Corpus
from evaluation.metrics import PredictionSet
from scorer.resolver import SplitAntecedentResolver

logger = logging.getLogger(__name__)


def predict_corpus(model: SplitAntecedentResolver, corpus: Corpus, show_progress: bool = False) -> List[PredictionSet]:
    model.eval()
    results = []
    for doc in tqdm(corpus.documents, desc="Predicting", disable=not show_progress):
        predicted = model.predict(doc)
        results.append(PredictionSet(
            doc_id=doc.doc_id,
            predictions={a: selected for a, (selected, _) in predicted.items()},
            scores={a: probs for a, (_, probs) in predicted.items()},
        ))
    return results


def write_predictions(predictions: Sequence[PredictionSet], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for prediction_set in predictions:
            for anaphor, antecedents in prediction_set.predictions.items():
                record = {
                    "doc_id": prediction_set.doc_id,
                    "anaphor": anaphor,
                    "antecedents": list(antecedents),
                    "scores": [round(s, 6) for s in prediction_set.scores.get(anaphor, [])],
                }
                f.write(json.dumps(record, ensure_ascii=False) + "\n")
                lines += 1
    logger.info("Wrote %d predictions to %s", lines, path)
    return path


def read_predictions(path: Union[str, Path]) -> List[PredictionSet]:
    path = Path(path)
    by_doc: Dict[str, PredictionSet] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                doc_id, anaphor = str(record["doc_id"]), str(record["anaphor"])
                antecedents = [str(a) for a in record["antecedents"]]
                scores = [float(s) for s in record.get("scores", [])]
            except json.JSONDecodeError as e:
                raise CorpusFormatError(path, line_number, f"invalid JSON ({e.msg})") from e
            except (KeyError, TypeError, ValueError) as e:
                raise CorpusFormatError(path, line_number, f"malformed prediction ({e})") from e
            prediction_set = by_doc.setdefault(doc_id, PredictionSet(doc_id=doc_id, predictions={}))
            if anaphor in prediction_set.predictions:
                raise CorpusFormatError(path, line_number, f"duplicate prediction for anaphor '{anaphor}'")
            prediction_set.predictions[anaphor] = antecedents
            if scores:
                prediction_set.scores[anaphor] = scores
    return list(by_doc.values())
