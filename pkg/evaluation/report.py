import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from corpus.model import Corpus
from evaluation.metrics import (CountRow, LenientScores, PredictionSet, micro_scores, strict_fraction, anaphor_scores,
                                breakdown_by_count, macro_lenient)


def _pct(value: float) -> float:
    return round(100.0 * value, 4)


@dataclass
class MetricReport:
    """Scores in percent"""

    lenient_recall: float
    lenient_precision: float
    lenient_f1: float
    strict_accuracy: float
    macro_f1: float
    anaphors: int
    gold_links: int
    predicted_links: int
    rows: List[Dict] = field(default_factory=list)
    seed: Optional[int] = None

    def to_dict(self, strict_only: bool = False) -> dict:
        if strict_only:
            return {"strict_accuracy": self.strict_accuracy, "anaphors": self.anaphors}
        data = {
            "lenient": {"recall": self.lenient_recall, "precision": self.lenient_precision, "f1": self.lenient_f1},
            "strict_accuracy": self.strict_accuracy,
            "macro_lenient_f1": self.macro_f1,
            "anaphors": self.anaphors,
            "links": {"gold": self.gold_links, "predicted": self.predicted_links},
        }
        if self.rows:
            data["by_antecedent_count"] = self.rows
        if self.seed is not None:
            data["seed"] = self.seed
        return data

    def to_json(self, strict_only: bool = False) -> str:
        return json.dumps(self.to_dict(strict_only), indent=2)


def _row(row: CountRow) -> Dict:
    return {
        "count": row.label,
        "anaphors": row.anaphors,
        "lenient_f1": _pct(row.lenient.f1),
        "strict_accuracy": _pct(row.strict),
        "empty": row.empty,
    }


def evaluate(pred: Sequence[PredictionSet], gold: Corpus, breakdown: bool = False, seed: int = None) -> MetricReport:
    scores = anaphor_scores(pred, gold)
    lenient: LenientScores = micro_scores(scores)
    return MetricReport(
        lenient_recall=_pct(lenient.recall),
        lenient_precision=_pct(lenient.precision),
        lenient_f1=_pct(lenient.f1),
        strict_accuracy=_pct(strict_fraction(scores)),
        macro_f1=_pct(macro_lenient(pred, gold).f1),
        anaphors=len(scores),
        gold_links=int(lenient.gold_links),
        predicted_links=int(lenient.predicted_links),
        rows=[_row(r) for r in breakdown_by_count(pred, gold)] if breakdown else [],
        seed=seed,
    )


def format_table(reports: Dict[str, MetricReport], strict_only: bool = False) -> str:
    """Aligned plain-text table: system, lenient R/P/F1, strict accuracy."""
    name_width = max([len("System")] + [len(n) for n in reports]) + 2
    if strict_only:
        lines = [f"{'System':<{name_width}}{'Strict':>8}"]
        lines += [f"{name:<{name_width}}{r.strict_accuracy:>8.1f}" for name, r in reports.items()]
        return "\n".join(lines)

    header = f"{'':<{name_width}}{'Lenient':^24}{'Strict':>8}"
    columns = f"{'System':<{name_width}}{'R':>8}{'P':>8}{'F1':>8}{'Acc':>8}"
    lines = [header, columns, "-" * len(columns)]
    for name, r in reports.items():
        lines.append(
            f"{name:<{name_width}}{r.lenient_recall:>8.1f}{r.lenient_precision:>8.1f}"
            f"{r.lenient_f1:>8.1f}{r.strict_accuracy:>8.1f}"
        )
    for name, r in reports.items():
        if r.rows:
            lines += ["", f"{name} by antecedent count", f"{'Count':<8}{'N':>6}{'Lenient':>10}{'Strict':>8}"]
            for row in r.rows:
                flag = "  (empty)" if row["empty"] else ""
                lines.append(
                    f"{row['count']:<8}{row['anaphors']:>6}{row['lenient_f1']:>10.1f}{row['strict_accuracy']:>8.1f}{flag}"
                )
    return "\n".join(lines)
