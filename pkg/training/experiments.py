"""Desk-scale comparison of the corpus-mixing strategies against training on main alone."""
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from corpus.model import Corpus
from training.config import StageConfig, TrainConfig
from training.strategy import Strategy
from training.trainer import train

logger = logging.getLogger(__name__)

MAIN_KEY, AUX_KEY, DEV_KEY = "main", "aux", "dev"

STRATEGY_STAGES = {
    "no-aux": lambda steps: [StageConfig("main", Strategy.MAIN, steps=steps)],
    "concat": lambda steps: [StageConfig("concat", Strategy.CONCAT, aux=[AUX_KEY], steps=steps)],
    "annealing": lambda steps: [StageConfig("annealing", Strategy.ANNEALING, aux=[AUX_KEY], steps=steps)],
    "pretrain": lambda steps: [
        StageConfig("pretrain", Strategy.PRETRAIN, aux=[AUX_KEY], steps=steps // 2),
        StageConfig("finetune", Strategy.MAIN, steps=steps - steps // 2),
    ],
}


@dataclass
class StrategyRow:
    strategy: str
    lenient_f1: float
    strict_accuracy: float
    steps: int


def strategy_config(base: TrainConfig, strategy: str, steps: int) -> TrainConfig:
    if strategy not in STRATEGY_STAGES:
        raise ValueError(f"Strategy '{strategy}' not found. Available: {list(STRATEGY_STAGES)}")
    config = replace(base, main=MAIN_KEY, dev=DEV_KEY, stages=STRATEGY_STAGES[strategy](steps), total_steps=steps)
    config.validate()
    return config


def compare_strategies(main: Corpus, aux: Corpus, dev: Corpus, base: TrainConfig, out_dir: Union[str, Path],
                       steps: int, strategies: Sequence[str] = tuple(STRATEGY_STAGES),
                       show_progress: bool = False) -> List[StrategyRow]:
    """Train once per strategy with the same seed and step budget; dev lenient F1 per run."""
    corpora: Dict[str, Corpus] = {MAIN_KEY: main, AUX_KEY: aux, DEV_KEY: dev}
    rows = []
    for strategy in strategies:
        config = strategy_config(base, strategy, steps)
        result = train(config, Path(out_dir) / strategy, show_progress=show_progress, corpora=corpora)
        report = result.dev_report
        rows.append(StrategyRow(strategy, report.lenient_f1, report.strict_accuracy, steps))
        logger.info("%s: dev lenient F1 %.1f", strategy, report.lenient_f1)
    return rows


def format_rows(rows: Sequence[StrategyRow], baseline: Optional[str] = "no-aux") -> str:
    reference = next((r.lenient_f1 for r in rows if r.strategy == baseline), None)
    lines = [f"{'Strategy':<12}{'F1':>8}{'Strict':>8}{'Delta':>8}"]
    for row in rows:
        delta = "" if reference is None or row.strategy == baseline else f"{row.lenient_f1 - reference:+.1f}"
        lines.append(f"{row.strategy:<12}{row.lenient_f1:>8.1f}{row.strict_accuracy:>8.1f}{delta:>8}")
    return "\n".join(lines)
