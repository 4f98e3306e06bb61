"""Corpus-mixing schedules: which corpus feeds the next training step."""
from dataclasses import dataclass
from enum import Enum
from typing import Generic, List, Sequence, Tuple, TypeVar

import numpy as np

from training.strategy import Strategy

CONCAT_P_MAIN = 0.5

T = TypeVar("T")


class CorpusChoice(str, Enum):
    MAIN = "main"
    AUX = "aux"


@dataclass
class ScheduleState:
    step: int
    total: int
    stage: str
    p_main: float


def annealing_p_main(t: int, total: int) -> float:
    """Linear ramp p_main(t) = t / T, clamped to [0, 1]."""
    if total <= 0:
        return 1.0
    return min(max(t, 0) / total, 1.0)


def concat_next(state: ScheduleState, rng: np.random.Generator) -> CorpusChoice:
    """Independent Bernoulli draw with probability state.p_main of the main corpus."""
    return CorpusChoice.MAIN if rng.random() < state.p_main else CorpusChoice.AUX


class CorpusSchedule:
    """Per-stage corpus choice. Steps are 1-based, so an annealing stage ends fully on main."""

    def __init__(self, strategy: Strategy, total: int, stage: str, rng: np.random.Generator,
                 has_aux: bool = True, alternate: bool = False):
        self.strategy = Strategy(strategy)
        self.total = total
        self.stage = stage
        self.rng = rng
        self.has_aux = has_aux
        self.alternate = alternate

    def p_main(self, step: int) -> float:
        if self.strategy == Strategy.PRETRAIN:
            return 0.0
        if self.strategy == Strategy.MAIN or not self.has_aux:
            return 1.0
        if self.strategy == Strategy.CONCAT:
            return CONCAT_P_MAIN
        return annealing_p_main(step, self.total)

    def next(self, step: int) -> Tuple[CorpusChoice, ScheduleState]:
        state = ScheduleState(step=step, total=self.total, stage=self.stage, p_main=self.p_main(step))
        if state.p_main >= 1.0:
            return CorpusChoice.MAIN, state
        if state.p_main <= 0.0:
            return CorpusChoice.AUX, state
        if self.strategy == Strategy.CONCAT and self.alternate:
            return (CorpusChoice.MAIN if step % 2 == 1 else CorpusChoice.AUX), state
        return concat_next(state, self.rng), state


class DocumentSampler(Generic[T]):
    """Uniform draws without replacement, reshuffled every epoch"""

    def __init__(self, items: Sequence[T], rng: np.random.Generator):
        if not items:
            raise ValueError("DocumentSampler needs at least one item")
        self.items = list(items)
        self.rng = rng
        self.epoch = 0
        self._order: List[int] = []

    def next(self) -> T:
        if not self._order:
            self._order = [int(i) for i in self.rng.permutation(len(self.items))]
            self.epoch += 1
        return self.items[self._order.pop()]
