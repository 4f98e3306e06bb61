import math
from dataclasses import dataclass
from typing import Sequence, Union

import torch
import torch.nn as nn

from encoder.buckets import NUM_BUCKETS, distance_bucket
from encoder.mention_encoder import MentionRepr


class NonFiniteScoreError(RuntimeError):
    """The feed-forward scorer produced NaN or infinite activations"""


@dataclass
class PairRepr:
    vector: torch.Tensor
    distance_bucket: int


@dataclass(frozen=True)
class PairScore:
    anaphor: str
    candidate: str  # None stands for the dummy antecedent
    logit: float
    probability: float

    @property
    def is_epsilon(self) -> bool:
        return self.candidate is None


def pair_prob(r: Union[float, torch.Tensor]):
    """Logistic s = 1 / (1 + exp(-r))"""
    if isinstance(r, torch.Tensor):
        return torch.sigmoid(r)
    if r >= 0:
        return 1.0 / (1.0 + math.exp(-r))
    z = math.exp(r)
    return z / (1.0 + z)


def _vector(m) -> torch.Tensor:
    return m.vector if isinstance(m, MentionRepr) else m


class PairScorer(nn.Module):
    """P = [M_antecedent; M_anaphor; M_antecedent * M_anaphor; phi(distance)] -> FFNN -> r"""

    def __init__(self, mention_dimension: int, distance_dimension: int = 20,
                 hidden_size: int = 150, hidden_layers: int = 2, dropout: float = 0.2):
        super().__init__()
        self.distance_embedding = nn.Embedding(NUM_BUCKETS, distance_dimension)
        self.pair_dimension = 3 * mention_dimension + distance_dimension
        layers, width = [], self.pair_dimension
        for _ in range(hidden_layers):
            layers += [nn.Linear(width, hidden_size), nn.ReLU(), nn.Dropout(dropout)]
            width = hidden_size
        layers.append(nn.Linear(width, 1))
        self.ffnn = nn.Sequential(*layers)

    def pair_repr(self, antecedent, anaphor, mention_distance: int) -> PairRepr:
        m_i, m_j = _vector(antecedent), _vector(anaphor)
        bucket = distance_bucket(mention_distance)
        distance = self.distance_embedding(torch.tensor(bucket, device=m_i.device))
        return PairRepr(vector=torch.cat([m_i, m_j, m_i * m_j, distance], dim=-1), distance_bucket=bucket)

    def pair_reprs(self, antecedents: torch.Tensor, anaphor: torch.Tensor, distances: Sequence[int]) -> torch.Tensor:
        """Batched pair_repr: antecedents [C, M], anaphor [M] -> [C, pair_dimension]"""
        buckets = torch.tensor([distance_bucket(d) for d in distances], dtype=torch.long, device=antecedents.device)
        target = anaphor.unsqueeze(0).expand_as(antecedents)
        return torch.cat([antecedents, target, antecedents * target, self.distance_embedding(buckets)], dim=-1)

    def pair_logits(self, pairs: torch.Tensor) -> torch.Tensor:
        logits = self.ffnn(pairs).squeeze(-1)
        if not torch.isfinite(logits).all():
            raise NonFiniteScoreError(f"Non-finite pair logits for {int((~torch.isfinite(logits)).sum())} pairs")
        return logits

    def pair_logit(self, pair: Union[PairRepr, torch.Tensor]) -> torch.Tensor:
        vector = pair.vector if isinstance(pair, PairRepr) else pair
        return self.pair_logits(vector.unsqueeze(0))[0]
