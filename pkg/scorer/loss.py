from typing import Iterable, List, Mapping, Sequence, Union

import torch


def gold_candidate_mask(candidates: Sequence[str], clusters: Mapping[str, int],
                        gold_antecedents: Iterable[str]) -> List[bool]:
    """A candidate is correct when it shares a gold cluster with any gold antecedent."""
    gold_clusters = {clusters[a] for a in gold_antecedents}
    return [clusters[c] in gold_clusters for c in candidates]


def marginal_loss(logits: torch.Tensor, correct: Union[torch.Tensor, Sequence[bool]],
                  epsilon_logit: Union[float, torch.Tensor] = 0.0) -> torch.Tensor:
    """Negative marginal log-likelihood of the correct candidates.

    The softmax runs over the candidates plus the dummy antecedent; when no
    candidate is correct the dummy is the only gold entry.
    """
    correct = torch.as_tensor(correct, dtype=torch.bool, device=logits.device).reshape(-1)
    epsilon = torch.as_tensor(epsilon_logit, dtype=logits.dtype, device=logits.device).reshape(1)
    scores = torch.cat([epsilon, logits.reshape(-1)])
    gold = torch.cat([(~correct.any()).reshape(1), correct])
    return torch.logsumexp(scores, dim=0) - torch.logsumexp(scores[gold], dim=0)
