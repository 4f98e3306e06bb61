"""Split-antecedent resolver: mention encoder + pairwise scorer."""
from typing import Dict, List, Optional, Sequence, Tuple

import torch
import torch.nn as nn

from corpus.candidates import DEFAULT_WINDOW, candidate_antecedents, mention_distance
from corpus.model import Document
from encoder.embedding_providers import build_providers
from encoder.mention_encoder import MentionEncoder
from encoder.vocabulary import Vocabulary
from scorer.loss import gold_candidate_mask, marginal_loss
from scorer.pair_scorer import PairScore, PairScorer, pair_prob
from scorer.selection import select_antecedents

CandidateLogits = Dict[str, Tuple[List[str], torch.Tensor]]


class SplitAntecedentResolver(nn.Module):
    def __init__(self, encoder: MentionEncoder, scorer: PairScorer,
                 max_candidates: int = DEFAULT_WINDOW, train_on_all_mentions: bool = True):
        super().__init__()
        self.encoder = encoder
        self.scorer = scorer
        self.max_candidates = max_candidates
        self.train_on_all_mentions = train_on_all_mentions

    @classmethod
    def from_config(cls, config, vocabulary: Vocabulary) -> "SplitAntecedentResolver":
        """Build from a training.config.ModelConfig"""
        encoder = MentionEncoder(
            build_providers(config.embeddings, vocabulary),
            hidden_size=config.lstm_hidden,
            head_hidden_size=config.head_hidden,
            width_dimension=config.width_dimension,
            dropout=config.dropout,
            lexical_dropout=config.lexical_dropout,
        )
        scorer = PairScorer(
            encoder.mention_dimension,
            distance_dimension=config.distance_dimension,
            hidden_size=config.ffnn_hidden,
            hidden_layers=config.ffnn_layers,
            dropout=config.dropout,
        )
        return cls(encoder, scorer, max_candidates=config.max_candidates,
                   train_on_all_mentions=config.train_on_all_mentions)

    def score_document(self, doc: Document, anaphors: Sequence[str]) -> CandidateLogits:
        """Candidate ids (nearest first) and pair logits for every requested anaphor."""
        if not anaphors:
            return {}
        x = self.encoder.embed_tokens(doc)
        mentions = doc.ordered_mentions
        vectors = self.encoder.encode_mentions(x, [m.span for m in mentions])
        row = doc.mention_rank

        plans, pieces = [], []
        for anaphor in anaphors:
            candidates = candidate_antecedents(doc, anaphor, self.max_candidates)
            plans.append((anaphor, candidates))
            if candidates:
                rows = torch.tensor([row[c] for c in candidates], dtype=torch.long, device=vectors.device)
                distances = [mention_distance(doc, c, anaphor) for c in candidates]
                pieces.append(self.scorer.pair_reprs(vectors[rows], vectors[row[anaphor]], distances))

        logits = self.scorer.pair_logits(torch.cat(pieces)) if pieces else vectors.new_zeros(0)
        scored, offset = {}, 0
        for anaphor, candidates in plans:
            scored[anaphor] = (candidates, logits[offset:offset + len(candidates)])
            offset += len(candidates)
        return scored

    def training_anaphors(self, doc: Document) -> List[str]:
        if self.train_on_all_mentions:
            return [m.id for m in doc.ordered_mentions]
        return sorted(doc.split_anaphors, key=doc.mention_rank.__getitem__)

    def document_loss(self, doc: Document) -> Tuple[torch.Tensor, int]:
        """Summed marginal loss over the document's training anaphors and how many contributed."""
        anaphors = [a for a in self.training_anaphors(doc) if doc.mention_rank[a] > 0]
        scored = self.score_document(doc, anaphors)
        total, count = None, 0
        for anaphor in anaphors:
            candidates, logits = scored[anaphor]
            if not candidates:
                continue
            gold = doc.split_anaphors.get(anaphor, [])
            correct = gold_candidate_mask(candidates, doc.cluster_map, gold)
            loss = marginal_loss(logits, correct)
            total = loss if total is None else total + loss
            count += 1
        if total is None:
            total = sum(p.sum() for p in self.parameters()) * 0.0
        return total, count

    @torch.no_grad()
    def pair_scores(self, doc: Document, anaphors: Optional[Sequence[str]] = None) -> Dict[str, List[PairScore]]:
        anaphors = list(doc.split_anaphors) if anaphors is None else list(anaphors)
        scored = self.score_document(doc, anaphors)
        result = {}
        for anaphor in anaphors:
            candidates, logits = scored[anaphor]
            result[anaphor] = [
                PairScore(anaphor=anaphor, candidate=c, logit=float(r), probability=pair_prob(float(r)))
                for c, r in zip(candidates, logits.tolist())
            ]
        return result

    def predict(self, doc: Document) -> Dict[str, Tuple[List[str], List[float]]]:
        """Selected antecedents and their probabilities for every gold split anaphor."""
        predictions = {}
        for anaphor, scores in self.pair_scores(doc).items():
            selected = select_antecedents(scores, doc.cluster_map)
            probability = {s.candidate: s.probability for s in scores}
            predictions[anaphor] = (selected, [probability[c] for c in selected])
        return predictions
