"""Token and mention representations.

x_t is the BiLSTM output over concatenated provider embeddings. A mention
(b, e) is represented as [x_b; x_e; h; phi(width)] where h is the
attention-weighted sum of the span's token vectors.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import torch
import torch.nn as nn

from corpus.model import Document
from encoder.buckets import NUM_BUCKETS, width_bucket
from encoder.embedding_providers import EmbeddingDimensionError, EmbeddingProvider


@dataclass
class TokenRepr:
    vectors: torch.Tensor  # [T, d_tok]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


@dataclass
class MentionRepr:
    vector: torch.Tensor
    head: torch.Tensor
    width_bucket: int


class MentionEncoder(nn.Module):
    def __init__(self,
                 providers: Sequence[EmbeddingProvider],
                 hidden_size: int = 200,
                 head_hidden_size: int = 150,
                 width_dimension: int = 20,
                 dropout: float = 0.2,
                 lexical_dropout: float = 0.5):
        super().__init__()
        if not providers:
            raise ValueError("MentionEncoder needs at least one embedding provider")
        self.providers = nn.ModuleList(providers)
        input_dimension = sum(p.dimension for p in providers)
        self.lexical_dropout = nn.Dropout(lexical_dropout)
        self.context = nn.LSTM(input_dimension, hidden_size, batch_first=True, bidirectional=True)
        self.dropout = nn.Dropout(dropout)
        self.token_dimension = 2 * hidden_size
        if head_hidden_size > 0:
            self.head_scorer = nn.Sequential(
                nn.Linear(self.token_dimension, head_hidden_size),
                nn.ReLU(),
                nn.Linear(head_hidden_size, 1),
            )
        else:
            self.head_scorer = nn.Linear(self.token_dimension, 1)
        self.width_embedding = nn.Embedding(NUM_BUCKETS, width_dimension)
        self.width_dimension = width_dimension

    @property
    def mention_dimension(self) -> int:
        return 3 * self.token_dimension + self.width_dimension

    def embed_tokens(self, doc: Document) -> TokenRepr:
        pieces = []
        for provider in self.providers:
            vectors = provider.embed(doc)
            if vectors.dim() != 2 or vectors.shape[1] != provider.dimension or vectors.shape[0] != len(doc.tokens):
                raise EmbeddingDimensionError(
                    f"{provider.get_name()} returned shape {tuple(vectors.shape)} for '{doc.doc_id}', "
                    f"expected ({len(doc.tokens)}, {provider.dimension})"
                )
            pieces.append(vectors)
        weight = self.context.weight_ih_l0
        embedded = self.lexical_dropout(torch.cat(pieces, dim=-1).to(dtype=weight.dtype))
        outputs, _ = self.context(embedded.unsqueeze(0))
        return TokenRepr(self.dropout(outputs.squeeze(0)))

    def head_scores(self, x: TokenRepr) -> torch.Tensor:
        """alpha_t for every token, shape [T]"""
        return self.head_scorer(x.vectors).squeeze(-1)

    def attention_weights(self, start: int, end: int, x: TokenRepr) -> torch.Tensor:
        alpha = self.head_scorer(x.vectors[start:end + 1]).squeeze(-1)
        return torch.softmax(alpha, dim=0)

    def head_attention(self, start: int, end: int, x: TokenRepr) -> torch.Tensor:
        weights = self.attention_weights(start, end, x)
        return weights @ x.vectors[start:end + 1]

    def mention_repr(self, start: int, end: int, x: TokenRepr) -> MentionRepr:
        head = self.head_attention(start, end, x)
        bucket = width_bucket(end - start + 1)
        width = self.width_embedding(torch.tensor(bucket, device=x.vectors.device))
        vector = torch.cat([x.vectors[start], x.vectors[end], head, width], dim=-1)
        return MentionRepr(vector=vector, head=head, width_bucket=bucket)

    def encode_mentions(self, x: TokenRepr, spans: List[Tuple[int, int]]) -> torch.Tensor:
        """Batched mention_repr for many spans, shape [N, mention_dimension]"""
        if not spans:
            return x.vectors.new_zeros((0, self.mention_dimension))
        device = x.vectors.device
        starts = torch.tensor([s for s, _ in spans], dtype=torch.long, device=device)
        ends = torch.tensor([e for _, e in spans], dtype=torch.long, device=device)
        widths = ends - starts
        offsets = torch.arange(int(widths.max()) + 1, device=device).unsqueeze(0)
        mask = offsets <= widths.unsqueeze(1)
        indices = torch.minimum(starts.unsqueeze(1) + offsets, ends.unsqueeze(1))

        alpha = self.head_scores(x)[indices].masked_fill(~mask, float("-inf"))
        weights = torch.softmax(alpha, dim=1)
        heads = (weights.unsqueeze(-1) * x.vectors[indices]).sum(dim=1)

        buckets = torch.tensor([width_bucket(e - s + 1) for s, e in spans], dtype=torch.long, device=device)
        return torch.cat([x.vectors[starts], x.vectors[ends], heads, self.width_embedding(buckets)], dim=-1)
