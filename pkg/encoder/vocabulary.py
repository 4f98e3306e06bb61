from collections import Counter
from typing import Dict, Iterable, List

from corpus.model import Corpus

UNKNOWN = "<unk>"


class Vocabulary:
    """Word and character indices; index 0 is the unknown entry of each table."""

    def __init__(self, words: List[str], chars: List[str]):
        self.words = [UNKNOWN] + [w for w in words if w != UNKNOWN]
        self.chars = [UNKNOWN] + [c for c in chars if c != UNKNOWN]
        self._word_index: Dict[str, int] = {w: i for i, w in enumerate(self.words)}
        self._char_index: Dict[str, int] = {c: i for i, c in enumerate(self.chars)}

    @classmethod
    def from_corpora(cls, corpora: Iterable[Corpus], min_count: int = 1) -> "Vocabulary":
        word_counts = Counter()
        char_counts = Counter()
        for corpus in corpora:
            for doc in corpus:
                word_counts.update(doc.tokens)
                for token in doc.tokens:
                    char_counts.update(token)
        words = sorted(w for w, n in word_counts.items() if n >= min_count)
        return cls(words=words, chars=sorted(char_counts))

    def word_id(self, word: str) -> int:
        return self._word_index.get(word, 0)

    def char_id(self, char: str) -> int:
        return self._char_index.get(char, 0)

    def word_ids(self, tokens: List[str]) -> List[int]:
        return [self.word_id(t) for t in tokens]

    def __len__(self) -> int:
        return len(self.words)

    @property
    def char_count(self) -> int:
        return len(self.chars)

    def to_dict(self) -> dict:
        return {"words": self.words[1:], "chars": self.chars[1:]}

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        return cls(words=list(data["words"]), chars=list(data["chars"]))
