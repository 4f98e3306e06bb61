from typing import List


class CorpusError(ValueError):
    """Base class for corpus data problems"""


class CorpusFormatError(CorpusError):
    def __init__(self, path, line_number: int, reason: str):
        self.path = str(path)
        self.line_number = line_number
        super().__init__(f"{self.path}:{line_number}: {reason}")


class CorpusValidationError(CorpusError):
    def __init__(self, doc_id: str, violations: List[str]):
        self.doc_id = doc_id
        self.violations = list(violations)
        super().__init__(f"Document '{doc_id}' is invalid: " + "; ".join(self.violations))


class UnknownMentionError(CorpusError, KeyError):
    def __init__(self, doc_id: str, mention_id: str):
        self.doc_id = doc_id
        self.mention_id = mention_id
        super().__init__(f"Mention '{mention_id}' not found in document '{doc_id}'")

    def __str__(self):
        return self.args[0]


class InfeasibleConfigError(CorpusError):
    """Raised when a synthetic corpus cannot be laid out with the requested sizes"""
