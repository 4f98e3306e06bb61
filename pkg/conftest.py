import os

import hypothesis
import numpy as np
import pytest
import torch

from corpus.model import BridgingLink, BridgingRelation, Corpus, CrowdAnnotation, Document, Mention
from corpus.synthetic import SyntheticConfig, generate_synthetic
from encoder.vocabulary import Vocabulary

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running training checks (deselect with -m 'not slow')")


def build_doc(mentions, clusters=None, split_anaphors=None, tokens=None, doc_id="d1", bridging=(), crowd=()):
    """Document from {id: (start, end)}; clusters default to singletons and tokens to t0..tN"""
    mentions = [Mention(id=m, start=s, end=e) for m, (s, e) in mentions.items()]
    if tokens is None:
        tokens = [f"t{i}" for i in range(max(m.end for m in mentions) + 2)]
    return Document(
        doc_id=doc_id,
        tokens=list(tokens),
        mentions=mentions,
        clusters=[list(c) for c in clusters] if clusters is not None else [[m.id] for m in mentions],
        split_anaphors={a: list(ants) for a, ants in (split_anaphors or {}).items()},
        bridging=[BridgingLink(a, b, BridgingRelation(r)) for a, b, r in bridging],
        crowd=[CrowdAnnotation(who, a, tuple(ants)) for who, a, ants in crowd],
    )


@pytest.fixture
def make_doc():
    return build_doc


@pytest.fixture
def simple_doc():
    """x, y, z precede the plural anaphor 'they'; b corefers with 'they'."""
    return build_doc(
        {"x": (0, 0), "y": (2, 2), "z": (4, 4), "a": (6, 6), "b": (8, 8)},
        clusters=[["x"], ["y"], ["z"], ["a", "b"]],
        split_anaphors={"a": ["x", "y"]},
        tokens=["John", "and", "Mary", "met", "Sue", ".", "They", "left", "they", "."],
    )


@pytest.fixture
def small_synthetic_config():
    return SyntheticConfig(num_documents=6, tokens_per_document=80, mention_density=0.2,
                           split_anaphor_rate=0.2, seed=3, name="tiny")


@pytest.fixture
def small_synthetic(small_synthetic_config) -> Corpus:
    return generate_synthetic(small_synthetic_config)


@pytest.fixture
def vocabulary(small_synthetic) -> Vocabulary:
    return Vocabulary.from_corpora([small_synthetic])


@pytest.fixture(autouse=True)
def _seed_torch():
    torch.manual_seed(0)
