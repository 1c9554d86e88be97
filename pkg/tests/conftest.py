"""Shared fixtures: a small synthetic corpus and a classifier trained on
it, reused by the similarity, corpus and CLI tests.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from clonescope.corpus import FunctionCache, make_tree_pairs, synthesize_clones
from clonescope.gbdt import HyperPoint, train
from clonescope.templates import make_demo_templates

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def small_corpus():
    templates = make_demo_templates(12, seed=7)
    records = synthesize_clones([source for _, source in templates], seed=3)
    return templates, records


@pytest.fixture(scope="session")
def function_cache():
    return FunctionCache()


@pytest.fixture(scope="session")
def small_model(small_corpus, function_cache):
    _, records = small_corpus
    pairs = make_tree_pairs(records, seed=3, cache=function_cache)
    hyper = HyperPoint(num_rounds=60, num_leaves=24, max_depth=6, min_samples_leaf=5)
    return train(pairs, hyper, seed=11)


@pytest.fixture(scope="session")
def fig4_sources():
    return (
        (DATA_DIR / "batch_transfer.sol").read_text(),
        (DATA_DIR / "transfer_proxy.sol").read_text(),
    )
