"""Shared fixtures: the builtin corpus, session-wide so memoized lattices,
quotients and link certificates amortize across test modules."""

import pytest

from finalg.corpus import builtin_corpus
from finalg.verify import build_bridge_pool


@pytest.fixture(scope="session")
def corpus():
    entries = builtin_corpus()
    assert len(entries) == 7
    return entries


@pytest.fixture(scope="session")
def by_name(corpus):
    return {e.algebra.name: e.algebra for e in corpus}


@pytest.fixture(scope="session")
def z2aff(by_name):
    return by_name["z2aff"]


@pytest.fixture(scope="session")
def z3aff(by_name):
    return by_name["z3aff"]


@pytest.fixture(scope="session")
def z4aff(by_name):
    return by_name["z4aff"]


@pytest.fixture(scope="session")
def s2(by_name):
    return by_name["s2"]


@pytest.fixture(scope="session")
def lat2(by_name):
    return by_name["lat2"]


@pytest.fixture(scope="session")
def z2aff_sq(by_name):
    return by_name["z2aff_sq"]


@pytest.fixture(scope="session")
def z2s2(by_name):
    return by_name["z2s2"]


@pytest.fixture(scope="session")
def pool(corpus):
    return build_bridge_pool(corpus)
