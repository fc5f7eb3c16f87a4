import pytest

from carnot.cli import builtin_corpus, load_algebra


@pytest.fixture(scope="session")
def corpus():
    return {name: load_algebra("builtin:" + name) for name in builtin_corpus()}


@pytest.fixture(scope="session")
def heisenberg(corpus):
    return corpus["heisenberg1"]


@pytest.fixture(scope="session")
def heisenberg2(corpus):
    return corpus["heisenberg2"]


@pytest.fixture(scope="session")
def engel(corpus):
    return corpus["engel"]


@pytest.fixture(scope="session")
def abelian(corpus):
    return corpus["abelian_r3"]


@pytest.fixture(scope="session")
def free32(corpus):
    return corpus["free32"]
