import pytest

from kcausal import explicit_space


@pytest.fixture
def chain2():
    return explicit_space(["a", "b"], [("a", "b")])


@pytest.fixture
def chain3():
    return explicit_space(["a", "b", "c"], [("a", "b"), ("b", "c")])


@pytest.fixture
def antichain2():
    return explicit_space(["a", "b"], [])


@pytest.fixture
def diamond():
    # a < b, a < c, b < d, c < d; b and c incomparable
    return explicit_space(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])


@pytest.fixture
def cyclic2():
    return explicit_space(["a", "b"], [("a", "b"), ("b", "a")])
