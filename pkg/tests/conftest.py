import pytest

from porolab.corpus import get, load_corpus
from porolab.germ import load


def x_power(n: int):
    """x_n for x_1 = 1/2, x_{n+1} = x_n^2, i.e. 2^(-2^(n-1))."""
    from porolab.exact import Rational
    return Rational.power(2, -(2 ** (n - 1)))


@pytest.fixture(scope="session")
def F1():
    return get("f1")


@pytest.fixture(scope="session")
def F2():
    return get("f2")


@pytest.fixture(scope="session")
def F3():
    return get("f3")


@pytest.fixture(scope="session")
def F5():
    return get("f5")


@pytest.fixture(scope="session")
def GEO():
    return get("geo")


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture
def make():
    return lambda shape, **kw: load("set T { shape = %s }" % shape)
