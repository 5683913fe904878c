import sys
import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from hquery.boolfun import BoolFun, euler
from hquery.pdb import TidDatabase
from hquery.selftest import phi9, phi_no_pm


def functions(kmin=1, kmax=3):
    return st.integers(kmin, kmax).flatmap(
        lambda k: st.integers(0, (1 << (1 << (k + 1))) - 1).map(lambda t: BoolFun(k, t)))


def functions_k(k):
    return st.integers(0, (1 << (1 << (k + 1))) - 1).map(lambda t: BoolFun(k, t))


def random_euler_zero(k, rnd):
    """Uniform over euler-zero functions by rejection."""
    while True:
        f = BoolFun(k, rnd.getrandbits(1 << (k + 1)))
        if euler(f) == 0:
            return f


def random_db(k, rnd, domain=("a", "b"), keep=1.0, denom=7):
    D = TidDatabase.full(k, list(domain), [Fraction(rnd.randint(0, denom), denom) for _ in range(64)])
    if keep < 1.0:
        D = TidDatabase.build(k, [f for f in D.facts if rnd.random() < keep])
    return D


@pytest.fixture
def rnd():
    return random.Random(12345)


@pytest.fixture
def p9():
    return phi9()


@pytest.fixture
def no_pm():
    return phi_no_pm()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
