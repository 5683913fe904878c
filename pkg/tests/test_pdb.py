from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hquery import pdb
from hquery.boolfun import BoolFun
from hquery.errors import ArityError, GuardError, ParseError
from hquery.pdb import Fact, TidDatabase

from conftest import functions_k, random_db


def test_parse_examples():
    D = pdb.parse_db("R a 1/2\nS1 a a 1/2", k=1)
    assert len(D) == 2 and D.domain == ("a",)
    assert pdb.parse_db("R a 0.25\n").facts[0].prob == Fraction(1, 4)
    D = pdb.parse_db("# c\nS2 a b 1/3  # trailing\nT b 1\n")
    assert D.k == 2 and D.labels == ["S2(a,b)", "T(b)"]


@pytest.mark.parametrize("text", ["S1 a 1/2", "R a 3/2", "Q a 1/2", "R a 1/2\nR a 1/3", "R a x", "R a 1e-2"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        pdb.parse_db(text)


def test_k_validation():
    with pytest.raises(ArityError):
        pdb.parse_db("S3 a a 1/2", k=2)
    with pytest.raises(ArityError):
        Fact("S1", ("a",))


def test_h_satisfied():
    D = TidDatabase.full(1, ["a", "b"])
    w = (1 << D.index("R", "a")) | (1 << D.index("S1", "a", "a"))
    assert pdb.h_satisfied(0, w, D)
    assert not any(pdb.h_satisfied(i, 0, D) for i in range(2))
    w = 1 << D.index("S1", "a", "b")
    assert not pdb.h_satisfied(1, w, D)


def test_query_holds(p9):
    D = TidDatabase.full(3, ["a"])
    assert pdb.query_holds(BoolFun.top(3), 0, D)
    assert not pdb.query_holds(BoolFun.bottom(3), (1 << len(D)) - 1, D)
    # exactly h0 and h3: R(a), S1(a,a), S3(a,a), T(a)
    w = sum(1 << D.index(*f) for f in [("R", "a"), ("S1", "a", "a"), ("S3", "a", "a"), ("T", "a")])
    assert pdb.world_valuation(w, D) == 0b1001
    assert pdb.query_holds(p9, w, D)


def test_world_probability():
    D = pdb.parse_db("R a 1\nT a 1\n")
    assert pdb.world_probability(D, 3) == 1
    D = pdb.parse_db("R a 1/2\nT a 1/2\n")
    assert all(pdb.world_probability(D, w) == Fraction(1, 4) for w in range(4))
    D = pdb.parse_db("R a 1/3\nT a 2/7\nS1 a a 1/5\n")
    assert sum(pdb.world_probability(D, w) for w in pdb.worlds(D)) == 1


def test_oracle_examples():
    D = pdb.parse_db("R a 1/2\nS1 a a 1/2\n", k=1)
    assert pdb.oracle_pqe(BoolFun.bottom(1), D) == 0
    assert pdb.oracle_pqe(BoolFun.top(1), D) == 1
    h0 = BoolFun.from_sat(1, [[0], [0, 1]])
    assert pdb.oracle_pqe(h0, D) == Fraction(1, 4)
    assert pdb.lineage_table(BoolFun.bottom(1), D) == 0
    # lineage of h0 is R(a) & S1(a,a): only the world with both facts
    assert pdb.lineage_table(h0, D) == 0b1000


def test_guards():
    D = TidDatabase.full(2, ["a", "b", "c"])  # 3 + 18 + 3 facts
    with pytest.raises(GuardError):
        pdb.lineage_table(BoolFun.top(2), D)
    with pytest.raises(GuardError):
        pdb.oracle_pqe(BoolFun.top(2), D, max_facts=20)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda k: st.tuples(functions_k(k), st.integers(0, 10 ** 6))))
def test_fast_oracle_matches_naive(args):
    phi, seed = args
    import random

    rnd = random.Random(seed)
    D = random_db(phi.k, rnd, keep=0.6 if phi.k == 3 else 1.0)
    if len(D) > 12:
        D = TidDatabase.build(phi.k, D.facts[:12])
    p = pdb.oracle_pqe(phi, D)
    assert p == pdb.naive_oracle(phi, D)
    assert pdb.oracle_pqe(~phi, D) == 1 - p


def test_weighted_count_is_lineage_sum(rnd):
    D = random_db(2, rnd)
    phi = BoolFun(2, 0b01101001)
    t = pdb.lineage_table(phi, D)
    direct = sum(pdb.world_probability(D, w) for w in range(1 << len(D)) if t >> w & 1)
    assert pdb.weighted_count(t, [f.prob for f in D.facts]) == direct


def test_high_fact_enumeration(monkeypatch, rnd):
    # force the split path on a small database and compare with the naive sum
    D = random_db(1, rnd)
    phi = BoolFun(1, 0b0110)
    want = pdb.naive_oracle(phi, D)
    monkeypatch.setattr(pdb, "LINEAGE_MAX_FACTS", 5)
    assert pdb.oracle_pqe(phi, D) == want


def test_monotone_in_world(rnd):
    D = random_db(2, rnd, keep=0.7)
    n = len(D)
    for _ in range(200):
        w = rnd.getrandbits(n)
        w2 = w | (1 << rnd.randrange(n))
        for i in range(3):
            assert pdb.h_satisfied(i, w, D) <= pdb.h_satisfied(i, w2, D)


def test_round_trip_text(rnd):
    D = random_db(3, rnd)
    assert pdb.parse_db(D.to_text(), 3) == D


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6).flatmap(lambda n: st.tuples(
    st.integers(0, (1 << (1 << n)) - 1),
    st.lists(st.fractions(0, 1, max_denominator=9), min_size=n, max_size=n))))
def test_weighted_count_small(args):
    table, probs = args
    want = Fraction(0)
    for w in range(1 << len(probs)):
        if table >> w & 1:
            p = Fraction(1)
            for i, q in enumerate(probs):
                p *= q if w >> i & 1 else 1 - q
            want += p
    assert pdb.weighted_count(table, probs) == want
