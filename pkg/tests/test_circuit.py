import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hquery import circuit as C_
from hquery import pdb
from hquery.analysis import SHARP_P_HARD
from hquery.boolfun import BoolFun, all_functions, euler, parse_function
from hquery.circuit import CERTIFIED, SEMANTIC, Circuit, CircuitBuilder
from hquery.errors import ArityError, InputError, NotCompilableError, ParseError, UncheckedCircuitError
from hquery.fragment import Fragmentation, Template
from hquery.obdd import degenerate_compile

from conftest import functions_k, random_db, random_euler_zero


def db1():
    return pdb.parse_db("R a 1/2\nS1 a a 1/3\nT a 1/5\n", k=1)


def test_trivial_circuits():
    D = db1()
    b = CircuitBuilder()
    assert C_.probability(b.build(b.true(), 3), D) == 1
    assert C_.probability(b.build(b.false(), 3), D) == 0
    v = b.var("R(a)")
    assert C_.probability(b.build(v, 3), D) == Fraction(1, 2)
    assert C_.probability(b.build(b.neg(v), 3), D) == Fraction(1, 2)
    g = b.and_([v, b.var("T(a)")])
    assert C_.probability(b.build(g, 3), D) == Fraction(1, 10)
    assert C_.evaluate(b.build(g, 3), 0b101, D)
    assert not C_.evaluate(b.build(g, 3), 0b001, D)


def test_constant_folding():
    b = CircuitBuilder()
    v = b.var("R(a)")
    assert b.and_([v, b.true()]) == v
    assert b.and_([v, b.false()]) == b.false()
    assert b.or_([b.false(), v]) == v
    assert b.neg(b.true()) == b.false()
    assert b.neg(b.neg(v)) != v  # no double-negation collapse
    assert b.var("R(a)") == v


def test_checks_and_refusals():
    D = db1()
    b = CircuitBuilder()
    x, y = b.var("R(a)"), b.var("T(a)")
    overlap = b.build(b.or_([x, y]), 3)
    assert C_.check_decomposable(overlap)
    assert not C_.check_deterministic(overlap, SEMANTIC)
    assert not C_.check_deterministic(overlap, CERTIFIED)
    with pytest.raises(UncheckedCircuitError):
        C_.probability(overlap, D)
    assert C_.probability(overlap, D, unchecked=True) == Fraction(1, 2) + Fraction(1, 5)
    shared = b.build(b.and_([x, b.or_([x, y])]), 3)
    assert not C_.check_decomposable(shared)
    with pytest.raises(UncheckedCircuitError):
        C_.probability(shared, D)
    disjoint = b.build(b.or_([x, b.and_([b.neg(x), y])], cert=(C_.DECISION, "R(a)")), 3)
    assert C_.verify(disjoint) == (True, SEMANTIC)
    assert C_.check_deterministic(disjoint, CERTIFIED)
    assert C_.probability(disjoint, D) == Fraction(1, 2) + Fraction(1, 2) * Fraction(1, 5)


def test_circuit_validation():
    with pytest.raises(ValueError):
        Circuit((("n", 0),), 0)
    with pytest.raises(ValueError):
        Circuit((("t",),), 1)
    with pytest.raises(ValueError):
        Circuit((("x",),), 0)


def test_compose_single_hole(rnd):
    D = random_db(2, rnd)
    phi = parse_function("k 2\nformula 0 & 1")
    leaf = degenerate_compile(phi, D)
    frag = Fragmentation(Template.single(), (phi,))
    assert C_.compose_template(frag, [leaf]) == leaf
    with pytest.raises(ArityError):
        C_.compose_template(frag, [leaf, leaf])


def test_compose_disjunction(p9, rnd):
    D = random_db(3, rnd, keep=0.6)
    leaves = [parse_function(f"k 3\nformula {f}") for f in ("0&!2&3", "!1&2&3", "!0&1&3", "0&1&2")]
    frag = Fragmentation(Template.disjunction(4), tuple(leaves))
    circ = C_.compose_template(frag, [degenerate_compile(l, D) for l in leaves])
    assert C_.verify(circ)[0]
    assert C_.probability(circ, D) == pdb.oracle_pqe(p9, D)


def test_negate_circuit(rnd):
    D = random_db(1, rnd)
    phi = BoolFun.from_sat(1, [[0], [0, 1]])
    c = degenerate_compile(phi, D)
    n = C_.negate_circuit(c)
    assert C_.probability(n, D) == 1 - C_.probability(c, D)


def test_compile_rejects_nonzero_euler():
    phi = BoolFun.from_sat(1, [[0, 1]])
    with pytest.raises(NotCompilableError) as ei:
        C_.compile_query(phi, db1())
    assert ei.value.euler == 1
    assert ei.value.verdict.kind == SHARP_P_HARD


def test_compile_examples(p9, no_pm):
    rnd = random.Random(5)
    D = random_db(3, rnd, keep=0.5)
    c = C_.compile_query(p9, D)
    assert C_.probability(c, D) == pdb.oracle_pqe(p9, D)
    D4 = random_db(4, rnd, domain=("a",))
    c = C_.compile_query(no_pm, D4)
    assert C_.verify(c)[0]
    assert C_.probability(c, D4) == pdb.oracle_pqe(no_pm, D4)


def test_compile_exhaustive_k1(rnd):
    D = random_db(1, rnd)
    for phi in all_functions(1):
        if euler(phi) == 0:
            c = C_.compile_query(phi, D)
            assert C_.check_decomposable(c) and C_.check_deterministic(c, CERTIFIED)
            assert C_.probability(c, D) == pdb.oracle_pqe(phi, D)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_compile_random_k2(seed):
    rnd = random.Random(seed)
    phi = random_euler_zero(2, rnd)
    D = random_db(2, rnd, keep=0.8)
    c = C_.compile_query(phi, D)
    assert C_.check_deterministic(c, SEMANTIC) == C_.check_deterministic(c, CERTIFIED) is True
    assert C_.probability(c, D) == pdb.oracle_pqe(phi, D)
    for _ in range(10):
        w = rnd.getrandbits(len(D))
        assert C_.evaluate(c, w, D) == pdb.query_holds(phi, w, D)


def test_ddc_round_trip(p9, rnd):
    D = random_db(3, rnd, keep=0.5)
    c = C_.compile_query(p9, D)
    text = C_.export_circuit(c)
    back = C_.import_circuit(text)
    assert back == c
    assert C_.probability(back, D) == C_.probability(c, D)


@pytest.mark.parametrize("text", [
    "",
    "ddc v2\nfacts 1\n0 t\nroot 0\n",
    "ddc v1\nfacts 1\n0 n 1\n1 t\nroot 0\n",
    "ddc v1\nfacts 1\n0 x\nroot 0\n",
    "ddc v1\nfacts 1\n0 t\nroot 3\n",
    "ddc v1\nfacts 1\n1 t\nroot 0\n",
    "ddc v1\nfacts 1\n0 v R(a)\n1 v T(a)\n2 a 2 0 1\nroot 2\n",
    "ddc v1\nfacts 2\n0 v R(a)\n1 a 2 0\nroot 1\n",
])
def test_ddc_errors(text):
    with pytest.raises(ParseError):
        C_.import_circuit(text)


def test_unknown_label_in_db():
    b = CircuitBuilder()
    c = b.build(b.var("R(zz)"), 1)
    with pytest.raises(InputError):
        C_.probability(c, db1())
