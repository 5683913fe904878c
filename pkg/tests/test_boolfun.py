import itertools

import pytest
from hypothesis import given, settings

from hquery.boolfun import (
    MAX_K,
    BoolFun,
    all_functions,
    combine,
    dependencies,
    eval_cnf,
    eval_dnf,
    euler,
    flip,
    format_function,
    is_degenerate,
    is_disjoint,
    is_monotone,
    minimized_cnf,
    minimized_dnf,
    parity_masks,
    parse_function,
    valuation,
    var_mask,
)
from hquery.errors import ArityError, NotMonotoneError, ParseError

from conftest import functions

S = frozenset


def from_sat(k, *sets):
    return BoolFun.from_sat(k, [list(s) for s in sets])


def test_flip():
    assert flip(0, 0) == valuation([0])
    assert flip(valuation([0]), 0) == 0
    assert flip(valuation([0, 3]), 1) == valuation([0, 1, 3])
    with pytest.raises(ArityError):
        flip(0, 4, k=3)


def test_masks_match_definition():
    for n in range(1, 6):
        even, odd = parity_masks(n)
        for nu in range(1 << n):
            assert bool(even >> nu & 1) == (bin(nu).count("1") % 2 == 0)
            assert bool(odd >> nu & 1) == (bin(nu).count("1") % 2 == 1)
            for l in range(n):
                assert bool(var_mask(n, l) >> nu & 1) == bool(nu >> l & 1)


def test_euler_examples(p9):
    assert euler(BoolFun.bottom(2)) == 0
    assert euler(p9) == 0
    max_euler = BoolFun.from_sat(3, [nu for nu in range(16) if bin(nu).count("1") % 2 == 0])
    assert euler(max_euler) == 8


def test_dependencies_examples(p9):
    assert dependencies(BoolFun.top(2)) == frozenset()
    assert dependencies(BoolFun.variable(1, 0)) == {0}
    assert dependencies(p9) == {0, 1, 2, 3}
    assert is_degenerate(BoolFun.bottom(1))
    assert not is_degenerate(p9)
    assert is_degenerate(from_sat(1, [], [0]))


def test_monotone_examples(p9):
    assert is_monotone(BoolFun.top(1))
    assert is_monotone(p9)
    assert not is_monotone(from_sat(1, []))


def test_minimized_forms(p9):
    assert minimized_dnf(from_sat(1, [0, 1])) == [S({0, 1})]
    assert minimized_dnf(p9) == [S({0, 3}), S({1, 3}), S({2, 3}), S({0, 1, 2})]
    assert minimized_dnf(BoolFun.top(2)) == [S()]
    # expected clauses in any order: (2|3)&(0|3)&(1|3)&(0|1|2)
    assert set(minimized_cnf(p9)) == {S({2, 3}), S({0, 3}), S({1, 3}), S({0, 1, 2})}
    assert minimized_cnf(from_sat(1, [0, 1])) == [S({0}), S({1})]
    assert minimized_cnf(BoolFun.bottom(1)) == [S()]
    assert minimized_dnf(BoolFun.bottom(1)) == []
    assert minimized_cnf(BoolFun.top(1)) == []
    with pytest.raises(NotMonotoneError):
        minimized_dnf(from_sat(1, []))


def _berge_transversals(dnf, nvars):
    """Minimal hitting sets of the DNF clauses, by Berge's incremental method."""
    hs = [frozenset()]
    for clause in dnf:
        nxt = set()
        for h in hs:
            if h & clause:
                nxt.add(h)
            else:
                for v in clause:
                    nxt.add(h | {v})
        hs = [h for h in nxt if not any(o < h for o in nxt)]
    return sorted(hs, key=lambda c: (len(c), sorted(c)))


def test_cnf_equals_dnf_transversals_exhaustive():
    # independent route: CNF clauses are the minimal transversals of the DNF
    for k in (1, 2, 3):
        for phi in all_functions(k):
            if not is_monotone(phi) or phi.table in (0, BoolFun.top(k).table):
                continue
            dnf = minimized_dnf(phi)
            assert minimized_cnf(phi) == _berge_transversals(dnf, phi.nvars)
            assert eval_dnf(k, dnf) == phi


def test_combine_and_disjoint(p9):
    assert combine("NOT", BoolFun.bottom(2)) == BoolFun.top(2)
    parts = [parse_function(f"k 3\nformula {f}") for f in ("0&!2&3", "!1&2&3", "!0&1&3", "0&1&2")]
    for a, b in itertools.combinations(parts, 2):
        assert is_disjoint(a, b)
    acc = BoolFun.bottom(3)
    for f in parts:
        acc = combine("OR", acc, f)
    assert acc == p9
    with pytest.raises(ArityError):
        combine("AND", BoolFun.top(1), BoolFun.top(2))


def test_parse_examples(p9):
    assert parse_function("k 1\nformula 0&1") == from_sat(1, [0, 1])
    assert parse_function("k 3\nformula (2|3)&(0|3)&(1|3)&(0|1|2)") == p9
    assert parse_function("k 1\nsat\n.") == from_sat(1, [])
    assert parse_function("# c\nk 2\nformula !(0 | 1) & 2\n") == from_sat(2, [2])
    assert parse_function("k 1\nformula 1 | 0 & !1") == from_sat(1, [1], [0, 1], [0])


@pytest.mark.parametrize("text,line,col", [
    ("k 1\nformula 0 &", 2, None),
    ("k 1\nformula 2", 2, None),
    ("k 1\nformula (0 | 1", 2, None),
    ("k x\nsat", 1, 1),
    ("k 0\nsat", 1, None),
    (f"k {MAX_K + 1}\nsat", 1, None),
    ("k 1\nsat\n0 0", 3, None),
    ("k 1\nsat\n0\n0", 4, 1),
    ("k 1\nsat\n5", 3, 1),
    ("", 1, 1),
])
def test_parse_errors(text, line, col):
    with pytest.raises(ParseError) as ei:
        parse_function(text)
    assert ei.value.line == line
    if col is not None:
        assert ei.value.column == col


def test_round_trip_exhaustive():
    for k in (1, 2):
        for phi in all_functions(k):
            assert parse_function(format_function(phi)) == phi


@given(functions(3, 3))
def test_round_trip_k3(phi):
    assert parse_function(format_function(phi)) == phi


@given(functions())
def test_euler_complement(phi):
    assert euler(phi) + euler(~phi) == 0


@given(functions(), functions())
def test_euler_additive_on_disjoint(phi, psi):
    if phi.k != psi.k:
        return
    a = phi & ~psi
    assert euler(a | psi) == euler(a) + euler(psi)


@given(functions())
def test_degenerate_implies_euler_zero(phi):
    if is_degenerate(phi):
        assert euler(phi) == 0


@given(functions())
def test_table_invariants(phi):
    assert phi.sat_count() == bin(phi.table).count("1") == len(phi.sat())
    assert all(nu < 1 << phi.nvars for nu in phi.sat())


@settings(max_examples=200)
@given(functions())
def test_minimized_reevaluate(phi):
    if is_monotone(phi):
        assert eval_dnf(phi.k, minimized_dnf(phi)) == phi
        assert eval_cnf(phi.k, minimized_cnf(phi)) == phi


@given(functions())
def test_monotone_matches_definition(phi):
    # definition over all comparable pairs, not just covering pairs
    sat = set(phi.sat())
    expected = all(nu | x in sat for nu in sat for x in range(1 << phi.nvars))
    assert is_monotone(phi) == expected


def test_dependencies_definition():
    for phi in all_functions(2):
        expected = {l for l in range(3) if any(phi(nu) != phi(nu ^ (1 << l)) for nu in range(8))}
        assert dependencies(phi) == expected


def test_arity_guards():
    with pytest.raises(ArityError):
        BoolFun(0, 0)
    with pytest.raises(ArityError):
        BoolFun(1, 1 << 4)
    with pytest.raises(ArityError):
        BoolFun.from_sat(1, [[2]])
