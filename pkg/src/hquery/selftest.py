"""Built-in checks: exhaustive k <= 2 sweeps plus fixed golden cases.

Each check looks its targets up through the module objects at call time,
so a patched (mutated) implementation is what gets exercised.
"""

from __future__ import annotations

import random
import sys
from fractions import Fraction

from . import analysis, boolfun, circuit, fragment, lattice, pdb, transform
from .errors import DomainError

BoolFun = boolfun.BoolFun

PHI9_SAT = [[0, 3], [1, 3], [2, 3], [0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3], [0, 1, 2, 3]]
PHI9_MU = {(): 1, (0, 3): -1, (1, 3): -1, (2, 3): -1, (0, 1, 2): -1,
           (0, 1, 3): 1, (0, 2, 3): 1, (1, 2, 3): 1, (0, 1, 2, 3): 0}
NO_PM_SAT = [[0, 3], [0, 4], [3, 4], [0, 1, 2], [0, 1, 3], [0, 1, 4], [0, 2, 4], [1, 2, 4],
             [0, 1, 3, 4], [0, 2, 3, 4]]


def phi9() -> BoolFun:
    return BoolFun.from_sat(3, PHI9_SAT)


def phi_no_pm() -> BoolFun:
    return BoolFun.from_sat(4, NO_PM_SAT)


def _phi9_golden():
    phi = phi9()
    L = lattice.cnf_lattice(phi)
    got = {tuple(boolfun.members(x)): L.mu[x] for x in L.elements}
    return (boolfun.euler(phi) == 0 and lattice.mobius_hat(L) == 0 and got == PHI9_MU
            and lattice.verify_big_coeff(phi).ok)


def _big_coeff_sweep():
    for k in (1, 2):
        for phi in analysis.monotone_functions(k):
            if boolfun.is_degenerate(phi):
                continue
            if not lattice.verify_big_coeff(phi).ok:
                return False
            P, Pc, Pd = lattice.characteristic_polynomials(phi)
            if not (P == Pc == Pd and P[k + 1] == (-1) ** (k + 1) * boolfun.euler(phi)):
                return False
    return True


def _chain_rejections():
    bot = BoolFun.bottom(1)
    two = BoolFun.from_sat(1, [[], [0, 1]])
    try:
        transform.chainkill(two, [0, 1, 3])  # equal parity ends
        return False
    except DomainError:
        pass
    try:
        transform.chainswap(BoolFun.from_sat(1, [[]]), [0, 1])  # odd length path
        return False
    except DomainError:
        pass
    steps = transform.chainkill(BoolFun.from_sat(1, [[], [1]]), [0, 1, 3, 2])
    return transform.verify_trace(transform.RewriteTrace(BoolFun.from_sat(1, [[], [1]]), tuple(steps)), bot).ok


def _rewrite_sweep():
    for k in (1, 2):
        fs = list(boolfun.all_functions(k))
        for phi in fs:
            e = boolfun.euler(phi)
            if e == 0:
                t = transform.reduce_to_bot(phi)
                if not transform.verify_trace(t, BoolFun.bottom(k)):
                    return False
                fr = fragment.fragment(phi)
                if not fr.is_valid(phi):
                    return False
            ref = fs[0] if e == 0 else None
            if ref is not None and not transform.verify_trace(transform.equivalence_witness(phi, ref), ref):
                return False
    # all pairs at k = 1
    fs = list(boolfun.all_functions(1))
    for a in fs:
        for b in fs:
            if boolfun.euler(a) == boolfun.euler(b):
                if not transform.verify_trace(transform.equivalence_witness(a, b), b):
                    return False
    return True


def _compile_sweep():
    rnd = random.Random(7)
    for k in (1, 2):
        D = pdb.TidDatabase.full(k, ["a", "b"], [Fraction(rnd.randint(0, 5), 5) for _ in range(32)])
        for phi in boolfun.all_functions(k):
            if boolfun.euler(phi) != 0:
                continue
            C = circuit.compile_query(phi, D)
            if circuit.probability(C, D) != pdb.oracle_pqe(phi, D):
                return False
    return True


def _no_pm_case():
    phi = phi_no_pm()
    if boolfun.euler(phi) != 0:
        return False
    if analysis.induced_perfect_matching(phi, analysis.COLORED) is not None:
        return False
    if analysis.induced_perfect_matching(phi, analysis.UNCOLORED) is not None:
        return False
    return fragment.fragment(phi).is_valid(phi)


def _counts():
    return all(analysis.count_euler_zero(k) == analysis.count_euler_zero_enumerated(k) for k in (1, 2))


CHECKS = [
    ("phi9 golden Moebius values", _phi9_golden),
    ("big coefficient and polynomials, k <= 2", _big_coeff_sweep),
    ("chain macros reject bad paths", _chain_rejections),
    ("reduce, fragment and witnesses, k <= 2", _rewrite_sweep),
    ("compiled circuits match the oracle, k <= 2", _compile_sweep),
    ("no-perfect-matching function", _no_pm_case),
    ("euler-zero counts", _counts),
]


def run(out=None) -> bool:
    out = out or sys.stdout
    ok = True
    for name, fn in CHECKS:
        try:
            passed = bool(fn())
            note = ""
        except Exception as e:  # a crash is a failure, reported with its cause
            passed, note = False, f" ({type(e).__name__}: {e})"
        ok &= passed
        out.write(f"{'PASS' if passed else 'FAIL'} {name}{note}\n")
    return ok
