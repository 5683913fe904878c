"""Clause-union lattices, their Moebius function, and the Euler link.

Lattice elements are variable sets encoded as ints.  The order is reversed
inclusion, so the top element is the empty set and ``x <= y`` iff ``x``
is a superset of ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple

from .boolfun import (
    BoolFun,
    dependencies,
    euler,
    is_degenerate,
    is_monotone,
    minimized_cnf,
    minimized_dnf,
    show_valuation,
    valuation,
)
from .errors import DegeneracyError, GuardError, NotMonotoneError

MAX_ELEMENTS = 4096

PTIME = "PTIME"
SHARP_P_HARD = "SHARP_P_HARD"


def _subset(a: int, b: int) -> bool:
    return a & ~b == 0


def mobius_to_top(elements: Sequence[int]) -> Dict[int, int]:
    """mu(x, top) for every element, by the top-down recurrence.

    ``elements`` must be sorted by size; the strict upper set of ``x`` is
    every element that is a proper subset of ``x``.
    """
    mu: Dict[int, int] = {}
    for x in elements:
        if x == 0:
            mu[x] = 1
            continue
        mu[x] = -sum(m for w, m in mu.items() if w != x and _subset(w, x))
    return mu


@dataclass(frozen=True)
class MobiusLattice:
    clauses: Tuple[int, ...]
    elements: Tuple[int, ...]
    mu: Mapping[int, int] = field(repr=False)

    @property
    def top(self) -> int:
        return 0

    @property
    def bottom(self) -> int:
        b = 0
        for c in self.clauses:
            b |= c
        return b

    def __len__(self):
        return len(self.elements)

    def leq(self, x: int, y: int) -> bool:
        return _subset(y, x)

    def mobius(self, u: int, x: int) -> int:
        """Two-argument mu(u, x), rebuilt on demand; zero when u is not <= x."""
        if not self.leq(u, x):
            return 0
        interval = [w for w in self.elements if self.leq(u, w) and self.leq(w, x)]
        interval.sort(key=lambda w: w.bit_count())
        # mu(w, x) for w in [u, x], processing from x downwards
        vals: Dict[int, int] = {}
        for w in interval:
            if w == x:
                vals[w] = 1
            else:
                vals[w] = -sum(v for z, v in vals.items() if z != w and self.leq(w, z))
        return vals[u]

    def hasse_edges(self) -> List[Tuple[int, int]]:
        """Covering pairs (lower, upper) in the lattice order."""
        edges = []
        for x in self.elements:
            for y in self.elements:
                if x != y and self.leq(x, y):
                    if not any(z not in (x, y) and self.leq(x, z) and self.leq(z, y) for z in self.elements):
                        edges.append((x, y))
        return edges

    def to_dot(self, name: str = "lattice") -> str:
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for x in self.elements:
            lines.append(f'  n{x} [label="{show_valuation(x)}\\nmu={self.mu[x]}"];')
        for lo, hi in self.hasse_edges():
            lines.append(f"  n{lo} -> n{hi};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def clause_lattice(clauses) -> MobiusLattice:
    """All distinct unions of clause subsets, closed by iterated pairwise union."""
    cs = []
    for c in clauses:
        cs.append(c if isinstance(c, int) else valuation(c))
    if not cs:
        raise ValueError("a clause lattice needs at least one clause")
    found = {0}
    frontier = {0}
    while frontier:
        new = set()
        for x in frontier:
            for c in cs:
                y = x | c
                if y not in found:
                    new.add(y)
        found |= new
        if len(found) > MAX_ELEMENTS:
            raise GuardError(f"clause lattice exceeds {MAX_ELEMENTS} elements")
        frontier = new
    elements = tuple(sorted(found, key=lambda x: (x.bit_count(), x)))
    return MobiusLattice(tuple(cs), elements, mobius_to_top(elements))


def mobius_hat(L: MobiusLattice) -> int:
    """mu(bottom, top)."""
    return L.mu[L.bottom]


def cnf_lattice(phi: BoolFun) -> MobiusLattice:
    return clause_lattice(minimized_cnf(phi))


def dnf_lattice(phi: BoolFun) -> MobiusLattice:
    return clause_lattice(minimized_dnf(phi))


def safety_by_mobius(phi: BoolFun) -> str:
    if not is_monotone(phi):
        raise NotMonotoneError("the Moebius safety criterion only applies to monotone functions")
    if is_degenerate(phi):
        return PTIME
    return PTIME if mobius_hat(cnf_lattice(phi)) == 0 else SHARP_P_HARD


@dataclass(frozen=True)
class BigCoeff:
    euler: int
    mu_cnf: int
    mu_dnf: int
    ok: bool

    def __iter__(self):
        return iter((self.euler, self.mu_cnf, self.mu_dnf, self.ok))


def _require_nondegenerate_monotone(phi: BoolFun):
    if not is_monotone(phi):
        raise NotMonotoneError("expected a monotone function")
    if is_degenerate(phi):
        missing = sorted(set(range(phi.nvars)) - dependencies(phi))
        raise DegeneracyError(f"expected a nondegenerate function; it ignores variables {missing}")


def verify_big_coeff(phi: BoolFun) -> BigCoeff:
    """Compare euler(phi), mu_CNF(bottom, top) and (-1)^k mu_DNF(bottom, top)."""
    _require_nondegenerate_monotone(phi)
    e = euler(phi)
    mc = mobius_hat(cnf_lattice(phi))
    md = mobius_hat(dnf_lattice(phi))
    sign = -1 if phi.k % 2 else 1
    return BigCoeff(e, mc, md, e == mc == sign * md)


# -- characteristic polynomials -------------------------------------------------------

@dataclass(frozen=True)
class CharPoly:
    """Polynomial in t with exact coefficients; index i holds the t**i term."""

    coefficients: Tuple[Fraction, ...]

    def __call__(self, t):
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def __getitem__(self, i):
        return self.coefficients[i] if i < len(self.coefficients) else Fraction(0)

    @property
    def degree(self) -> int:
        d = -1
        for i, c in enumerate(self.coefficients):
            if c:
                d = i
        return d


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_pow(p, n):
    out = [Fraction(1)]
    for _ in range(n):
        out = _poly_mul(out, p)
    return out


def _poly_add_into(acc, p, scale=1):
    for i, c in enumerate(p):
        acc[i] += scale * c


def _char(acc, length) -> CharPoly:
    return CharPoly(tuple(acc[:length]) + (Fraction(0),) * (length - len(acc)))


def characteristic_polynomials(phi: BoolFun) -> Tuple[CharPoly, CharPoly, CharPoly]:
    """P(t) = Pr(phi) under all-t probabilities, and its CNF and DNF lattice forms."""
    _require_nondegenerate_monotone(phi)
    n = phi.nvars
    length = n + 1
    t = [Fraction(0), Fraction(1)]
    one_minus_t = [Fraction(1), Fraction(-1)]

    direct = [Fraction(0)] * length
    for nu in phi.sat():
        s = nu.bit_count()
        _poly_add_into(direct, _poly_mul(_poly_pow(t, s), _poly_pow(one_minus_t, n - s)))

    via_cnf = [Fraction(0)] * length
    L = cnf_lattice(phi)
    for x in L.elements:
        _poly_add_into(via_cnf, _poly_pow(one_minus_t, x.bit_count()), L.mu[x])

    via_dnf = [Fraction(0)] * length
    via_dnf[0] = Fraction(1)
    L = dnf_lattice(phi)
    for x in L.elements:
        _poly_add_into(via_dnf, _poly_pow(t, x.bit_count()), -L.mu[x])

    return _char(direct, length), _char(via_cnf, length), _char(via_dnf, length)


def mobius_inversion_check(L: MobiusLattice, f: Mapping[int, Fraction]) -> bool:
    """Sum f downwards into g, invert with mu, and compare with f."""
    g = {x: sum((f[u] for u in L.elements if L.leq(u, x)), Fraction(0)) for x in L.elements}
    for x in L.elements:
        back = sum((L.mobius(u, x) * g[u] for u in L.elements if L.leq(u, x)), Fraction(0))
        if back != f[x]:
            return False
    return True

