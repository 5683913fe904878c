"""Reduced ordered BDDs for the h-queries and compilation of degenerate H-queries.

For a degenerate phi that ignores variable l, every satisfying pair
{nu, nu^(l)} is the conjunction of h_{k,i} / not h_{k,i} for i != l.  The
i < l part only mentions R, S_1..S_l and the i > l part only S_{l+1}..S_k, T,
so each side gets an OBDD under its own order (grouped by first resp.
second argument, which keeps the width constant) and the two are joined by a
decomposable AND.  The outer OR over pairs is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .boolfun import BoolFun, dependencies, is_degenerate
from .circuit import DECISION, Circuit, CircuitBuilder
from .errors import DegeneracyError, OrderError
from .pdb import TidDatabase, World

AND = "and"
OR = "or"

ZERO = 0
ONE = 1


@dataclass(frozen=True)
class VarOrder:
    """A total order on some fact indices."""

    sequence: Tuple[int, ...]

    def __post_init__(self):
        if len(set(self.sequence)) != len(self.sequence):
            raise OrderError("variable order has duplicates")

    def __len__(self):
        return len(self.sequence)

    def __contains__(self, v):
        return v in self.sequence


def _present(D: TidDatabase, pred, *args) -> List[int]:
    i = D.index(pred, *args)
    return [] if i is None else [i]


def left_order(l: int, D: TidDatabase) -> VarOrder:
    """Per constant a: R(a), then S_1(a,b)..S_l(a,b) for each b."""
    seq: List[int] = []
    for a in D.domain:
        seq += _present(D, "R", a)
        for b in D.domain:
            for j in range(1, l + 1):
                seq += _present(D, f"S{j}", a, b)
    return VarOrder(tuple(seq))


def right_order(l: int, D: TidDatabase) -> VarOrder:
    """Per constant b: S_{l+1}(a,b)..S_k(a,b) for each a, then T(b)."""
    seq: List[int] = []
    for b in D.domain:
        for a in D.domain:
            for j in range(l + 1, D.k + 1):
                seq += _present(D, f"S{j}", a, b)
        seq += _present(D, "T", b)
    return VarOrder(tuple(seq))


class ObddManager:
    """Unique table and operation caches for one variable order.

    Node 0 is the constant false, node 1 the constant true; others are
    (level, lo, hi) with level the position of the tested fact in the order.
    """

    def __init__(self, order: VarOrder):
        self.order = order
        self.level = {v: i for i, v in enumerate(order.sequence)}
        self.nodes: List[Tuple[int, int, int]] = [(len(order), 0, 0), (len(order), 1, 1)]
        self._unique: Dict[Tuple[int, int, int], int] = {}
        self._apply: Dict[Tuple[str, int, int], int] = {}
        self._neg: Dict[int, int] = {}

    def mk(self, level: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (level, lo, hi)
        n = self._unique.get(key)
        if n is None:
            n = len(self.nodes)
            self.nodes.append(key)
            self._unique[key] = n
        return n

    def var(self, fact: int) -> "Obdd":
        if fact not in self.level:
            raise OrderError(f"fact {fact} is not in the variable order")
        return Obdd(self, self.mk(self.level[fact], ZERO, ONE))

    def const(self, value: bool) -> "Obdd":
        return Obdd(self, ONE if value else ZERO)

    def _apply_nodes(self, op: str, a: int, b: int) -> int:
        if op == AND:
            if a == ZERO or b == ZERO:
                return ZERO
            if a == ONE:
                return b
            if b == ONE or a == b:
                return a
        else:
            if a == ONE or b == ONE:
                return ONE
            if a == ZERO:
                return b
            if b == ZERO or a == b:
                return a
        if a > b:
            a, b = b, a
        key = (op, a, b)
        r = self._apply.get(key)
        if r is not None:
            return r
        la, loa, hia = self.nodes[a]
        lb, lob, hib = self.nodes[b]
        top = min(la, lb)
        a0, a1 = (loa, hia) if la == top else (a, a)
        b0, b1 = (lob, hib) if lb == top else (b, b)
        r = self.mk(top, self._apply_nodes(op, a0, b0), self._apply_nodes(op, a1, b1))
        self._apply[key] = r
        return r

    def _negate_node(self, a: int) -> int:
        if a <= ONE:
            return 1 - a
        r = self._neg.get(a)
        if r is None:
            lvl, lo, hi = self.nodes[a]
            r = self.mk(lvl, self._negate_node(lo), self._negate_node(hi))
            self._neg[a] = r
        return r


@dataclass(frozen=True)
class Obdd:
    manager: ObddManager
    root: int

    @property
    def order(self) -> VarOrder:
        return self.manager.order

    def reachable(self) -> List[int]:
        seen, stack = set(), [self.root]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            if n > ONE:
                _, lo, hi = self.manager.nodes[n]
                stack += [lo, hi]
        return sorted(seen)

    def size(self) -> int:
        """Number of decision nodes."""
        return sum(1 for n in self.reachable() if n > ONE)

    def evaluate(self, w: World) -> bool:
        n = self.root
        seq = self.manager.order.sequence
        while n > ONE:
            lvl, lo, hi = self.manager.nodes[n]
            n = hi if w >> seq[lvl] & 1 else lo
        return n == ONE

    def is_reduced_ordered(self) -> bool:
        seen = set()
        for n in self.reachable():
            if n <= ONE:
                continue
            lvl, lo, hi = self.manager.nodes[n]
            if lo == hi or (lvl, lo, hi) in seen:
                return False
            seen.add((lvl, lo, hi))
            for c in (lo, hi):
                if c > ONE and self.manager.nodes[c][0] <= lvl:
                    return False
        return True

    def __and__(self, other):
        return apply(AND, self, other)

    def __or__(self, other):
        return apply(OR, self, other)

    def __invert__(self):
        return negate(self)


def apply(op: str, A: Obdd, B: Obdd) -> Obdd:
    if A.manager is not B.manager:
        raise OrderError("OBDDs built under different variable orders")
    if op not in (AND, OR):
        raise ValueError(f"unknown operation {op!r}")
    return Obdd(A.manager, A.manager._apply_nodes(op, A.root, B.root))


def negate(A: Obdd) -> Obdd:
    return Obdd(A.manager, A.manager._negate_node(A.root))


def _h_pairs(i: int, D: TidDatabase):
    """The fact-index pairs whose joint presence witnesses h_{k,i}."""
    k = D.k
    out = []
    for a in D.domain:
        for b in D.domain:
            if i == 0:
                x, y = D.index("R", a), D.index("S1", a, b)
            elif i == k:
                x, y = D.index(f"S{k}", a, b), D.index("T", b)
            else:
                x, y = D.index(f"S{i}", a, b), D.index(f"S{i + 1}", a, b)
            if x is not None and y is not None:
                out.append((x, y))
    return out


def obdd_for_h(i: int, side_order, D: TidDatabase) -> Obdd:
    """OBDD of h_{k,i} under ``side_order`` (a VarOrder or an existing manager)."""
    mgr = side_order if isinstance(side_order, ObddManager) else ObddManager(side_order)
    acc = mgr.const(False)
    for x, y in _h_pairs(i, D):
        for v in (x, y):
            if v not in mgr.level:
                raise OrderError(f"order is missing fact {D.facts[v].label} needed by h_{D.k},{i}")
        acc = acc | (mgr.var(x) & mgr.var(y))
    return acc


# -- compilation into circuits ------------------------------------------------------------

class CompileContext:
    """Shared circuit builder and OBDD caches for one database."""

    def __init__(self, D: TidDatabase, builder: Optional[CircuitBuilder] = None):
        self.D = D
        self.builder = builder or CircuitBuilder()
        self._managers: Dict[Tuple[str, int], ObddManager] = {}
        self._h: Dict[Tuple[str, int, int], Obdd] = {}
        self._side: Dict[Tuple[str, int, int], Obdd] = {}
        self._unfolded: Dict[Tuple[int, int], int] = {}
        self._leaf: Dict[BoolFun, int] = {}

    def manager(self, side: str, l: int) -> ObddManager:
        key = (side, l)
        m = self._managers.get(key)
        if m is None:
            order = left_order(l, self.D) if side == "L" else right_order(l, self.D)
            m = self._managers[key] = ObddManager(order)
        return m

    def h(self, side: str, l: int, i: int) -> Obdd:
        key = (side, l, i)
        o = self._h.get(key)
        if o is None:
            o = self._h[key] = obdd_for_h(i, self.manager(side, l), self.D)
        return o

    def side(self, side: str, l: int, nu: int) -> Obdd:
        """Conjunction of h_i (i in nu) and not h_i (i not in nu) over the side's indices."""
        idx = range(l) if side == "L" else range(l + 1, self.D.k + 1)
        mask = sum(1 << i for i in idx)
        key = (side, l, nu & mask)
        o = self._side.get(key)
        if o is None:
            o = self.manager(side, l).const(True)
            for i in idx:
                h = self.h(side, l, i)
                o = o & (h if nu >> i & 1 else ~h)
            self._side[key] = o
        return o

    def unfold(self, A: Obdd) -> int:
        """Gate for an OBDD: each node becomes (v & hi) | (!v & lo)."""
        b = self.builder
        mgr = A.manager
        labels = [self.D.facts[v].label for v in mgr.order.sequence]

        def go(n):
            if n == ZERO:
                return b.false()
            if n == ONE:
                return b.true()
            key = (id(mgr), n)
            g = self._unfolded.get(key)
            if g is None:
                lvl, lo, hi = mgr.nodes[n]
                v = b.var(labels[lvl])
                pos = b.and_([v, go(hi)])
                neg = b.and_([b.neg(v), go(lo)])
                g = b.or_([pos, neg], cert=(DECISION, labels[lvl]))
                self._unfolded[key] = g
            return g

        # iterative warm-up keeps recursion depth bounded on long orders
        for n in A.reachable():
            go(n)
        return go(A.root)

    def degenerate_gate(self, phi: BoolFun) -> int:
        g = self._leaf.get(phi)
        if g is not None:
            return g
        if phi.k != self.D.k:
            raise DegeneracyError(f"function has k={phi.k} but the database has k={self.D.k}")
        b = self.builder
        if not phi.table:
            g = b.false()
        else:
            if not is_degenerate(phi):
                raise DegeneracyError("expected a degenerate function; it depends on every variable")
            l = min(set(range(phi.nvars)) - dependencies(phi))
            kids, tables = [], []
            for nu in phi.sat():
                if nu >> l & 1:
                    continue
                left = self.unfold(self.side("L", l, nu))
                right = self.unfold(self.side("R", l, nu))
                kids.append(b.and_([left, right]))
                tables.append((1 << nu) | (1 << (nu | 1 << l)))
            g = b.or_(kids, tables=tables, k=phi.k)
        self._leaf[phi] = g
        return g


def degenerate_compile(phi: BoolFun, D: TidDatabase, ctx: Optional[CompileContext] = None) -> Circuit:
    ctx = ctx or CompileContext(D)
    return ctx.builder.build(ctx.degenerate_gate(phi), len(D))
