"""Negation/disjunction templates and fragmentations.

A template is a small circuit whose internal gates are only NOT and OR and
whose leaves are numbered holes.  Plugging degenerate functions into the
holes, with every OR deterministic, gives a fragmentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .boolfun import BoolFun, euler, format_valuation, full_mask, is_degenerate, is_disjoint
from .errors import ArityError, InvalidStepError, NotFragmentableError
from .transform import PLUS, RewriteTrace, reduce_to_bot, verify_trace

HOLE = "hole"
NOT = "not"
OR = "or"

Node = Tuple  # ("hole", i) | ("not", child) | ("or", (children...))


@dataclass(frozen=True)
class Template:
    """Nodes in topological order (children before parents); the root is last."""

    nodes: Tuple[Node, ...]

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("empty template")
        holes = set()
        for i, node in enumerate(self.nodes):
            kind = node[0]
            if kind == HOLE:
                holes.add(node[1])
            elif kind == NOT:
                if not 0 <= node[1] < i:
                    raise ValueError(f"node {i}: child must precede it")
            elif kind == OR:
                if not node[1] or any(not 0 <= c < i for c in node[1]):
                    raise ValueError(f"node {i}: bad OR children")
            else:
                raise ValueError(f"node {i}: unknown kind {kind!r}")
        if holes != set(range(len(holes))):
            raise ValueError("hole indices must be 0..n with each used")

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    @property
    def hole_count(self) -> int:
        return sum(1 for n in set(self.nodes) if n[0] == HOLE)

    def count(self, kind: str) -> int:
        return sum(1 for n in self.nodes if n[0] == kind)

    def depth(self) -> int:
        d: List[int] = []
        for node in self.nodes:
            if node[0] == HOLE:
                d.append(0)
            elif node[0] == NOT:
                d.append(d[node[1]] + 1)
            else:
                d.append(1 + max(d[c] for c in node[1]))
        return d[-1]

    def to_expr(self) -> str:
        out: List[str] = []
        for node in self.nodes:
            if node[0] == HOLE:
                out.append(f"H{node[1]}")
            elif node[0] == NOT:
                out.append(f"!{out[node[1]]}")
            else:
                out.append("(" + " | ".join(out[c] for c in node[1]) + ")")
        return out[-1]

    @classmethod
    def single(cls) -> "Template":
        return cls(((HOLE, 0),))

    @classmethod
    def disjunction(cls, n: int) -> "Template":
        """H0 | H1 | ... | H(n-1)."""
        nodes = [(HOLE, i) for i in range(n)]
        if n > 1:
            nodes.append((OR, tuple(range(n))))
        return cls(tuple(nodes))


@dataclass(frozen=True)
class Fragmentation:
    template: Template
    leaves: Tuple[BoolFun, ...]

    def function(self) -> BoolFun:
        return instantiate(self.template, self.leaves)

    def is_valid(self, phi: BoolFun = None) -> bool:
        ok = (all(is_degenerate(f) for f in self.leaves)
              and check_instantiation_determinism(self.template, self.leaves))
        if phi is not None:
            ok = ok and self.function() == phi
        return ok


def _check_arity(T: Template, leaves: Sequence[BoolFun]):
    if len(leaves) != T.hole_count:
        raise ArityError(f"template has {T.hole_count} holes but {len(leaves)} leaves were given")
    if len({f.k for f in leaves}) > 1:
        raise ArityError("leaves over different variable sets")


def _node_tables(T: Template, leaves: Sequence[BoolFun]) -> List[int]:
    _check_arity(T, leaves)
    full = full_mask(leaves[0].nvars)
    vals: List[int] = []
    for node in T.nodes:
        if node[0] == HOLE:
            vals.append(leaves[node[1]].table)
        elif node[0] == NOT:
            vals.append(full ^ vals[node[1]])
        else:
            acc = 0
            for c in node[1]:
                acc |= vals[c]
            vals.append(acc)
    return vals


def instantiate(T: Template, leaves: Sequence[BoolFun]) -> BoolFun:
    return BoolFun(leaves[0].k, _node_tables(T, leaves)[-1]) if leaves else _empty(T)


def _empty(T):
    raise ArityError(f"template has {T.hole_count} holes but no leaves were given")


def check_instantiation_determinism(T: Template, leaves: Sequence[BoolFun]) -> bool:
    if not leaves:
        _empty(T)
    vals = _node_tables(T, leaves)
    k = leaves[0].k
    for node in T.nodes:
        if node[0] != OR:
            continue
        kids = node[1]
        for i in range(len(kids)):
            for j in range(i + 1, len(kids)):
                if not is_disjoint(BoolFun(k, vals[kids[i]]), BoolFun(k, vals[kids[j]])):
                    return False
    return True


def structural_euler(frag: Fragmentation) -> int:
    """Euler characteristic propagated through the template: NOT negates, OR adds.

    Only meaningful when the instantiation is deterministic.
    """
    vals: List[int] = []
    for node in frag.template.nodes:
        if node[0] == HOLE:
            vals.append(euler(frag.leaves[node[1]]))
        elif node[0] == NOT:
            vals.append(-vals[node[1]])
        else:
            vals.append(sum(vals[c] for c in node[1]))
    return vals[-1]


def fragment_from_trace(trace: RewriteTrace) -> Fragmentation:
    """Turn a trace starting at the constant-false function into a fragmentation.

    Hole 0 holds false; step i contributes hole i holding the pair it
    touches.  A PLUS step ORs the hole onto the current template (runs of
    PLUS steps share one OR gate); a MINUS step wraps it as !(!T | H).
    """
    start = trace.start
    if start.table:
        raise InvalidStepError("a fragmentation trace must start at the constant-false function")
    check = verify_trace(trace, trace.end())
    if not check:
        raise InvalidStepError(f"invalid trace at step {check.failed_at}: {check.reason}")
    k = start.k
    leaves = [BoolFun.bottom(k)]
    nodes: List[Node] = [(HOLE, 0)]
    cur = 0
    pending: List[int] = []  # children of an open OR run

    def close():
        nonlocal cur, pending
        if pending:
            nodes.append((OR, tuple([cur] + pending)))
            cur = len(nodes) - 1
            pending = []

    for i, step in enumerate(trace.steps, start=1):
        a, b = step.pair
        leaves.append(BoolFun(k, (1 << a) | (1 << b)))
        nodes.append((HOLE, i))
        hole = len(nodes) - 1
        if step.sign == PLUS:
            pending.append(hole)
            continue
        close()
        nodes.append((NOT, cur))
        nodes.append((OR, (len(nodes) - 1, hole)))
        nodes.append((NOT, len(nodes) - 1))
        cur = len(nodes) - 1
    close()
    return Fragmentation(Template(tuple(nodes)), tuple(leaves))


def fragment(phi: BoolFun) -> Fragmentation:
    e = euler(phi)
    if e != 0:
        raise NotFragmentableError(
            f"euler characteristic is {e}; only functions with 0 are fragmentable", e)
    return fragment_from_trace(reduce_to_bot(phi).reversed())


def format_fragmentation(frag: Fragmentation) -> str:
    out = [f"template {frag.template.to_expr()}"]
    for i, leaf in enumerate(frag.leaves):
        out.append(f"H{i} k {leaf.k} sat")
        out.extend(f"  {format_valuation(nu)}" for nu in leaf.sat())
    return "\n".join(out) + "\n"
