"""Deterministic decomposable circuits over database facts.

Gates are plain tuples kept in topological order:

    ("v", label)        fact variable, label like ``S1(a,b)``
    ("t",) / ("f",)     constants
    ("n", child)
    ("a", (children...))
    ("o", (children...))

Construction-time disjointness certificates ride alongside in a dict keyed
by OR gate id; they are not part of circuit identity or of the file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .boolfun import BoolFun, euler, full_mask, is_disjoint, var_mask
from .errors import (
    ArityError,
    GuardError,
    InputError,
    NotCompilableError,
    ParseError,
    UncheckedCircuitError,
)
from .fragment import HOLE, NOT, Fragmentation, _node_tables
from .pdb import TidDatabase, World

SEMANTIC = "semantic"
CERTIFIED = "certified"
SEMANTIC_MAX_VARS = 20

TRUE = ("t",)
FALSE = ("f",)

# certificates
DECISION = "decision"
PHI = "phi"


@dataclass(frozen=True)
class Circuit:
    gates: Tuple[tuple, ...]
    root: int
    nfacts: int = 0
    certificates: Dict[int, tuple] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for i, g in enumerate(self.gates):
            kind = g[0]
            if kind == "n":
                kids = (g[1],)
            elif kind in ("a", "o"):
                kids = g[1]
            elif kind in ("v", "t", "f"):
                kids = ()
            else:
                raise ValueError(f"gate {i}: unknown kind {kind!r}")
            if any(not 0 <= c < i for c in kids):
                raise ValueError(f"gate {i}: children must precede it")
        if not 0 <= self.root < len(self.gates):
            raise ValueError(f"root {self.root} out of range")

    def __len__(self):
        return len(self.gates)

    @property
    def labels(self) -> List[str]:
        """Distinct fact labels in gate order."""
        seen: Dict[str, None] = {}
        for g in self.gates:
            if g[0] == "v":
                seen.setdefault(g[1], None)
        return list(seen)

    def vars_cache(self) -> List[int]:
        """VARS(g) per gate, as a bitset over positions in ``labels``."""
        pos = {lab: i for i, lab in enumerate(self.labels)}
        out: List[int] = []
        for g in self.gates:
            if g[0] == "v":
                out.append(1 << pos[g[1]])
            elif g[0] == "n":
                out.append(out[g[1]])
            elif g[0] in ("a", "o"):
                acc = 0
                for c in g[1]:
                    acc |= out[c]
                out.append(acc)
            else:
                out.append(0)
        return out

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g[0] == kind)


class CircuitBuilder:
    """Hash-consing gate store with light constant folding."""

    def __init__(self):
        self.gates: List[tuple] = []
        self._ids: Dict[tuple, int] = {}
        self.certificates: Dict[int, tuple] = {}

    def _add(self, g: tuple) -> int:
        i = self._ids.get(g)
        if i is None:
            i = len(self.gates)
            self.gates.append(g)
            self._ids[g] = i
        return i

    def true(self) -> int:
        return self._add(TRUE)

    def false(self) -> int:
        return self._add(FALSE)

    def is_const(self, i: int, value: bool) -> bool:
        return self.gates[i] == (TRUE if value else FALSE)

    def var(self, label: str) -> int:
        return self._add(("v", label))

    def neg(self, c: int) -> int:
        if self.gates[c] == TRUE:
            return self.false()
        if self.gates[c] == FALSE:
            return self.true()
        return self._add(("n", c))

    def and_(self, children: Sequence[int]) -> int:
        kids = []
        for c in children:
            if self.gates[c] == FALSE:
                return self.false()
            if self.gates[c] != TRUE:
                kids.append(c)
        if not kids:
            return self.true()
        if len(kids) == 1:
            return kids[0]
        return self._add(("a", tuple(kids)))

    def or_(self, children: Sequence[int], cert: Optional[tuple] = None,
            tables: Optional[Sequence[int]] = None, k: Optional[int] = None) -> int:
        """OR gate; ``tables`` (with ``k``) are the function-level tables of the
        children, recorded as a disjointness certificate."""
        kids, kt = [], []
        for j, c in enumerate(children):
            if self.gates[c] != FALSE:
                kids.append(c)
                if tables is not None:
                    kt.append(tables[j])
        if not kids:
            return self.false()
        if len(kids) == 1:
            return kids[0]
        i = self._add(("o", tuple(kids)))
        if i not in self.certificates:
            if tables is not None:
                self.certificates[i] = (PHI, k, tuple(kt))
            elif cert is not None:
                self.certificates[i] = cert
        return i

    def build(self, root: int, nfacts: int = 0) -> Circuit:
        """Freeze the gates reachable from ``root``, renumbered densely."""
        keep = set()
        stack = [root]
        while stack:
            i = stack.pop()
            if i in keep:
                continue
            keep.add(i)
            g = self.gates[i]
            if g[0] == "n":
                stack.append(g[1])
            elif g[0] in ("a", "o"):
                stack.extend(g[1])
        order = sorted(keep)
        new = {old: j for j, old in enumerate(order)}
        gates = []
        for old in order:
            gates.append(_renumber(self.gates[old], new))
        certs = {}
        for old, cert in self.certificates.items():
            if old in new:
                certs[new[old]] = cert
        return Circuit(tuple(gates), new[root], nfacts, certs)


def _renumber(g, new):
    if g[0] == "n":
        return ("n", new[g[1]])
    if g[0] in ("a", "o"):
        return (g[0], tuple(new[c] for c in g[1]))
    return g


def _children(g) -> tuple:
    if g[0] == "n":
        return (g[1],)
    if g[0] in ("a", "o"):
        return g[1]
    return ()


# -- evaluation and checks -------------------------------------------------------------

def _label_index(C: Circuit, D: TidDatabase) -> Dict[str, int]:
    out = {}
    for lab in C.labels:
        i = D.index_of_label(lab)
        if i is None:
            raise InputError(f"circuit variable {lab} is not a fact of the database")
        out[lab] = i
    return out


def evaluate(C: Circuit, w: World, D: TidDatabase) -> bool:
    """Bottom-up evaluation on world ``w`` (a bitmask over the facts of ``D``)."""
    idx = _label_index(C, D)
    if w >> len(D):
        raise ArityError(f"world mentions facts beyond the {len(D)} of the database")
    val: List[bool] = []
    for g in C.gates:
        kind = g[0]
        if kind == "v":
            val.append(bool(w >> idx[g[1]] & 1))
        elif kind == "t":
            val.append(True)
        elif kind == "f":
            val.append(False)
        elif kind == "n":
            val.append(not val[g[1]])
        elif kind == "a":
            val.append(all(val[c] for c in g[1]))
        else:
            val.append(any(val[c] for c in g[1]))
    return val[C.root]


def check_decomposable(C: Circuit) -> bool:
    vs = C.vars_cache()
    for g in C.gates:
        if g[0] != "a":
            continue
        seen = 0
        for c in g[1]:
            if seen & vs[c]:
                return False
            seen |= vs[c]
    return True


def gate_tables(C: Circuit, max_vars: int = SEMANTIC_MAX_VARS) -> List[int]:
    """Truth table of every gate over the circuit's own variables."""
    labels = C.labels
    n = len(labels)
    if n > max_vars:
        raise GuardError(f"{n} circuit variables exceed the semantic guard of {max_vars}; "
                         "use the certified determinism check")
    pos = {lab: i for i, lab in enumerate(labels)}
    full = full_mask(n)
    out: List[int] = []
    for g in C.gates:
        kind = g[0]
        if kind == "v":
            out.append(var_mask(n, pos[g[1]]))
        elif kind == "t":
            out.append(full)
        elif kind == "f":
            out.append(0)
        elif kind == "n":
            out.append(full ^ out[g[1]])
        elif kind == "a":
            acc = full
            for c in g[1]:
                acc &= out[c]
            out.append(acc)
        else:
            acc = 0
            for c in g[1]:
                acc |= out[c]
            out.append(acc)
    return out


def _semantic_deterministic(C: Circuit) -> bool:
    tabs = gate_tables(C)
    for g in C.gates:
        if g[0] != "o":
            continue
        seen = 0
        for c in g[1]:
            # a child overlaps some earlier child iff it overlaps their union
            if seen & tabs[c]:
                return False
            seen |= tabs[c]
    return True


def _literal_of(C: Circuit, i: int, label: str, positive: bool) -> bool:
    g = C.gates[i]
    if positive:
        return g == ("v", label)
    return g[0] == "n" and C.gates[g[1]] == ("v", label)


def _asserts(C: Circuit, i: int, label: str, positive: bool) -> bool:
    """Gate i is the literal or an AND with the literal among its children."""
    if _literal_of(C, i, label, positive):
        return True
    g = C.gates[i]
    return g[0] == "a" and any(_literal_of(C, c, label, positive) for c in g[1])


def _certified_deterministic(C: Circuit) -> bool:
    for i, g in enumerate(C.gates):
        if g[0] != "o":
            continue
        cert = C.certificates.get(i)
        if cert is None:
            return False
        if cert[0] == DECISION:
            lab = cert[1]
            if len(g[1]) != 2:
                return False
            a, b = g[1]
            if not ((_asserts(C, a, lab, True) and _asserts(C, b, lab, False))
                    or (_asserts(C, a, lab, False) and _asserts(C, b, lab, True))):
                return False
        elif cert[0] == PHI:
            _, k, tables = cert
            if len(tables) != len(g[1]):
                return False
            seen = 0
            for t in tables:
                if seen & t:
                    return False
                seen |= t
        else:
            return False
    return True


def check_deterministic(C: Circuit, mode: str = SEMANTIC) -> bool:
    if mode == SEMANTIC:
        return _semantic_deterministic(C)
    if mode == CERTIFIED:
        return _certified_deterministic(C)
    raise ValueError(f"unknown determinism mode {mode!r}")


def verify(C: Circuit) -> Tuple[bool, str]:
    """Decomposability plus determinism, semantic when the guard allows."""
    if not check_decomposable(C):
        return False, "an AND gate has children sharing variables (not decomposable)"
    if len(C.labels) <= SEMANTIC_MAX_VARS:
        if not check_deterministic(C, SEMANTIC):
            return False, "an OR gate has overlapping children (not deterministic)"
        return True, SEMANTIC
    if not check_deterministic(C, CERTIFIED):
        return False, "determinism is not certified and the circuit is too large to check semantically"
    return True, CERTIFIED


def probability(C: Circuit, D: TidDatabase, unchecked: bool = False) -> Fraction:
    """Exact probability by one bottom-up pass (product, sum, complement)."""
    if not unchecked:
        ok, why = verify(C)
        if not ok:
            raise UncheckedCircuitError(f"refusing to evaluate: {why}; pass unchecked to override")
    idx = _label_index(C, D)
    val: List[Fraction] = []
    for g in C.gates:
        kind = g[0]
        if kind == "v":
            val.append(D.facts[idx[g[1]]].prob)
        elif kind == "t":
            val.append(Fraction(1))
        elif kind == "f":
            val.append(Fraction(0))
        elif kind == "n":
            val.append(1 - val[g[1]])
        elif kind == "a":
            p = Fraction(1)
            for c in g[1]:
                p *= val[c]
            val.append(p)
        else:
            val.append(sum((val[c] for c in g[1]), Fraction(0)))
    return val[C.root]


def _copy_into(b: CircuitBuilder, C: Circuit) -> int:
    remap: Dict[int, int] = {}
    for i, g in enumerate(C.gates):
        remap[i] = b._add(_renumber(g, remap))
        if i in C.certificates and remap[i] not in b.certificates:
            b.certificates[remap[i]] = C.certificates[i]
    return remap[C.root]


def negate_circuit(C: Circuit) -> Circuit:
    b = CircuitBuilder()
    return b.build(b.neg(_copy_into(b, C)), C.nfacts)


# -- composition and compilation ------------------------------------------------------

def _compose(b: CircuitBuilder, frag: Fragmentation, leaf_gates: Sequence[int]) -> int:
    T = frag.template
    if len(leaf_gates) != T.hole_count:
        raise ArityError(f"template has {T.hole_count} holes but {len(leaf_gates)} leaf circuits were given")
    tables = _node_tables(T, frag.leaves)
    k = frag.leaves[0].k
    ids: List[int] = []
    for node in T.nodes:
        if node[0] == HOLE:
            ids.append(leaf_gates[node[1]])
        elif node[0] == NOT:
            ids.append(b.neg(ids[node[1]]))
        else:
            ids.append(b.or_([ids[c] for c in node[1]], tables=[tables[c] for c in node[1]], k=k))
    return ids[-1]


def compose_template(frag: Fragmentation, leaf_circuits: Sequence[Circuit]) -> Circuit:
    """Plug leaf circuits into the holes of the fragmentation's template."""
    if len(leaf_circuits) != frag.template.hole_count:
        raise ArityError(f"template has {frag.template.hole_count} holes "
                         f"but {len(leaf_circuits)} leaf circuits were given")
    if frag.template.nodes == ((HOLE, 0),):
        return leaf_circuits[0]
    b = CircuitBuilder()
    roots = [_copy_into(b, C) for C in leaf_circuits]
    nfacts = max((C.nfacts for C in leaf_circuits), default=0)
    return b.build(_compose(b, frag, roots), nfacts)


def compile_query(phi: BoolFun, D: TidDatabase, ctx=None) -> Circuit:
    """A d-D for lin(Q_phi, D), for any phi with Euler characteristic 0."""
    from .fragment import fragment
    from .obdd import CompileContext

    e = euler(phi)
    if e != 0:
        from .analysis import classify

        verdict = classify(phi)
        raise NotCompilableError(
            f"euler characteristic is {e}, not 0; no d-D construction applies "
            f"(verdict {verdict.kind})", e, verdict)
    if ctx is None:
        ctx = CompileContext(D)
    frag = fragment(phi)
    b = ctx.builder
    leaves = [ctx.degenerate_gate(leaf) for leaf in frag.leaves]
    return b.build(_compose(b, frag, leaves), len(D))


# -- the .ddc format ---------------------------------------------------------------------

def export_circuit(C: Circuit) -> str:
    out = ["ddc v1", f"facts {C.nfacts}"]
    for i, g in enumerate(C.gates):
        kind = g[0]
        if kind == "v":
            out.append(f"{i} v {g[1]}")
        elif kind in ("t", "f"):
            out.append(f"{i} {kind}")
        elif kind == "n":
            out.append(f"{i} n {g[1]}")
        else:
            out.append(f"{i} {kind} {len(g[1])} " + " ".join(map(str, g[1])))
    out.append(f"root {C.root}")
    return "\n".join(out) + "\n"


def import_circuit(text: str) -> Circuit:
    lines = [(n, raw.strip()) for n, raw in enumerate(text.splitlines(), 1)
             if raw.strip() and not raw.strip().startswith("#")]
    if len(lines) < 3:
        raise ParseError("truncated circuit file", len(lines) + 1, 1)
    n, raw = lines[0]
    if raw != "ddc v1":
        raise ParseError("expected 'ddc v1'", n, 1)
    n, raw = lines[1]
    head = raw.split()
    if len(head) != 2 or head[0] != "facts" or not head[1].isdigit():
        raise ParseError("expected 'facts <count>'", n, 1)
    nfacts = int(head[1])
    gates: List[tuple] = []
    for n, raw in lines[2:-1]:
        toks = raw.split()
        if not toks[0].isdigit() or int(toks[0]) != len(gates):
            raise ParseError(f"expected gate id {len(gates)}", n, 1)
        if len(toks) < 2:
            raise ParseError("missing gate kind", n, len(toks[0]) + 2)
        kind = toks[1]
        try:
            if kind == "v" and len(toks) == 3:
                g = ("v", toks[2])
            elif kind in ("t", "f") and len(toks) == 2:
                g = (kind,)
            elif kind == "n" and len(toks) == 3:
                g = ("n", int(toks[2]))
            elif kind in ("a", "o"):
                cnt = int(toks[2])
                kids = tuple(int(t) for t in toks[3:])
                if len(kids) != cnt or cnt == 0:
                    raise ParseError(f"gate declares {cnt} children but lists {len(kids)}", n, 1)
                g = (kind, kids)
            else:
                raise ParseError(f"unknown or malformed gate {kind!r}", n, raw.index(kind) + 1)
        except (ValueError, IndexError):
            raise ParseError("malformed gate line", n, 1) from None
        for c in _children(g):
            if c >= len(gates):
                raise ParseError(f"child {c} does not precede gate {len(gates)} (not topological)", n, 1)
        gates.append(g)
    n, raw = lines[-1]
    toks = raw.split()
    if len(toks) != 2 or toks[0] != "root" or not toks[1].isdigit():
        raise ParseError("expected 'root <id>'", n, 1)
    root = int(toks[1])
    if root >= len(gates):
        raise ParseError(f"root {root} beyond the {len(gates)} gates", n, 6)
    C = Circuit(tuple(gates), root, nfacts)
    if len(C.labels) > nfacts:
        raise ParseError(f"circuit uses {len(C.labels)} facts but declares {nfacts}", 2, 1)
    return C
