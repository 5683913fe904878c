"""Tuple-independent databases over the H-query schema and exact PQE oracles.

Facts get stable indices in file order; a world is an int bitmask over those
indices.  The fast oracle evaluates the lineage bit-parallel over all
worlds (one bit per world), the naive one walks the worlds one at a time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .boolfun import BoolFun, full_mask, var_mask
from .errors import ArityError, GuardError, ParseError

World = int

ORACLE_MAX_FACTS = 30
LINEAGE_MAX_FACTS = 20

_PRED = re.compile(r"^(R|T|S([1-9]\d*))$")


def parse_prob(text: str) -> Fraction:
    """Exact rational from ``p/q`` or a finite decimal; no floats involved."""
    if not re.fullmatch(r"\d+(/\d+|\.\d*)?|\.\d+", text):
        raise ValueError(f"bad probability {text!r}")
    p = Fraction(text)
    if not 0 <= p <= 1:
        raise ValueError(f"probability {text} outside [0,1]")
    return p


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Fact:
    pred: str
    args: Tuple[str, ...]
    prob: Fraction = Fraction(1, 2)

    def __post_init__(self):
        m = _PRED.match(self.pred)
        if not m:
            raise ArityError(f"unknown predicate {self.pred!r}")
        want = 2 if m.group(2) else 1
        if len(self.args) != want:
            raise ArityError(f"{self.pred} takes {want} argument(s), got {len(self.args)}")
        if not 0 <= self.prob <= 1:
            raise ValueError(f"probability {self.prob} outside [0,1]")

    @property
    def s_index(self) -> int:
        """i for S_i, 0 for R and T."""
        return int(self.pred[1:]) if self.pred[0] == "S" else 0

    @property
    def label(self) -> str:
        return f"{self.pred}({','.join(self.args)})"


@dataclass(frozen=True)
class TidDatabase:
    k: int
    domain: Tuple[str, ...]
    facts: Tuple[Fact, ...]
    _index: Dict[Tuple[str, Tuple[str, ...]], int] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        idx = {}
        dom = set(self.domain)
        for i, f in enumerate(self.facts):
            key = (f.pred, f.args)
            if key in idx:
                raise ValueError(f"duplicate fact {f.label}")
            if f.s_index > self.k:
                raise ArityError(f"{f.label} uses S{f.s_index} but k={self.k}")
            if not set(f.args) <= dom:
                raise ValueError(f"{f.label} mentions a constant outside the domain")
            idx[key] = i
        object.__setattr__(self, "_index", idx)

    def __len__(self):
        return len(self.facts)

    def index(self, pred: str, *args: str) -> Optional[int]:
        return self._index.get((pred, tuple(args)))

    def index_of_label(self, label: str) -> Optional[int]:
        m = re.fullmatch(r"(\w+)\(([^()]*)\)", label)
        if not m:
            return None
        return self.index(m.group(1), *m.group(2).split(","))

    @property
    def labels(self) -> List[str]:
        return [f.label for f in self.facts]

    @classmethod
    def build(cls, k: int, facts: Sequence[Fact]) -> "TidDatabase":
        domain: List[str] = []
        for f in facts:
            for a in f.args:
                if a not in domain:
                    domain.append(a)
        return cls(k, tuple(domain), tuple(facts))

    @classmethod
    def full(cls, k: int, domain: Sequence[str], probs=None) -> "TidDatabase":
        """Every fact over ``domain``; ``probs`` is an optional iterator of probabilities."""
        facts = []
        for a in domain:
            facts.append(("R", (a,)))
        for i in range(1, k + 1):
            for a in domain:
                for b in domain:
                    facts.append((f"S{i}", (a, b)))
        for b in domain:
            facts.append(("T", (b,)))
        it = iter(probs) if probs is not None else None
        return cls(k, tuple(domain), tuple(Fact(p, args, next(it) if it else Fraction(1, 2))
                                          for p, args in facts))

    def to_text(self) -> str:
        return "".join(f"{f.pred} {' '.join(f.args)} {format_rational(f.prob)}\n" for f in self.facts)


def parse_db(text: str, k: Optional[int] = None) -> TidDatabase:
    """Parse the ``.tid`` format: one ``<pred> <arg1> [<arg2>] <prob>`` per line."""
    facts: List[Fact] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        pred = toks[0]
        col = raw.index(pred) + 1
        m = _PRED.match(pred)
        if not m:
            raise ParseError(f"unknown predicate {pred!r}", lineno, col)
        want = 2 if m.group(2) else 1
        if len(toks) != want + 2:
            raise ParseError(f"{pred} takes {want} argument(s) and a probability", lineno, col)
        try:
            prob = parse_prob(toks[-1])
        except ValueError as e:
            raise ParseError(str(e), lineno, raw.rindex(toks[-1]) + 1) from None
        key = (pred, tuple(toks[1:-1]))
        if key in seen:
            raise ParseError(f"duplicate fact {pred}({','.join(key[1])})", lineno, col)
        seen.add(key)
        facts.append(Fact(pred, key[1], prob))
    top = max((f.s_index for f in facts), default=0)
    if k is None:
        k = max(1, top)
    elif top > k:
        raise ArityError(f"database uses S{top} but the function has k={k}")
    return TidDatabase.build(k, facts)


# -- semantics -------------------------------------------------------------------

def _has(D: TidDatabase, w: World, pred: str, *args: str) -> bool:
    i = D.index(pred, *args)
    return i is not None and bool(w >> i & 1)


def h_satisfied(i: int, w: World, D: TidDatabase) -> bool:
    k = D.k
    if not 0 <= i <= k:
        raise ArityError(f"h index {i} out of range 0..{k}")
    for a in D.domain:
        for b in D.domain:
            if i == 0:
                ok = _has(D, w, "R", a) and _has(D, w, "S1", a, b)
            elif i == k:
                ok = _has(D, w, f"S{k}", a, b) and _has(D, w, "T", b)
            else:
                ok = _has(D, w, f"S{i}", a, b) and _has(D, w, f"S{i + 1}", a, b)
            if ok:
                return True
    return False


def world_valuation(w: World, D: TidDatabase) -> int:
    """The set of i such that h_{k,i} holds in ``w``."""
    return sum(1 << i for i in range(D.k + 1) if h_satisfied(i, w, D))


def query_holds(phi: BoolFun, w: World, D: TidDatabase) -> bool:
    _check_k(phi, D)
    return phi(world_valuation(w, D))


def world_probability(D: TidDatabase, w: World) -> Fraction:
    p = Fraction(1)
    for i, f in enumerate(D.facts):
        p *= f.prob if w >> i & 1 else 1 - f.prob
    return p


def worlds(D: TidDatabase) -> Iterator[World]:
    return iter(range(1 << len(D.facts)))


def _check_k(phi: BoolFun, D: TidDatabase):
    if phi.k != D.k:
        raise ArityError(f"function has k={phi.k} but the database has k={D.k}")


def naive_oracle(phi: BoolFun, D: TidDatabase, max_facts: int = 16) -> Fraction:
    """Definitional sum over worlds, one world at a time."""
    _check_k(phi, D)
    if len(D) > max_facts:
        raise GuardError(f"{len(D)} facts exceed the naive oracle guard of {max_facts}")
    total = Fraction(0)
    for w in worlds(D):
        if query_holds(phi, w, D):
            total += world_probability(D, w)
    return total


# -- bit-parallel lineage --------------------------------------------------------------

def _h_tables(D: TidDatabase, nbits: int, fixed: int = 0, nfixed: int = 0) -> List[int]:
    """World tables of every h_{k,i}.

    The first ``nbits`` facts are free (one table bit per assignment); the
    remaining ``nfixed`` facts take their values from ``fixed``.
    """
    full = full_mask(nbits)

    def lit(pred, *args):
        i = D.index(pred, *args)
        if i is None:
            return 0
        if i < nbits:
            return var_mask(nbits, i)
        return full if fixed >> (i - nbits) & 1 else 0

    k = D.k
    out = []
    for i in range(k + 1):
        acc = 0
        for a in D.domain:
            for b in D.domain:
                if i == 0:
                    x = lit("R", a) & lit("S1", a, b)
                elif i == k:
                    x = lit(f"S{k}", a, b) & lit("T", b)
                else:
                    x = lit(f"S{i}", a, b) & lit(f"S{i + 1}", a, b)
                acc |= x
        out.append(acc)
    return out


def _lineage_from_h(phi: BoolFun, hs: List[int], full: int) -> int:
    table = 0
    for nu in phi.sat():
        t = full
        for i, h in enumerate(hs):
            t &= h if nu >> i & 1 else full ^ h
            if not t:
                break
        table |= t
    return table


def lineage_table(phi: BoolFun, D: TidDatabase, max_facts: int = LINEAGE_MAX_FACTS) -> int:
    """lin(Q_phi, D) as a truth table over the fact variables (bit w = world w)."""
    _check_k(phi, D)
    n = len(D)
    if n > max_facts:
        raise GuardError(f"{n} facts exceed the lineage guard of {max_facts}")
    return _lineage_from_h(phi, _h_tables(D, n), full_mask(n))


def _int_weights(probs: Sequence[Fraction]):
    """Per-fact integer weights (absent, present) over a common denominator."""
    q = 1
    for p in probs:
        q = lcm(q, p.denominator)
    return q, [((1 - p) * q, p * q) for p in probs]


def _chunk_sums(weights) -> List[int]:
    # S[v] = product of weights for the low facts under assignment v
    S = [1]
    for w0, w1 in weights:
        a, b = int(w0), int(w1)
        S = [s * a for s in S] + [s * b for s in S]
    return S


def weighted_count(table: int, probs: Sequence[Fraction]) -> Fraction:
    """Sum of world probabilities over the worlds set in ``table``, exactly.

    The table is read a byte at a time: a byte covers the 8 assignments of
    the three lowest facts and is priced by a 256-entry lookup, then scaled
    by the weight of the higher facts.
    """
    n = len(probs)
    if not table:
        return Fraction(0)
    q, ws = _int_weights(probs)
    lo = min(n, 3)
    S = _chunk_sums(ws[:lo])
    byte_sum = [0] * 256
    for b in range(1, 256):
        low = b & -b
        i = low.bit_length() - 1
        byte_sum[b] = byte_sum[b ^ low] + (S[i] if i < len(S) else 0)
    high = _chunk_sums(ws[lo:])
    data = table.to_bytes(max(1, len(high) << lo >> 3), "little")
    total = sum(w * byte_sum[b] for w, b in zip(high, data) if b)
    return Fraction(total, q ** n)


def oracle_pqe(phi: BoolFun, D: TidDatabase, max_facts: int = ORACLE_MAX_FACTS) -> Fraction:
    """Exact Pr(Q_phi) by summing over all 2^|D| worlds."""
    _check_k(phi, D)
    n = len(D)
    if n > max_facts:
        raise GuardError(f"{n} facts exceed the oracle guard of {max_facts}; raise --max-facts")
    probs = [f.prob for f in D.facts]
    if n <= LINEAGE_MAX_FACTS:
        return weighted_count(lineage_table(phi, D), probs)
    # enumerate the facts beyond the table width one assignment at a time
    nb = LINEAGE_MAX_FACTS
    full = full_mask(nb)
    total = Fraction(0)
    for fixed in range(1 << (n - nb)):
        wfix = Fraction(1)
        for j, p in enumerate(probs[nb:]):
            wfix *= p if fixed >> j & 1 else 1 - p
        if wfix:
            t = _lineage_from_h(phi, _h_tables(D, nb, fixed, n - nb), full)
            total += wfix * weighted_count(t, probs[:nb])
    return total
