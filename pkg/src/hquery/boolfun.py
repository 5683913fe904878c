"""Boolean functions on V = {0, ..., k} stored as truth-table bitsets.

A valuation is an ``int`` whose bit ``i`` is set iff variable ``i`` is in
the valuation.  A function's table is an ``int`` of ``2**(k+1)`` bits
where bit ``nu`` is set iff ``nu`` satisfies the function.  Nearly every
predicate below is a handful of whole-table shifts and masks, so they stay
cheap even in exhaustive sweeps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, List, Optional, Sequence

from .errors import (
    ArityError,
    NotMonotoneError,
    ParseError,
)

MAX_K = 20


# -- bit masks ---------------------------------------------------------------

@lru_cache(maxsize=None)
def full_mask(nvars: int) -> int:
    return (1 << (1 << nvars)) - 1


@lru_cache(maxsize=None)
def var_mask(nvars: int, l: int) -> int:
    """Mask of the valuations (table positions) that contain variable ``l``."""
    size = 1 << nvars
    period = 1 << (l + 1)
    block = ((1 << (1 << l)) - 1) << (1 << l)
    repeat = full_mask(nvars) // ((1 << period) - 1)
    return (block * repeat) & ((1 << size) - 1)


@lru_cache(maxsize=None)
def parity_masks(nvars: int):
    """Return ``(even, odd)``: positions of even- and odd-size valuations."""
    even, odd = 1, 0
    for n in range(nvars):
        shift = 1 << n
        even, odd = even | (odd << shift), odd | (even << shift)
    return even, odd


def popcount(x: int) -> int:
    return x.bit_count()


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


# -- valuations ----------------------------------------------------------------

def valuation(elements: Iterable[int]) -> int:
    v = 0
    for e in elements:
        v |= 1 << e
    return v


def members(nu: int) -> List[int]:
    return list(iter_bits(nu))


def size(nu: int) -> int:
    return nu.bit_count()


def flip(nu: int, l: int, k: Optional[int] = None) -> int:
    """Toggle the membership of variable ``l`` in ``nu``."""
    if l < 0 or (k is not None and l > k):
        raise ArityError(f"variable {l} out of range 0..{k}")
    return nu ^ (1 << l)


def format_valuation(nu: int) -> str:
    if nu == 0:
        return "."
    return " ".join(str(i) for i in iter_bits(nu))


def show_valuation(nu: int) -> str:
    return "{" + ",".join(str(i) for i in iter_bits(nu)) + "}"


# -- functions -----------------------------------------------------------------

@dataclass(frozen=True)
class BoolFun:
    k: int
    table: int

    def __post_init__(self):
        if self.k < 1:
            raise ArityError(f"k must be >= 1, got {self.k}")
        if self.table < 0 or self.table >> (1 << (self.k + 1)):
            raise ArityError("truth table wider than 2^(k+1) bits")

    # constructors
    @classmethod
    def bottom(cls, k: int) -> "BoolFun":
        return cls(k, 0)

    @classmethod
    def top(cls, k: int) -> "BoolFun":
        return cls(k, full_mask(k + 1))

    @classmethod
    def from_sat(cls, k: int, sat: Iterable) -> "BoolFun":
        """Build from satisfying valuations, given as ints or iterables of variables."""
        table = 0
        for nu in sat:
            if not isinstance(nu, int):
                nu = valuation(nu)
            if nu >> (k + 1):
                raise ArityError(f"valuation {show_valuation(nu)} mentions a variable > {k}")
            table |= 1 << nu
        return cls(k, table)

    @classmethod
    def variable(cls, k: int, l: int) -> "BoolFun":
        if not 0 <= l <= k:
            raise ArityError(f"variable {l} out of range 0..{k}")
        return cls(k, var_mask(k + 1, l))

    @property
    def nvars(self) -> int:
        return self.k + 1

    def __call__(self, nu: int) -> bool:
        return bool(self.table >> nu & 1)

    def sat(self) -> List[int]:
        return list(iter_bits(self.table))

    def sat_count(self) -> int:
        return self.table.bit_count()

    def __len__(self):
        return self.sat_count()

    def _check(self, other: "BoolFun"):
        if other.k != self.k:
            raise ArityError(f"functions over different variable sets (k={self.k} vs k={other.k})")

    def __invert__(self) -> "BoolFun":
        return BoolFun(self.k, self.table ^ full_mask(self.nvars))

    def __and__(self, other: "BoolFun") -> "BoolFun":
        self._check(other)
        return BoolFun(self.k, self.table & other.table)

    def __or__(self, other: "BoolFun") -> "BoolFun":
        self._check(other)
        return BoolFun(self.k, self.table | other.table)

    def __repr__(self):
        return f"BoolFun(k={self.k}, sat=[{', '.join(show_valuation(v) for v in self.sat())}])"


def euler(phi: BoolFun) -> int:
    """Signed count of satisfying valuations, +1 for even size and -1 for odd."""
    even, odd = parity_masks(phi.nvars)
    return (phi.table & even).bit_count() - (phi.table & odd).bit_count()


def _cofactors(phi: BoolFun, l: int):
    """Tables of phi(nu) and phi(nu + {l}), both indexed by nu without ``l``."""
    m = var_mask(phi.nvars, l)
    lo = phi.table & ~m
    hi = (phi.table >> (1 << l)) & ~m
    return lo, hi


def dependencies(phi: BoolFun) -> frozenset:
    deps = set()
    for l in range(phi.nvars):
        lo, hi = _cofactors(phi, l)
        if lo != hi:
            deps.add(l)
    return frozenset(deps)


def is_degenerate(phi: BoolFun) -> bool:
    return len(dependencies(phi)) != phi.nvars


def is_monotone(phi: BoolFun) -> bool:
    # covering pairs (nu, nu + {l}) suffice
    for l in range(phi.nvars):
        lo, hi = _cofactors(phi, l)
        if lo & ~hi:
            return False
    return True


def _clause_key(c):
    return (len(c), sorted(c))


def minimal_valuations(phi: BoolFun) -> List[int]:
    """Inclusion-minimal satisfying valuations, as ints."""
    t = phi.table
    covered = 0
    for l in range(phi.nvars):
        m = var_mask(phi.nvars, l)
        covered |= (t & ~m) << (1 << l)
    return list(iter_bits(t & ~covered))


def maximal_falsifying(phi: BoolFun) -> List[int]:
    """Inclusion-maximal non-satisfying valuations, as ints."""
    f = (~phi).table
    covered = 0
    for l in range(phi.nvars):
        m = var_mask(phi.nvars, l)
        covered |= (f & m) >> (1 << l)
    return list(iter_bits(f & ~covered))


def _require_monotone(phi: BoolFun, what: str):
    if not is_monotone(phi):
        raise NotMonotoneError(f"{what} is only defined for monotone functions")


def minimized_dnf(phi: BoolFun) -> List[frozenset]:
    """The unique irredundant DNF of a monotone function, clauses sorted by size."""
    _require_monotone(phi, "the minimized DNF")
    clauses = [frozenset(iter_bits(nu)) for nu in minimal_valuations(phi)]
    return sorted(clauses, key=_clause_key)


def minimized_cnf(phi: BoolFun) -> List[frozenset]:
    """The unique irredundant CNF of a monotone function.

    Each clause is the complement of a maximal falsifying valuation: for a
    monotone function, a valuation falsifies iff it is contained in one of
    those, i.e. iff it misses every variable of the matching clause.
    """
    _require_monotone(phi, "the minimized CNF")
    everything = (1 << phi.nvars) - 1
    clauses = [frozenset(iter_bits(everything & ~nu)) for nu in maximal_falsifying(phi)]
    clauses = sorted(clauses, key=_clause_key)
    assert eval_cnf(phi.k, clauses) == phi
    return clauses


def eval_dnf(k: int, clauses: Sequence[Iterable[int]]) -> BoolFun:
    nvars = k + 1
    table = 0
    for c in clauses:
        term = full_mask(nvars)
        for v in c:
            term &= var_mask(nvars, v)
        table |= term
    return BoolFun(k, table)


def eval_cnf(k: int, clauses: Sequence[Iterable[int]]) -> BoolFun:
    nvars = k + 1
    table = full_mask(nvars)
    for c in clauses:
        term = 0
        for v in c:
            term |= var_mask(nvars, v)
        table &= term
    return BoolFun(k, table)


def combine(op: str, phi: BoolFun, psi: Optional[BoolFun] = None) -> BoolFun:
    op = op.upper()
    if op == "NOT":
        if psi is not None:
            raise ArityError("NOT takes a single operand")
        return ~phi
    if psi is None:
        raise ArityError(f"{op} takes two operands")
    if op == "AND":
        return phi & psi
    if op == "OR":
        return phi | psi
    raise ValueError(f"unknown operator {op!r}")


def is_disjoint(phi: BoolFun, psi: BoolFun) -> bool:
    return (phi & psi).table == 0


# -- the .bf text format -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


class _FormulaParser:
    """Recursive descent over ``|`` < ``&`` < ``!`` with parentheses."""

    def __init__(self, text, k, line, col0):
        self.k = k
        self.nvars = k + 1
        self.line = line
        self.tokens = []
        for m in _TOKEN.finditer(text):
            if m.group(1) is not None:
                self.tokens.append(("num", m.group(1), col0 + m.start(1)))
            elif m.group(2) is not None:
                self.tokens.append(("op", m.group(2), col0 + m.start(2)))
        self.pos = 0
        self.end_col = col0 + len(text)

    def error(self, msg, col=None):
        if col is None:
            col = self.tokens[self.pos][2] if self.pos < len(self.tokens) else self.end_col
        raise ParseError(msg, self.line, col + 1)

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def parse(self) -> int:
        if not self.tokens:
            self.error("empty formula")
        value = self.disjunction()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()[1]!r}")
        return value

    def disjunction(self):
        value = self.conjunction()
        while self.peek() and self.peek()[1] == "|":
            self.pos += 1
            value |= self.conjunction()
        return value

    def conjunction(self):
        value = self.negation()
        while self.peek() and self.peek()[1] == "&":
            self.pos += 1
            value &= self.negation()
        return value

    def negation(self):
        tok = self.peek()
        if tok and tok[1] == "!":
            self.pos += 1
            return full_mask(self.nvars) ^ self.negation()
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of formula")
        kind, text, col = tok
        if kind == "num":
            v = int(text)
            if v > self.k:
                self.error(f"variable {v} exceeds k={self.k}", col)
            self.pos += 1
            return var_mask(self.nvars, v)
        if text == "(":
            self.pos += 1
            value = self.disjunction()
            tok = self.peek()
            if tok is None or tok[1] != ")":
                self.error("expected ')'")
            self.pos += 1
            return value
        self.error(f"unexpected {text!r}", col)


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, raw


def parse_function(text: str) -> BoolFun:
    """Parse the ``.bf`` format: a ``k`` header then a formula or a sat list."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty function file", 1, 1)
    lineno, raw = lines[0]
    head = raw.split()
    if len(head) != 2 or head[0] != "k" or not head[1].isdigit():
        raise ParseError("expected 'k <int>'", lineno, 1)
    k = int(head[1])
    if k < 1:
        raise ParseError("k must be at least 1", lineno, raw.index(head[1]) + 1)
    if k > MAX_K:
        raise ParseError(f"k={k} exceeds the supported maximum {MAX_K}", lineno, raw.index(head[1]) + 1)
    if len(lines) < 2:
        raise ParseError("expected 'formula <expr>' or 'sat'", lineno + 1, 1)
    lineno, raw = lines[1]
    body = raw.strip()
    if body.startswith("formula"):
        if len(lines) > 2:
            raise ParseError("unexpected content after formula", lines[2][0], 1)
        start = raw.index("formula") + len("formula")
        table = _FormulaParser(raw[start:], k, lineno, start).parse()
        return BoolFun(k, table)
    if body == "sat":
        table = 0
        for lineno, raw in lines[2:]:
            tokens = raw.split()
            if tokens == ["."]:
                nu = 0
            else:
                nu = 0
                for tok in tokens:
                    col = raw.index(tok) + 1
                    if not tok.isdigit():
                        raise ParseError(f"bad variable index {tok!r}", lineno, col)
                    v = int(tok)
                    if v > k:
                        raise ParseError(f"variable {v} exceeds k={k}", lineno, col)
                    if nu >> v & 1:
                        raise ParseError(f"variable {v} repeated", lineno, col)
                    nu |= 1 << v
            if table >> nu & 1:
                raise ParseError(f"duplicate valuation {show_valuation(nu)}", lineno, 1)
            table |= 1 << nu
        return BoolFun(k, table)
    raise ParseError("expected 'formula <expr>' or 'sat'", lineno, 1)


def format_function(phi: BoolFun) -> str:
    """Canonical sat-list serialization, valuations in increasing numeric order."""
    out = [f"k {phi.k}", "sat"]
    out.extend(format_valuation(nu) for nu in phi.sat())
    return "\n".join(out) + "\n"


def all_functions(k: int) -> Iterator[BoolFun]:
    """Every Boolean function on k+1 variables, in table order."""
    for table in range(1 << (1 << (k + 1))):
        yield BoolFun(k, table)
