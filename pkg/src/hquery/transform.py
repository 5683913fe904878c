"""The +/-(nu, l) rewrite system on Boolean functions.

A step colors (``+``) or uncolors (``-``) the two adjacent hypercube nodes
``nu`` and ``nu ^ (1 << l)``; it never changes the Euler characteristic.
The constructions here build explicit step lists: chainkill/chainswap
along clean paths, reduction to the constant-false function, even-support
and canonical normal forms, and witnesses between any two functions of
equal Euler characteristic.

Path choices are deterministic: between two valuations we always walk the
lexicographically smallest shortest path, so every trace is reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .boolfun import BoolFun, euler, format_valuation, iter_bits, show_valuation
from .errors import (
    ArityError,
    InvalidChainError,
    InvalidStepError,
    NothingToFetchError,
    NotReducibleError,
    NoWitnessError,
    ParseError,
    WrongSignError,
)

PLUS = "+"
MINUS = "-"


@dataclass(frozen=True)
class RewriteStep:
    sign: str
    nu: int
    l: int

    def __post_init__(self):
        if self.sign not in (PLUS, MINUS):
            raise ValueError(f"bad step sign {self.sign!r}")

    @property
    def pair(self) -> Tuple[int, int]:
        return self.nu, self.nu ^ (1 << self.l)

    def inverse(self) -> "RewriteStep":
        return RewriteStep(MINUS if self.sign == PLUS else PLUS, self.nu, self.l)

    def __str__(self):
        return f"{self.sign}({show_valuation(self.nu)},{self.l})"


def apply_step(phi: BoolFun, step: RewriteStep) -> BoolFun:
    if step.l > phi.k:
        raise ArityError(f"step variable {step.l} exceeds k={phi.k}")
    a, b = step.pair
    if a >> phi.nvars:
        raise ArityError(f"step valuation {show_valuation(a)} mentions a variable > {phi.k}")
    pair = (1 << a) | (1 << b)
    present = phi.table & pair
    if step.sign == PLUS:
        if present:
            bad = a if phi(a) else b
            raise InvalidStepError(f"{step}: {show_valuation(bad)} is already satisfying", bad)
        return BoolFun(phi.k, phi.table | pair)
    if present != pair:
        bad = b if phi(a) else a
        raise InvalidStepError(f"{step}: {show_valuation(bad)} is not satisfying", bad)
    return BoolFun(phi.k, phi.table ^ pair)


def apply_steps(phi: BoolFun, steps: Iterable[RewriteStep]) -> BoolFun:
    for s in steps:
        phi = apply_step(phi, s)
    return phi


class TraceCheck(NamedTuple):
    ok: bool
    failed_at: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class RewriteTrace:
    start: BoolFun
    steps: Tuple[RewriteStep, ...] = ()

    def __len__(self):
        return len(self.steps)

    def end(self) -> BoolFun:
        return apply_steps(self.start, self.steps)

    def states(self) -> List[BoolFun]:
        out = [self.start]
        for s in self.steps:
            out.append(apply_step(out[-1], s))
        return out

    def reversed(self) -> "RewriteTrace":
        """The trace from end back to start: steps reversed, signs swapped."""
        return RewriteTrace(self.end(), tuple(s.inverse() for s in reversed(self.steps)))

    def then(self, steps: Iterable[RewriteStep]) -> "RewriteTrace":
        return RewriteTrace(self.start, self.steps + tuple(steps))


def verify_trace(trace: RewriteTrace, expected_end: BoolFun) -> TraceCheck:
    phi = trace.start
    for i, s in enumerate(trace.steps):
        try:
            phi = apply_step(phi, s)
        except (InvalidStepError, ArityError) as e:
            return TraceCheck(False, i, str(e))
    if phi != expected_end:
        return TraceCheck(False, len(trace.steps), "trace does not end at the expected function")
    return TraceCheck(True)


# -- hypercube ----------------------------------------------------------------

class ColoredGraph:
    """The hypercube on 2^(k+1) valuations with satisfying nodes colored."""

    def __init__(self, phi: BoolFun):
        self.phi = phi
        self.k = phi.k

    def nodes(self) -> range:
        return range(1 << self.phi.nvars)

    def colored(self, nu: int) -> bool:
        return self.phi(nu)

    def neighbors(self, nu: int) -> List[int]:
        return sorted(nu ^ (1 << l) for l in range(self.phi.nvars))

    def edges(self):
        for nu in self.nodes():
            for l in range(self.phi.nvars):
                if not nu >> l & 1:
                    yield nu, nu | (1 << l)

    def is_bipartite_by_parity(self) -> bool:
        return all((a.bit_count() - b.bit_count()) % 2 for a, b in self.edges())

    def to_dot(self, name: str = "hypercube") -> str:
        lines = [f"graph {name} {{"]
        for nu in self.nodes():
            style = ', style=filled, fillcolor=orange' if self.colored(nu) else ""
            lines.append(f'  n{nu} [label="{show_valuation(nu)}"{style}];')
        for a, b in self.edges():
            lines.append(f"  n{a} -- n{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def shortest_path(src: int, dst: int) -> List[int]:
    """Lexicographically smallest shortest path in the hypercube.

    Every shortest path flips each differing bit once; the smallest next
    node clears the highest differing set bit if there is one, otherwise
    sets the lowest differing clear bit.
    """
    path = [src]
    cur = src
    while cur != dst:
        diff = cur ^ dst
        clear = diff & cur
        if clear:
            cur ^= 1 << (clear.bit_length() - 1)
        else:
            cur ^= diff & -diff
        path.append(cur)
    return path


def _check_path(path: Sequence[int], k: int):
    if len(path) < 2:
        raise InvalidChainError("a chain needs at least two nodes")
    if len(set(path)) != len(path):
        raise InvalidChainError("chain is not a simple path")
    for a, b in zip(path, path[1:]):
        d = a ^ b
        if d == 0 or d & (d - 1):
            raise InvalidChainError(f"{show_valuation(a)} and {show_valuation(b)} are not adjacent")
        if (a | b) >> (k + 1):
            raise InvalidChainError(f"chain leaves the variable set 0..{k}")


def _step(sign, a, b) -> RewriteStep:
    return RewriteStep(sign, a, (a ^ b).bit_length() - 1)


def _check_interior(phi: BoolFun, path):
    for nu in path[1:-1]:
        if phi(nu):
            raise InvalidChainError(f"interior node {show_valuation(nu)} is satisfying")


def chainkill(phi: BoolFun, path: Sequence[int]) -> List[RewriteStep]:
    """Steps uncoloring both (satisfying, opposite-parity) ends of a clean path."""
    path = list(path)
    _check_path(path, phi.k)
    n = len(path) - 2
    if n % 2:
        raise InvalidChainError("chainkill needs endpoints of opposite parity")
    if not (phi(path[0]) and phi(path[-1])):
        raise InvalidChainError("chainkill needs both endpoints satisfying")
    _check_interior(phi, path)
    steps = []
    for j in range(n // 2):
        steps.append(_step(PLUS, path[2 * j + 1], path[2 * j + 2]))
        steps.append(_step(MINUS, path[2 * j], path[2 * j + 1]))
    steps.append(_step(MINUS, path[n], path[n + 1]))
    return steps


def chainswap(phi: BoolFun, path: Sequence[int]) -> List[RewriteStep]:
    """Steps moving the color from the first node of a clean path to its last."""
    path = list(path)
    _check_path(path, phi.k)
    n = len(path) - 2
    if n % 2 == 0:
        raise InvalidChainError("chainswap needs endpoints of equal parity")
    if not phi(path[0]):
        raise InvalidChainError("chainswap needs a satisfying start")
    if phi(path[-1]):
        raise InvalidChainError("chainswap needs a non-satisfying end")
    _check_interior(phi, path)
    steps = []
    for j in range((n + 1) // 2):
        steps.append(_step(PLUS, path[2 * j + 1], path[2 * j + 2]))
        steps.append(_step(MINUS, path[2 * j], path[2 * j + 1]))
    return steps


def _parity(nu: int) -> int:
    return nu.bit_count() & 1


def fetch_pair(phi: BoolFun) -> Tuple[int, int, List[int]]:
    """Two satisfying valuations of opposite parity joined by a clean path."""
    sat = phi.sat()
    if len(sat) == abs(euler(phi)):
        raise NothingToFetchError("all satisfying valuations have the same parity")
    first = sat[0]
    p = _parity(first)
    other = min((nu for nu in sat if _parity(nu) != p), key=lambda nu: ((nu ^ first).bit_count(), nu))
    walk = shortest_path(first, other)
    m = len(walk) - 2
    i = max(j for j in range(m + 1) if _parity(walk[j]) == p and phi(walk[j]))
    i2 = min(j for j in range(i + 1, m + 2) if _parity(walk[j]) != p and phi(walk[j]))
    path = walk[i:i2 + 1]
    return path[0], path[-1], path


def _kill_once(phi: BoolFun):
    _, _, path = fetch_pair(phi)
    steps = chainkill(phi, path)
    out = apply_steps(phi, steps)
    # a chainkill uncolors exactly its two ends; anything else would stall the loops below
    if out.table != phi.table & ~(1 << path[0]) & ~(1 << path[-1]):
        raise AssertionError(f"chainkill along {path} did not remove exactly its endpoints")
    return out, steps


def reduce_to_bot(phi: BoolFun) -> RewriteTrace:
    """A trace from ``phi`` to the constant-false function (needs Euler 0)."""
    e = euler(phi)
    if e != 0:
        raise NotReducibleError(f"euler characteristic is {e}; only functions with 0 reduce to false", e)
    steps: List[RewriteStep] = []
    cur = phi
    while cur.table:
        cur, more = _kill_once(cur)
        steps.extend(more)
    return RewriteTrace(phi, tuple(steps))


def _odd_mask(phi: BoolFun) -> int:
    from .boolfun import parity_masks

    return parity_masks(phi.nvars)[1]


def to_even_support(phi: BoolFun) -> RewriteTrace:
    """A trace to a function whose satisfying valuations all have even size."""
    e = euler(phi)
    if e < 0:
        raise WrongSignError(f"euler characteristic is {e}; negate the function first", e)
    odd = _odd_mask(phi)
    steps: List[RewriteStep] = []
    cur = phi
    while cur.table & odd:
        cur, more = _kill_once(cur)
        steps.extend(more)
    return RewriteTrace(phi, tuple(steps))


def _even_valuations(nvars: int) -> List[int]:
    return sorted((nu for nu in range(1 << nvars) if not _parity(nu)), key=lambda nu: (nu.bit_count(), nu))


def find_bad_pair(phi: BoolFun) -> Optional[Tuple[int, int]]:
    """Some (satisfying nu, non-satisfying nu2) of even sizes with |nu2| < |nu|.

    Prefers the smallest missing valuation and, among satisfying partners,
    a superset of it.
    """
    missing = next((nu for nu in _even_valuations(phi.nvars) if not phi(nu)), None)
    if missing is None:
        return None
    bigger = [nu for nu in phi.sat() if nu.bit_count() > missing.bit_count()]
    if not bigger:
        return None
    supersets = [nu for nu in bigger if nu & missing == missing]
    if supersets:
        return min(supersets), missing
    return min(bigger, key=lambda nu: (-nu.bit_count(), nu)), missing


def count_bad_pairs(phi: BoolFun) -> int:
    evens = _even_valuations(phi.nvars)
    sat = [nu for nu in evens if phi(nu)]
    unsat = [nu for nu in evens if not phi(nu)]
    return sum(1 for a in sat for b in unsat if b.bit_count() < a.bit_count())


def is_canonical(phi: BoolFun) -> bool:
    return not phi.table & _odd_mask(phi) and count_bad_pairs(phi) == 0


def _descend(top: int, bottom: int) -> List[int]:
    path = [top]
    cur = top
    for v in iter_bits(top & ~bottom):
        cur &= ~(1 << v)
        path.append(cur)
    return path


def _alternating(src: int, dst: int) -> List[int]:
    """Path between equal-size valuations through valuations one larger."""
    path = [src]
    cur = src
    while cur != dst:
        add = dst & ~cur
        cur |= add & -add
        path.append(cur)
        drop = cur & ~dst
        cur &= ~(drop & -drop)
        path.append(cur)
    return path


def _swap_down(phi: BoolFun, big: int, small: int):
    """Move the satisfying node of a descending path closest to ``small`` onto it."""
    path = _descend(big, small)
    i = max(j for j in range(len(path) - 1) if phi(path[j]))
    steps = chainswap(phi, path[i:])
    return apply_steps(phi, steps), steps


def _cascade(phi: BoolFun, path: List[int], marked: List[int]):
    """Chainswap between consecutive marked positions of ``path``, top first.

    ``marked`` lists increasing indices of satisfying nodes, and the last
    index of ``path`` must be non-satisfying; the net effect uncolors
    ``path[marked[0]]`` and colors ``path[-1]``.
    """
    targets = marked[1:] + [len(path) - 1]
    steps: List[RewriteStep] = []
    for a, b in reversed(list(zip(marked, targets))):
        more = chainswap(phi, path[a:b + 1])
        phi = apply_steps(phi, more)
        steps.extend(more)
    return phi, steps


def canonicalize(phi: BoolFun) -> RewriteTrace:
    """A trace from an even-support function to its canonical form."""
    if phi.table & _odd_mask(phi):
        odd = next(nu for nu in phi.sat() if _parity(nu))
        raise InvalidStepError(f"odd-size satisfying valuation {show_valuation(odd)}; "
                               "canonicalize needs even support", odd)
    steps: List[RewriteStep] = []
    cur = phi
    while True:
        bad = find_bad_pair(cur)
        if bad is None:
            break
        big, small = bad
        if big & small != small:
            s = small.bit_count()
            below = [nu for nu in _subsets_of_size(big, s)]
            free = [nu for nu in below if not cur(nu)]
            if free:
                small = free[0]
            else:
                mid = below[0]
                path = _alternating(mid, small)
                eq = list(range(0, len(path), 2))
                j = next(idx for idx in eq if not cur(path[idx]))
                cur, more = _cascade(cur, path[:j + 1], [idx for idx in eq if idx < j])
                steps.extend(more)
                small = mid
        cur, more = _swap_down(cur, big, small)
        steps.extend(more)
    return RewriteTrace(phi, tuple(steps))


def _subsets_of_size(nu: int, s: int) -> List[int]:
    from itertools import combinations

    return sorted(sum(1 << v for v in c) for c in combinations(list(iter_bits(nu)), s))


def equalize(phi: BoolFun, psi: BoolFun) -> RewriteTrace:
    """Trace between two canonical functions with the same number of models."""
    if not (is_canonical(phi) and is_canonical(psi)):
        raise NoWitnessError("equalize expects two canonical functions")
    if phi.sat_count() != psi.sat_count():
        raise NoWitnessError("canonical functions differ in model count")
    steps: List[RewriteStep] = []
    cur = phi
    while cur != psi:
        src = min(iter_bits(cur.table & ~psi.table))
        dst = min(iter_bits(psi.table & ~cur.table))
        path = _alternating(src, dst)
        marked = [i for i in range(0, len(path) - 1, 2) if cur(path[i])]
        cur, more = _cascade(cur, path, marked)
        steps.extend(more)
    return RewriteTrace(phi, tuple(steps))


def _normal_form(phi: BoolFun) -> RewriteTrace:
    t1 = to_even_support(phi)
    t2 = canonicalize(t1.end())
    return t1.then(t2.steps)


def equivalence_witness(phi: BoolFun, psi: BoolFun) -> RewriteTrace:
    """A trace from ``phi`` to ``psi``; exists iff their Euler characteristics agree."""
    if phi.k != psi.k:
        raise ArityError(f"functions over different variable sets (k={phi.k} vs k={psi.k})")
    e, f = euler(phi), euler(psi)
    if e != f:
        raise NoWitnessError(f"euler characteristics differ ({e} vs {f}); no trace exists")
    if e < 0:
        # steps on the negation are the same pairs with opposite signs
        neg = equivalence_witness(~phi, ~psi)
        return RewriteTrace(phi, tuple(s.inverse() for s in neg.steps))
    fwd = _normal_form(phi)
    back = _normal_form(psi)
    mid = equalize(fwd.end(), back.end())
    return fwd.then(mid.steps).then(back.reversed().steps)


# -- the .trace text format --------------------------------------------------------

_STEP_LINE = re.compile(r"^\s*([+-])\s*(\d+)\s*:\s*(.*?)\s*$")


def format_trace(trace: RewriteTrace) -> str:
    out = [f"k {trace.start.k}"]
    for s in trace.steps:
        out.append(f"{s.sign} {s.l} : {format_valuation(s.nu)}")
    return "\n".join(out) + "\n"


def parse_trace(text: str, start: BoolFun) -> RewriteTrace:
    lines = [(n, raw) for n, raw in enumerate(text.splitlines(), 1)
             if raw.strip() and not raw.strip().startswith("#")]
    if not lines:
        raise ParseError("empty trace file", 1, 1)
    n, raw = lines[0]
    head = raw.split()
    if len(head) != 2 or head[0] != "k" or not head[1].isdigit():
        raise ParseError("expected 'k <int>'", n, 1)
    k = int(head[1])
    if k != start.k:
        raise ParseError(f"trace is for k={k} but the start function has k={start.k}", n, 1)
    steps = []
    for n, raw in lines[1:]:
        m = _STEP_LINE.match(raw)
        if not m:
            raise ParseError("expected '<+|-> <l> : <valuation>'", n, 1)
        sign, l, body = m.group(1), int(m.group(2)), m.group(3)
        if l > k:
            raise ParseError(f"variable {l} exceeds k={k}", n, raw.index(m.group(2)) + 1)
        nu = 0
        if body != ".":
            for tok in body.split():
                if not tok.isdigit() or int(tok) > k:
                    raise ParseError(f"bad variable {tok!r}", n, raw.index(tok) + 1)
                nu |= 1 << int(tok)
        steps.append(RewriteStep(sign, nu, l))
    return RewriteTrace(start, tuple(steps))
