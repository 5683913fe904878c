"""Hardness classification, monotone Euler extrema, and hypercube matchings."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Tuple

from .boolfun import BoolFun, all_functions, euler, full_mask, is_monotone
from .errors import GuardError, UnreachableError

TRACTABLE_DD = "TRACTABLE_DD"
SHARP_P_HARD = "SHARP_P_HARD"
UNKNOWN_CONJECTURED_HARD = "UNKNOWN_CONJECTURED_HARD"

COLORED = "colored"
UNCOLORED = "uncolored"

MONOTONE_MAX_K = 4


@dataclass(frozen=True)
class HardnessVerdict:
    kind: str
    euler: int
    reason: str

    def __str__(self):
        return f"{self.kind} (euler {self.euler}; {self.reason})"


# -- monotone functions ----------------------------------------------------------------

@lru_cache(maxsize=None)
def _monotone_tables(nvars: int) -> Tuple[int, ...]:
    """Truth tables of all monotone functions on ``nvars`` variables.

    A function is monotone iff both cofactors on the top variable are
    monotone and the 0-cofactor implies the 1-cofactor.
    """
    if nvars == 0:
        return (0, 1)
    sub = _monotone_tables(nvars - 1)
    shift = 1 << (nvars - 1)
    out = []
    for f1 in sub:
        for f0 in sub:
            if f0 & ~f1 == 0:
                out.append(f0 | f1 << shift)
    return tuple(sorted(out))


def monotone_functions(k: int, max_k: int = MONOTONE_MAX_K) -> List[BoolFun]:
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > max_k:
        raise GuardError(f"monotone enumeration is limited to k <= {max_k}")
    return [BoolFun(k, t) for t in _monotone_tables(k + 1)]


def threshold_function(k: int, t: int) -> BoolFun:
    """sat = every valuation of size at least t."""
    n = k + 1
    table = 0
    for nu in range(1 << n):
        if nu.bit_count() >= t:
            table |= 1 << nu
    return BoolFun(k, table)


def threshold_euler(k: int, t: int) -> int:
    """Closed form: sum_{j>=t} (-1)^j C(k+1, j) = (-1)^t C(k, t-1) for t >= 1."""
    if t <= 0:
        return 0
    return (-1) ** t * comb(k, t - 1)


def threshold_candidates(k: int, n: float, second_offset: int = 2) -> List[float]:
    """Thresholds of the stated extremal rule, read with a given ``n``.

    Even k: n/2 + 1.  Odd k: (n-1)/2 + 1 and (n+1)/2 + ``second_offset``.
    Non-integer thresholds are returned as is so callers can reject a reading.
    """
    if k % 2 == 0:
        return [n / 2 + 1]
    return [(n - 1) / 2 + 1, (n + 1) / 2 + second_offset]


def extremal_monotone(k: int) -> List[BoolFun]:
    """All monotone functions attaining the largest |euler| (brute force)."""
    fs = monotone_functions(k)
    m = max(abs(euler(f)) for f in fs)
    return [f for f in fs if abs(euler(f)) == m]


@dataclass(frozen=True)
class Extrema:
    min: int
    max: int
    argmin: BoolFun = field(compare=False)
    argmax: BoolFun = field(compare=False)
    # threshold t -> euler of the threshold function
    candidates: Dict[int, int] = field(default_factory=dict, compare=False)

    def __iter__(self):
        return iter((self.min, self.max))

    def candidates_agree(self) -> bool:
        vals = self.candidates.values()
        return max(vals) == self.max and min(vals) == self.min


@lru_cache(maxsize=None)
def monotone_euler_extrema(k: int) -> Extrema:
    """Exact min/max of euler over monotone functions (brute force, k <= 4)."""
    fs = monotone_functions(k)
    lo = min(fs, key=lambda f: (euler(f), f.table))
    hi = max(fs, key=lambda f: (euler(f), -f.table))
    cands = {t: threshold_euler(k, t) for t in range(1, k + 2)}
    return Extrema(euler(lo), euler(hi), lo, hi, cands)


def euler_window(k: int) -> Tuple[int, int]:
    """Euler values known to be reached by monotone functions.

    Exact for k <= 4.  Beyond that the threshold functions give a window
    that is reachable (by the descent in monotone_with_euler) but possibly
    smaller than the true one.
    """
    if k <= MONOTONE_MAX_K:
        e = monotone_euler_extrema(k)
        return e.min, e.max
    vals = [threshold_euler(k, t) for t in range(1, k + 2)]
    return min(vals), max(vals)


def _extremal(k: int, sign: int) -> BoolFun:
    if k <= MONOTONE_MAX_K:
        e = monotone_euler_extrema(k)
        return e.argmax if sign > 0 else e.argmin
    t = max(range(1, k + 2), key=lambda t: (sign * threshold_euler(k, t), -t))
    return threshold_function(k, t)


def descend(phi: BoolFun) -> List[BoolFun]:
    """Remove one minimal-size satisfying valuation at a time until false.

    Removing a minimal element keeps the satisfying set up-closed, and each
    removal moves euler by exactly one.
    """
    out = [phi]
    while phi.table:
        nu = min(phi.sat(), key=lambda v: (v.bit_count(), v))
        phi = BoolFun(phi.k, phi.table ^ (1 << nu))
        out.append(phi)
    return out


def monotone_with_euler(c: int, k: int) -> BoolFun:
    lo, hi = euler_window(k)
    if c == 0:
        return BoolFun.bottom(k)
    if not lo <= c <= hi:
        raise UnreachableError(f"euler {c} is outside the monotone window [{lo}, {hi}] for k={k}")
    for f in descend(_extremal(k, 1 if c > 0 else -1)):
        if euler(f) == c:
            return f
    raise AssertionError("descent skipped a value")  # unreachable: steps are +-1


def classify(phi: BoolFun) -> HardnessVerdict:
    e = euler(phi)
    if e == 0:
        return HardnessVerdict(TRACTABLE_DD, 0, "euler-zero")
    if is_monotone(phi):
        return HardnessVerdict(SHARP_P_HARD, e, "monotone-nonzero-euler")
    lo, hi = euler_window(phi.k)
    if lo <= e <= hi:
        return HardnessVerdict(SHARP_P_HARD, e, "euler-in-monotone-window")
    return HardnessVerdict(UNKNOWN_CONJECTURED_HARD, e, "euler-outside-monotone-window")


# -- matchings on the hypercube ------------------------------------------------------------

def _side_nodes(phi: BoolFun, side: str) -> List[int]:
    if side == COLORED:
        return phi.sat()
    if side == UNCOLORED:
        return (~phi).sat()
    raise ValueError(f"unknown side {side!r}")


def maximum_matching(nodes: List[int], nvars: int) -> Dict[int, int]:
    """Maximum matching of the hypercube subgraph induced by ``nodes``.

    Augmenting paths from the even-size side (Kuhn's algorithm).
    """
    present = set(nodes)
    left = [v for v in nodes if v.bit_count() % 2 == 0]
    match_of: Dict[int, int] = {}  # odd node -> even node

    def neighbors(v):
        for l in range(nvars):
            u = v ^ (1 << l)
            if u in present:
                yield u

    def augment(v, seen):
        for u in neighbors(v):
            if u in seen:
                continue
            seen.add(u)
            if u not in match_of or augment(match_of[u], seen):
                match_of[u] = v
                return True
        return False

    for v in left:
        augment(v, set())
    out = {}
    for u, v in match_of.items():
        out[u] = v
        out[v] = u
    return out


def induced_perfect_matching(phi: BoolFun, side: str = COLORED) -> Optional[List[Tuple[int, int]]]:
    """A perfect matching of the colored (or uncolored) induced subgraph, or None."""
    nodes = _side_nodes(phi, side)
    m = maximum_matching(nodes, phi.nvars)
    if len(m) != len(nodes):
        return None
    return sorted((min(a, b), max(a, b)) for a, b in m.items() if a < b)


def is_perfect_matching(phi: BoolFun, side: str, edges) -> bool:
    nodes = set(_side_nodes(phi, side))
    covered = set()
    for a, b in edges:
        d = a ^ b
        if a not in nodes or b not in nodes or d & (d - 1) or not d:
            return False
        if a in covered or b in covered:
            return False
        covered |= {a, b}
    return covered == nodes


def minus_reducible(phi: BoolFun) -> bool:
    """Can phi reach false by MINUS steps alone?  Exhaustive search over states."""
    seen = set()
    stack = [phi.table]
    while stack:
        t = stack.pop()
        if t == 0:
            return True
        if t in seen:
            continue
        seen.add(t)
        # the lowest satisfying valuation has to be removed by some step
        nu = (t & -t).bit_length() - 1
        for l in range(phi.nvars):
            u = nu ^ (1 << l)
            if t >> u & 1:
                stack.append(t & ~(1 << nu) & ~(1 << u))
    return False


@dataclass
class ConjectureReport:
    k: int
    checked: int = 0
    counterexamples: List[BoolFun] = field(default_factory=list)
    colored_only: int = 0
    uncolored_only: int = 0
    both: int = 0

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def lines(self) -> List[str]:
        return [
            f"k {self.k}",
            f"monotone-euler-zero {self.checked}",
            f"both-sides {self.both}",
            f"colored-only {self.colored_only}",
            f"uncolored-only {self.uncolored_only}",
            f"counterexamples {len(self.counterexamples)}",
        ]


def _matching_sides(phi: BoolFun) -> Tuple[bool, bool]:
    return (induced_perfect_matching(phi, COLORED) is not None,
            induced_perfect_matching(phi, UNCOLORED) is not None)


def conjecture_check(k: int, functions=None) -> ConjectureReport:
    """Every monotone euler-zero function should have a perfect matching on one side."""
    rep = ConjectureReport(k)
    fs = monotone_functions(k) if functions is None else functions
    for phi in fs:
        if euler(phi) != 0:
            continue
        rep.checked += 1
        c, u = _matching_sides(phi)
        if c and u:
            rep.both += 1
        elif c:
            rep.colored_only += 1
        elif u:
            rep.uncolored_only += 1
        else:
            rep.counterexamples.append(phi)
    return rep


def count_euler_zero(k: int) -> int:
    """Number of functions on k+1 variables with euler 0: sum_j C(2^k, j)^2."""
    if k < 1:
        raise ValueError("k must be at least 1")
    h = 1 << k
    return sum(comb(h, j) ** 2 for j in range(h + 1))


def count_euler_zero_enumerated(k: int, max_k: int = 2) -> int:
    if k > max_k:
        raise GuardError(f"exhaustive enumeration is limited to k <= {max_k}")
    return sum(1 for f in all_functions(k) if euler(f) == 0)


def count_euler_zero_sampled(k: int, samples: int = 20000, seed: int = 0) -> Tuple[int, int]:
    """(hits, samples) for uniformly random tables; hits/samples estimates the
    euler-zero fraction count_euler_zero(k) / 2^(2^(k+1))."""
    import random

    rnd = random.Random(seed)
    bits = 1 << (k + 1)
    hits = sum(1 for _ in range(samples) if euler(BoolFun(k, rnd.getrandbits(bits))) == 0)
    return hits, samples
