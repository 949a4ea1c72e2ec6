"""Ground-set and set-family primitives.

Subsets of [n] = {1, ..., n} are stored as integer bitmasks with bit i-1
holding element i. Numeric order on masks coincides with colexicographic
order on sets, which is the canonical member order throughout the package.
All witnesses (minimum covers, chosen members) break ties by picking the
lexicographically smallest candidate, comparing sorted element tuples.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, NamedTuple, Optional


class UniverseMismatchError(ValueError):
    """Two objects live over incompatible ground sets."""


class EmptyFamilyError(ValueError):
    """Operation undefined on an empty family (e.g. centers)."""


class BudgetExceededError(RuntimeError):
    """A configured enumeration/search budget was exhausted; result inconclusive."""


def mask_from_elements(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        if e < 1:
            raise ValueError(f"elements are 1-indexed, got {e}")
        m |= 1 << (e - 1)
    return m


def elements_from_mask(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


def lex_key(mask: int) -> tuple[int, ...]:
    """Sort key realizing lexicographic order on sorted element tuples."""
    return elements_from_mask(mask)


@dataclass(frozen=True, slots=True)
class Universe:
    """Ground set [n] together with the uniformity k of interest."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"ground-set size must be positive, got n={self.n}")
        if self.k < 1:
            raise ValueError(f"uniformity must be positive, got k={self.k}")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def kneser_regime(self) -> bool:
        """n >= 2k, the regime where disjoint k-sets exist."""
        return self.n >= 2 * self.k

    def total_ksets(self) -> int:
        return math.comb(self.n, self.k)


@dataclass(frozen=True)
class ElementSet:
    """A subset of [n] as a bitmask with cached cardinality."""

    n: int
    mask: int
    cardinality: int = field(init=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("universe size must be non-negative")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask:#x} has bits outside [1, {self.n}]")
        object.__setattr__(self, "cardinality", self.mask.bit_count())

    @classmethod
    def from_elements(cls, n: int, elements: Iterable[int]) -> "ElementSet":
        m = mask_from_elements(elements)
        if m >= (1 << n):
            raise ValueError(f"element above {n} in {sorted(elements_from_mask(m))}")
        return cls(n, m)

    @classmethod
    def empty(cls, n: int) -> "ElementSet":
        return cls(n, 0)

    @property
    def elements(self) -> tuple[int, ...]:
        return elements_from_mask(self.mask)

    def contains(self, element: int) -> bool:
        return bool(self.mask >> (element - 1) & 1)

    def issubset(self, other: "ElementSet") -> bool:
        return self.mask & ~other.mask == 0

    def __len__(self) -> int:
        return self.cardinality

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __or__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(max(self.n, other.n), self.mask | other.mask)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(max(self.n, other.n), self.mask & other.mask)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.n, self.mask & ~other.mask)

    def __repr__(self) -> str:
        return f"ElementSet(n={self.n}, {{{', '.join(map(str, self.elements))}}})"


def _as_mask(s) -> int:
    if isinstance(s, ElementSet):
        return s.mask
    if isinstance(s, int):
        return s
    return mask_from_elements(s)


# ---------------------------------------------------------------------------
# Colexicographic enumeration of k-subsets


def colex_rank(mask: int) -> int:
    """Rank of a set in colex order among sets of its own size."""
    r = 0
    j = 0
    while mask:
        low = mask & -mask
        r += math.comb(low.bit_length() - 1, j + 1)
        j += 1
        mask ^= low
    return r


def colex_unrank(rank: int, n: int, k: int) -> int:
    """The k-subset mask of [n] with the given colex rank."""
    if k < 0 or k > n:
        raise ValueError(f"no {k}-subsets of [{n}]")
    if not 0 <= rank < math.comb(n, k):
        raise ValueError(f"rank {rank} out of range for C({n},{k})")
    mask = 0
    r = rank
    hi = n
    for kk in range(k, 0, -1):
        lo = kk - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if math.comb(mid, kk) <= r:
                lo = mid
            else:
                hi = mid - 1
        r -= math.comb(lo, kk)
        mask |= 1 << lo
        hi = lo
    return mask


def iter_ksets(n: int, k: int, start: int = 0, stop: Optional[int] = None) -> Iterator[int]:
    """Yield k-subset masks of [n] in colex order for ranks [start, stop)."""
    total = math.comb(n, k) if k <= n else 0
    if stop is None or stop > total:
        stop = total
    if k < 0 or start >= stop:
        return
    if k == 0:
        yield 0
        return
    mask = colex_unrank(start, n, k)
    remaining = stop - start
    while remaining:
        yield mask
        remaining -= 1
        if remaining:
            c = mask & -mask
            r = mask + c
            mask = (((r ^ mask) >> 2) // c) | r


def enumerate_ksets(
    universe: Universe,
    visitor: Optional[Callable[[int], None]] = None,
    start_rank: int = 0,
    end_rank: Optional[int] = None,
) -> int:
    """Visit every k-subset of [n] in colex order; returns the count visited.

    Masks are passed to the visitor. With k > n the enumeration is empty and
    0 is returned. Rank ranges allow disjoint chunks to be processed
    independently by parallel workers.
    """
    n, k = universe.n, universe.k
    total = math.comb(n, k) if k <= n else 0
    stop = total if end_rank is None else min(end_rank, total)
    start = min(start_rank, stop)
    count = stop - start
    if visitor is not None:
        for mask in iter_ksets(n, k, start, stop):
            visitor(mask)
    return count


# ---------------------------------------------------------------------------
# Families


@dataclass(frozen=True)
class SetFamily:
    """An ordered, duplicate-free collection of subsets of [n].

    Members are stored as masks in colex order. ``uniform`` is the common
    cardinality when every member has one, otherwise None.
    """

    universe: Universe
    members: tuple[int, ...]
    uniform: Optional[int] = None

    def __post_init__(self):
        full = self.universe.full_mask
        for m in self.members:
            if m & ~full:
                raise ValueError("member has elements outside the ground set")
        if self.uniform is not None:
            for m in self.members:
                if m.bit_count() != self.uniform:
                    raise ValueError(
                        f"member of size {m.bit_count()} in {self.uniform}-uniform family"
                    )

    @classmethod
    def from_masks(
        cls, n: int, masks: Iterable[int], k: Optional[int] = None
    ) -> "SetFamily":
        members = tuple(sorted(set(masks)))
        sizes = {m.bit_count() for m in members}
        uniform = sizes.pop() if len(sizes) == 1 else None
        context_k = k if k is not None else (uniform if uniform else 1)
        return cls(Universe(n, max(context_k, 1)), members, uniform)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]], k: Optional[int] = None) -> "SetFamily":
        return cls.from_masks(n, (mask_from_elements(s) for s in sets), k)

    @property
    def n(self) -> int:
        return self.universe.n

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, s) -> bool:
        return _as_mask(s) in self.member_set

    @property
    def member_set(self) -> frozenset:
        cached = getattr(self, "_member_set", None)
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_member_set", cached)
        return cached

    @property
    def sets(self) -> tuple[ElementSet, ...]:
        return tuple(ElementSet(self.n, m) for m in self.members)

    def union_mask(self) -> int:
        u = 0
        for m in self.members:
            u |= m
        return u


def _element_bitsets(members: tuple[int, ...], n: int) -> list[int]:
    """For each element e, the bitset of member indices containing e."""
    idx = [0] * (n + 1)
    for j, m in enumerate(members):
        bit = 1 << j
        mm = m
        while mm:
            low = mm & -mm
            idx[low.bit_length()] |= bit
            mm ^= low
    return idx


def disjoint_pair(f: SetFamily) -> Optional[tuple[int, int]]:
    """A pair of disjoint member masks, or None if the family is intersecting.

    Uses per-element member-index bitsets so the scan is O(m * k) big-int
    operations instead of O(m^2) pairwise tests.
    """
    members = f.members
    if len(members) < 2:
        return None
    idx = _element_bitsets(members, f.n)
    all_bits = (1 << len(members)) - 1
    for j, m in enumerate(members):
        hit = 0
        mm = m
        while mm:
            low = mm & -mm
            hit |= idx[low.bit_length()]
            mm ^= low
        missed = all_bits & ~hit
        if missed:
            other = (missed & -missed).bit_length() - 1
            return (m, members[other]) if other > j else (members[other], m)
    return None


def is_intersecting(f: SetFamily) -> bool:
    """True iff every two members share an element; empty/singleton count as True."""
    return disjoint_pair(f) is None


def cross_intersecting_witness(a: SetFamily, b: SetFamily) -> Optional[tuple[int, int]]:
    """A disjoint pair (A, B) with A in a, B in b, or None if cross-intersecting."""
    if a.n != b.n:
        raise UniverseMismatchError(f"ground sets differ: {a.n} vs {b.n}")
    if not a.members or not b.members:
        return None
    idx = _element_bitsets(b.members, b.n)
    all_bits = (1 << len(b.members)) - 1
    for m in a.members:
        hit = 0
        mm = m
        while mm:
            low = mm & -mm
            hit |= idx[low.bit_length()]
            mm ^= low
        missed = all_bits & ~hit
        if missed:
            j = (missed & -missed).bit_length() - 1
            return (m, b.members[j])
    return None


def is_cross_intersecting(a: SetFamily, b: SetFamily) -> bool:
    """True iff every member of a meets every member of b (vacuously on empties)."""
    return cross_intersecting_witness(a, b) is None


def centers(f: SetFamily) -> ElementSet:
    """Common elements of all members; non-empty iff the family is a star."""
    if not f.members:
        raise EmptyFamilyError("centers undefined: no members")
    common = f.universe.full_mask
    for m in f.members:
        common &= m
        if not common:
            break
    return ElementSet(f.n, common)


def restrict(f: SetFamily, a, b) -> SetFamily:
    """Members meeting b exactly in a, with a removed: {F - a : F in f, F & b == a}."""
    am, bm = _as_mask(a), _as_mask(b)
    if am & ~bm:
        raise ValueError("restriction requires a to be a subset of b")
    masks = [m & ~am for m in f.members if m & bm == am]
    return SetFamily.from_masks(f.n, masks, k=f.universe.k)


def link(f: SetFamily, x: int) -> SetFamily:
    """The family {F - {x} : x in F in f}."""
    if not 1 <= x <= f.n:
        raise ValueError(f"element {x} outside [1, {f.n}]")
    bit = 1 << (x - 1)
    return SetFamily.from_masks(f.n, (m & ~bit for m in f.members if m & bit), k=f.universe.k)


# ---------------------------------------------------------------------------
# Cover number (transversal number) tau


class TauResult(NamedTuple):
    tau: Optional[int]
    witness: Optional[ElementSet]
    capped: bool


def _tau_branch_bound(find_uncovered: Callable[[int], Optional[int]], limit: int) -> Optional[int]:
    """Minimum cover size via branch and bound, or None if it exceeds limit.

    ``find_uncovered(cover_mask)`` returns a member mask disjoint from the
    cover, or None when the cover hits everything. Branching is restricted to
    elements of one uncovered member, which preserves completeness.
    """
    if find_uncovered(0) is None:
        return 0
    best = limit + 1

    def rec(cover: int, depth: int):
        nonlocal best
        m = find_uncovered(cover)
        if m is None:
            if depth < best:
                best = depth
            return
        if depth + 1 >= best:
            return
        mm = m
        while mm:
            low = mm & -mm
            rec(cover | low, depth + 1)
            mm ^= low

    rec(0, 0)
    return best if best <= limit else None


def _lex_min_cover(
    find_uncovered: Callable[[int], Optional[int]], candidate_elements: Iterable[int], tau: int
) -> Optional[int]:
    """Lexicographically smallest covering set of the given size."""
    if tau == 0:
        return 0
    for combo in combinations(sorted(candidate_elements), tau):
        cm = mask_from_elements(combo)
        if find_uncovered(cm) is None:
            return cm
    return None


def cover_number(f: SetFamily, cap: Optional[int] = None) -> TauResult:
    """Size and witness of a minimum cover (a set meeting every member).

    The witness is the lexicographically smallest minimum cover. ``cap``
    defaults to the uniformity for uniform families (any member of a uniform
    intersecting family is a cover, so tau <= k there); when the true tau
    exceeds the cap a capped sentinel is returned.
    """
    if not f.members:
        return TauResult(0, ElementSet.empty(f.n), False)
    if cap is None:
        cap = f.uniform if f.uniform is not None else f.n
    members = f.members

    def find_uncovered(cover: int) -> Optional[int]:
        for m in members:
            if not m & cover:
                return m
        return None

    tau = _tau_branch_bound(find_uncovered, cap)
    if tau is None:
        return TauResult(None, None, True)
    witness = _lex_min_cover(find_uncovered, elements_from_mask(f.union_mask()), tau)
    return TauResult(tau, ElementSet(f.n, witness), False)


# ---------------------------------------------------------------------------
# Cover colors
#
# A cover color is any object exposing the duck-typed interface
#   universe, name, size(), contains(mask), count_between(amask, ymask),
#   iter_masks()
# where count_between counts members M with amask <= M <= ymask (as sets).
# ExplicitColor below backs the interface with a materialized family;
# the construction module adds closed-form predicate colors that support
# ground sets far too large to materialize.


@dataclass(frozen=True)
class ExplicitColor:
    """A cover color backed by an explicit member list."""

    family: SetFamily
    name: str = "color"

    @property
    def universe(self) -> Universe:
        return self.family.universe

    def size(self) -> int:
        return len(self.family)

    def contains(self, mask: int) -> bool:
        return mask in self.family.member_set

    def count_between(self, amask: int, ymask: int) -> int:
        return sum(1 for m in self.family.members if m & amask == amask and not m & ~ymask)

    def iter_masks(self) -> Iterator[int]:
        return iter(self.family.members)

    def materialize(self) -> SetFamily:
        return self.family

    def check_intersecting(self) -> tuple[bool, Optional[tuple[int, int]]]:
        pair = disjoint_pair(self.family)
        return pair is None, pair


def color_count_in_subset(color, ymask: int) -> int:
    """Number of color members entirely inside the given subset."""
    return color.count_between(0, ymask)


def color_find_member(color, ymask: int) -> Optional[int]:
    """Lexicographically smallest color member inside ymask, or None.

    Built on count_between: walk candidate elements in increasing order and
    keep an element exactly when some member extends the chosen prefix with
    it, using only elements further right.
    """
    if color.count_between(0, ymask) == 0:
        return None
    elems = elements_from_mask(ymask)
    suffix = [0] * (len(elems) + 1)
    for i in range(len(elems) - 1, -1, -1):
        suffix[i] = suffix[i + 1] | (1 << (elems[i] - 1))
    chosen = 0
    for pos, e in enumerate(elems):
        bit = 1 << (e - 1)
        if color.count_between(chosen | bit, chosen | bit | suffix[pos + 1]) > 0:
            chosen |= bit
            if color.contains(chosen):
                return chosen
    return chosen if color.contains(chosen) else None


def color_tau(color, cap: Optional[int] = None) -> TauResult:
    """Cover number of a color via membership-count queries."""
    u = color.universe
    if color.size() == 0:
        return TauResult(0, ElementSet.empty(u.n), False)
    full = u.full_mask
    if cap is None:
        cap = u.k

    def find_uncovered(cover: int) -> Optional[int]:
        return color_find_member(color, full & ~cover)

    tau = _tau_branch_bound(find_uncovered, cap)
    if tau is None:
        return TauResult(None, None, True)
    present = [e for e in range(1, u.n + 1) if color.count_between(1 << (e - 1), full) > 0]
    witness = _lex_min_cover(find_uncovered, present, tau)
    return TauResult(tau, ElementSet(u.n, witness), False)


def color_centers(color) -> tuple[int, ...]:
    """Elements contained in every member (empty tuple for an empty color)."""
    if color.size() == 0:
        return ()
    full = color.universe.full_mask
    out = []
    for e in range(1, color.universe.n + 1):
        if color.count_between(0, full & ~(1 << (e - 1))) == 0:
            out.append(e)
    return tuple(out)


@dataclass(frozen=True)
class LabeledCover:
    """An ordered list of cover colors claimed to cover all k-subsets of [n]."""

    universe: Universe
    colors: tuple
    provenance: str = ""

    def __post_init__(self):
        for c in self.colors:
            if c.universe.n != self.universe.n:
                raise UniverseMismatchError("color ground set differs from cover universe")

    def __len__(self) -> int:
        return len(self.colors)

    def families(self) -> tuple[SetFamily, ...]:
        """Materialized view of every color (may be expensive for large n, k)."""
        return tuple(c.materialize() for c in self.colors)


# ---------------------------------------------------------------------------
# Seeded corpus generator


def random_intersecting_family(
    n: int,
    k: int,
    seed: int,
    target_size: Optional[int] = None,
    require_nontrivial: bool = False,
    max_attempts: int = 64,
) -> SetFamily:
    """A pseudo-random intersecting k-uniform family over [n], reproducible by seed.

    Greedily accumulates sets from a shuffled enumeration of all k-subsets,
    keeping each candidate that meets everything chosen so far. With
    ``require_nontrivial`` the result is regenerated (deterministically) until
    it has no common element.
    """
    rng = random.Random(seed)
    all_masks = list(iter_ksets(n, k, 0, None))
    for _ in range(max_attempts):
        rng.shuffle(all_masks)
        goal = target_size if target_size is not None else rng.randint(2, max(4, len(all_masks) // 3))
        picked: list[int] = []
        for m in all_masks:
            if all(m & other for other in picked):
                picked.append(m)
                if len(picked) >= goal:
                    break
        fam = SetFamily.from_masks(n, picked, k=k)
        if not require_nontrivial or (len(fam) > 0 and centers(fam).mask == 0):
            return fam
    raise RuntimeError(f"no non-trivial intersecting family found for n={n}, k={k}, seed={seed}")
