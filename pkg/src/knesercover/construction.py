"""Block construction of coverings by non-trivial intersecting families.

For k >= 3 and n = 2(k-1)^2 the ground set splits into k-1 blocks of size
2k-2. Each block contributes 2k-5 Hilton-Milner-type colors (a center plus a
distinguished k-set) and one pigeonhole color (sets meeting the block's
3-element core twice), for (2k-4)(k-1) = n - 2k + 2 colors in total.

Colors are predicates with closed-form member counting, so verification
never materializes the multi-million-member families that appear at k = 6.
Coverage is checked by streaming every k-subset of [n] (or a seeded sample
beyond the exhaustive budget); per-color structure checks run on exact
counting queries.
"""

from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .sets import (
    BudgetExceededError,
    ElementSet,
    ExplicitColor,
    LabeledCover,
    SetFamily,
    TauResult,
    Universe,
    centers,
    color_centers,
    color_tau,
    colex_unrank,
    cover_number,
    iter_ksets,
)

EXHAUSTIVE_BUDGET = 20_000_000
DEFAULT_SAMPLE = 1_000_000


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: explicit argument, else KNESER_THREADS, else all cores."""
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("KNESER_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# Predicate colors


@dataclass(frozen=True)
class HMColor:
    """Hilton-Milner-type color: k-sets through `center` meeting `special`,
    plus `special` itself."""

    universe: Universe
    center: int
    special: int
    name: str = "hm"

    def __post_init__(self):
        if not 1 <= self.center <= self.universe.n:
            raise ValueError(f"center {self.center} outside [1, {self.universe.n}]")
        if self.special >> (self.center - 1) & 1:
            raise ValueError("special set must not contain the center")
        if self.special & ~self.universe.full_mask:
            raise ValueError("special set leaves the ground set")

    def size(self) -> int:
        return self.count_between(0, self.universe.full_mask)

    def contains(self, mask: int) -> bool:
        if mask == self.special:
            return True
        k = self.universe.k
        cbit = 1 << (self.center - 1)
        return bool(mask & cbit) and bool(mask & self.special) and mask.bit_count() == k

    def count_between(self, amask: int, ymask: int) -> int:
        """Exact number of members M with amask <= M <= ymask."""
        if amask & ~ymask:
            return 0
        k = self.universe.k
        total = 0
        cbit = 1 << (self.center - 1)
        if ymask & cbit:
            a = amask | cbit
            if not a & ~ymask:
                rest = k - a.bit_count()
                if rest >= 0:
                    pool = ymask & ~a
                    star = math.comb(pool.bit_count(), rest)
                    if not a & self.special:
                        star -= math.comb((pool & ~self.special).bit_count(), rest)
                    total += star
        if not amask & ~self.special and not self.special & ~ymask:
            total += 1
        return total

    def iter_masks(self) -> Iterator[int]:
        u = self.universe
        for m in iter_ksets(u.n, u.k, 0, None):
            if self.contains(m):
                yield m
        if self.special.bit_count() != u.k:
            yield self.special

    def materialize(self) -> SetFamily:
        return SetFamily.from_masks(self.universe.n, self.iter_masks(), k=self.universe.k)

    def check_intersecting(self) -> tuple[bool, Optional[tuple[int, int]]]:
        """Certify pairwise intersection with exact counting queries.

        All members except possibly `special` contain the center, so they meet
        pairwise; it remains to check the lone avoider is `special` and that
        no member is disjoint from it.
        """
        full = self.universe.full_mask
        cbit = 1 << (self.center - 1)
        avoiders = self.count_between(0, full & ~cbit)
        expected = 1 if self.contains(self.special) else 0
        if avoiders != expected:
            raise RuntimeError("inconsistent counting for center avoiders")
        if avoiders and self.count_between(0, full & ~self.special) != 0:
            raise RuntimeError("member disjoint from the special set")
        return True, None


@dataclass(frozen=True)
class CoreColor:
    """Pigeonhole color: k-sets meeting a fixed core in at least `min_meet` elements."""

    universe: Universe
    core: int
    min_meet: int = 2
    name: str = "core"

    def __post_init__(self):
        if self.core & ~self.universe.full_mask:
            raise ValueError("core leaves the ground set")
        if not 1 <= self.min_meet <= self.core.bit_count():
            raise ValueError("min_meet out of range")

    def size(self) -> int:
        return self.count_between(0, self.universe.full_mask)

    def contains(self, mask: int) -> bool:
        return (
            mask.bit_count() == self.universe.k
            and (mask & self.core).bit_count() >= self.min_meet
            and not mask & ~self.universe.full_mask
        )

    def count_between(self, amask: int, ymask: int) -> int:
        if amask & ~ymask:
            return 0
        k = self.universe.k
        ac = (amask & self.core).bit_count()
        need = k - amask.bit_count()
        if need < 0:
            return 0
        pool = ymask & ~amask
        yc = (pool & self.core).bit_count()
        yr = (pool & ~self.core).bit_count()
        csize = self.core.bit_count()
        total = 0
        for j in range(max(self.min_meet, ac), csize + 1):
            extra_core = j - ac
            if extra_core > need:
                break
            total += math.comb(yc, extra_core) * math.comb(yr, need - extra_core)
        return total

    def iter_masks(self) -> Iterator[int]:
        u = self.universe
        for m in iter_ksets(u.n, u.k, 0, None):
            if self.contains(m):
                yield m

    def materialize(self) -> SetFamily:
        return SetFamily.from_masks(self.universe.n, self.iter_masks(), k=self.universe.k)

    def check_intersecting(self) -> tuple[bool, Optional[tuple[int, int]]]:
        """Certify via counting that every member meets the core min_meet times;
        2 * min_meet > |core| then forces pairwise intersection inside the core."""
        full = self.universe.full_mask
        outside = full & ~self.core
        low = 0
        for e in range(1, self.universe.n + 1):
            bit = 1 << (e - 1)
            if bit & self.core:
                low += self.count_between(0, outside | bit)
        low -= (self.core.bit_count() - 1) * self.count_between(0, outside)
        if low != 0:
            raise RuntimeError("member meets the core fewer than min_meet times")
        if 2 * self.min_meet <= self.core.bit_count():
            raise RuntimeError("core too large for the pigeonhole argument")
        return True, None


# ---------------------------------------------------------------------------
# The block construction


@dataclass(frozen=True)
class BlockLayout:
    """k-1 consecutive blocks of size 2k-2 partitioning [2(k-1)^2]."""

    k: int

    def __post_init__(self):
        if self.k < 3:
            raise ValueError(f"construction defined for k >= 3, got k={self.k}")

    @property
    def n(self) -> int:
        return 2 * (self.k - 1) ** 2

    @property
    def block_size(self) -> int:
        return 2 * self.k - 2

    @property
    def block_count(self) -> int:
        return self.k - 1

    @property
    def arc_modulus(self) -> int:
        return 2 * self.k - 5

    def block_interval(self, b: int) -> tuple[int, int]:
        """1-based closed interval of block b in 1..k-1."""
        if not 1 <= b <= self.block_count:
            raise ValueError(f"block index {b} outside [1, {self.block_count}]")
        off = (b - 1) * self.block_size
        return (off + 1, off + self.block_size)

    def block_offset(self, b: int) -> int:
        return self.block_interval(b)[0] - 1


def build_arc_set(k: int, i: int, block_offset: int = 0) -> ElementSet:
    """The i-th distinguished k-set of a block: the 3-element tail of the block
    plus the k-3 arc elements i+1, ..., i+k-3 wrapped modulo 2k-5, shifted by
    the block offset. Never contains i itself."""
    layout = BlockLayout(k)
    mod = layout.arc_modulus
    if not 1 <= i <= mod:
        raise ValueError(f"index {i} outside [1, {mod}]")
    n = layout.n
    if block_offset < 0 or block_offset + layout.block_size > n:
        raise ValueError(f"block offset {block_offset} does not fit in [1, {n}]")
    local = {2 * k - 4, 2 * k - 3, 2 * k - 2}
    for d in range(1, k - 2):
        local.add((i + d - 1) % mod + 1)
    return ElementSet.from_elements(n, (block_offset + x for x in local))


@dataclass(frozen=True)
class BlockFamilies:
    """All colors contributed by one block."""

    block_index: int
    arc_sets: tuple[ElementSet, ...]
    hm_colors: tuple[HMColor, ...]
    pigeon_color: CoreColor


def build_block_families(k: int, block: int | tuple[int, int]) -> BlockFamilies:
    """Colors of one block: HM colors for each arc index, then the core color.

    `block` is the block index (1-based) or the block's (start, end) interval.
    Every color's structure is verified on construction: arc sets have size k
    and avoid their own index, and all colors are intersecting with no center.
    """
    layout = BlockLayout(k)
    if isinstance(block, tuple):
        candidates = [b for b in range(1, layout.block_count + 1) if layout.block_interval(b) == block]
        if not candidates:
            raise ValueError(f"{block} is not a block interval of the k={k} layout")
        b = candidates[0]
    else:
        b = block
    off = layout.block_offset(b)
    u = Universe(layout.n, k)
    arc_sets = []
    hm_colors = []
    for i in range(1, layout.arc_modulus + 1):
        arc = build_arc_set(k, i, off)
        if arc.cardinality != k:
            raise RuntimeError(f"arc set {arc} has size {arc.cardinality}, wanted {k}")
        if arc.contains(off + i):
            raise RuntimeError(f"arc set for index {i} contains its own center")
        arc_sets.append(arc)
        hm_colors.append(
            HMColor(u, off + i, arc.mask, name=f"block{b}-hm{i}")
        )
    core = ElementSet.from_elements(layout.n, (off + x for x in (2 * k - 4, 2 * k - 3, 2 * k - 2)))
    pigeon = CoreColor(u, core.mask, 2, name=f"block{b}-core")
    for col in (*hm_colors, pigeon):
        ok, _ = col.check_intersecting()
        if not ok or color_centers(col):
            raise RuntimeError(f"color {col.name} is not a non-trivial intersecting family")
    return BlockFamilies(b, tuple(arc_sets), tuple(hm_colors), pigeon)


def build_cover(k: int) -> LabeledCover:
    """The full covering of the k-subsets of [2(k-1)^2]: per block, the HM
    colors in arc order followed by the core color, blocks left to right."""
    layout = BlockLayout(k)
    colors = []
    for b in range(1, layout.block_count + 1):
        fams = build_block_families(k, b)
        colors.extend(fams.hm_colors)
        colors.append(fams.pigeon_color)
    return LabeledCover(Universe(layout.n, k), tuple(colors), provenance="block-construction")


def chromatic_color_count(n: int, k: int) -> int:
    return n - 2 * k + 2


# ---------------------------------------------------------------------------
# Fast membership matching


def _exists_matcher(colors):
    """Exact any-color membership test, closed over cheap per-kind tables.

    Streamed masks are known k-sets, so the popcount clause of `contains`
    can be skipped for the predicate kinds.
    """
    cores = []
    hm_by_center: dict[int, list[int]] = {}
    specials = set()
    explicit = []
    for col in colors:
        if isinstance(col, CoreColor):
            cores.append((col.core, col.min_meet))
        elif isinstance(col, HMColor):
            hm_by_center.setdefault(col.center, []).append(col.special)
            if col.special.bit_count() == col.universe.k:
                specials.add(col.special)
        elif isinstance(col, ExplicitColor):
            explicit.append(col.family.member_set)
        else:
            explicit.append(frozenset(col.iter_masks()))
    centers_table = sorted(hm_by_center.items())
    specials = frozenset(specials)

    def hit(mask: int) -> bool:
        for core, need in cores:
            if (mask & core).bit_count() >= need:
                return True
        for center, specs in centers_table:
            if mask >> (center - 1) & 1:
                for s in specs:
                    if mask & s:
                        return True
        if mask in specials:
            return True
        for members in explicit:
            if mask in members:
                return True
        return False

    return hit


def _color_matchers(colors):
    """Per-color membership tests (order preserving), for partition checks."""
    mats = []
    for col in colors:
        if isinstance(col, CoreColor):
            core, need = col.core, col.min_meet
            mats.append(lambda m, c=core, t=need: (m & c).bit_count() >= t)
        elif isinstance(col, HMColor):
            cbit = 1 << (col.center - 1)
            special = col.special
            mats.append(lambda m, cb=cbit, s=special: m == s or bool(m & cb and m & s))
        elif isinstance(col, ExplicitColor):
            mats.append(col.family.member_set.__contains__)
        else:
            mats.append(frozenset(col.iter_masks()).__contains__)
    return mats


def _scan_chunk(args):
    """Worker: stream one colex rank range, reporting misses (and overlaps in
    partition mode) with minimum-rank witnesses."""
    colors, n, k, start, stop, partition = args
    misses = 0
    first_miss = None
    multi = 0
    first_multi = None
    checked = 0
    if partition:
        mats = _color_matchers(colors)
        rank = start
        for mask in iter_ksets(n, k, start, stop):
            cnt = 0
            for f in mats:
                if f(mask):
                    cnt += 1
                    if cnt > 1:
                        break
            if cnt == 0:
                misses += 1
                if first_miss is None:
                    first_miss = (rank, mask)
            elif cnt > 1:
                multi += 1
                if first_multi is None:
                    first_multi = (rank, mask)
            checked += 1
            rank += 1
    else:
        hit = _exists_matcher(colors)
        rank = start
        for mask in iter_ksets(n, k, start, stop):
            if not hit(mask):
                misses += 1
                if first_miss is None:
                    first_miss = (rank, mask)
            checked += 1
            rank += 1
    return checked, misses, first_miss, multi, first_multi


def _sample_chunk(args):
    """Worker: check a seeded batch of uniform random k-sets for coverage."""
    colors, n, k, count, chunk_seed, chunk_index = args
    hit = _exists_matcher(colors)
    total = math.comb(n, k)
    rng = random.Random(chunk_seed)
    misses = 0
    first_miss = None
    for pos in range(count):
        mask = colex_unrank(rng.randrange(total), n, k)
        if not hit(mask):
            misses += 1
            if first_miss is None:
                first_miss = (pos, mask)
    return chunk_index, count, misses, first_miss


# ---------------------------------------------------------------------------
# Verification


@dataclass(frozen=True)
class CoverageResult:
    mode: str
    checked: int
    misses: int
    witness_rank: Optional[int]
    witness: Optional[ElementSet]


@dataclass(frozen=True)
class ColorCheck:
    index: int
    name: str
    size: int
    intersecting: bool
    tau: Optional[int]
    tau_capped: bool
    centers: tuple[int, ...]

    @property
    def nontrivial(self) -> bool:
        return self.tau is not None and self.tau >= 2


@dataclass(frozen=True)
class VerificationReport:
    n: int
    k: int
    mode: str
    coverage: CoverageResult
    colors: tuple[ColorCheck, ...]
    count_expected: int
    count_actual: int
    kneser_regime: bool
    disjoint: Optional[bool]
    disjoint_witness: Optional[ElementSet]
    elapsed: float

    @property
    def count_ok(self) -> bool:
        return self.count_actual == self.count_expected

    @property
    def passed(self) -> bool:
        """Coverage complete, every color a non-trivial intersecting family,
        and (in partition mode) colors pairwise disjoint."""
        if self.coverage.misses:
            return False
        if not all(c.intersecting and c.nontrivial for c in self.colors):
            return False
        if self.mode == "partition" and not self.disjoint:
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "mode": self.mode,
            "kneser_regime": self.kneser_regime,
            "coverage": {
                "mode": self.coverage.mode,
                "checked": str(self.coverage.checked),
                "misses": str(self.coverage.misses),
                "witness": list(self.coverage.witness.elements) if self.coverage.witness else None,
            },
            "colors": [
                {
                    "index": c.index,
                    "name": c.name,
                    "size": str(c.size),
                    "intersecting": c.intersecting,
                    "tau": c.tau,
                    "centers": list(c.centers),
                }
                for c in self.colors
            ],
            "count_check": {
                "expected": self.count_expected,
                "actual": self.count_actual,
                "ok": self.count_ok,
            },
            "disjoint": self.disjoint,
            "disjoint_witness": list(self.disjoint_witness.elements) if self.disjoint_witness else None,
            "passed": self.passed,
        }


def _tau_of_color(col, cap: int) -> TauResult:
    if isinstance(col, ExplicitColor):
        return cover_number(col.family, cap=cap)
    return color_tau(col, cap=cap)


def _centers_of_color(col) -> tuple[int, ...]:
    if isinstance(col, ExplicitColor):
        if len(col.family) == 0:
            return ()
        return centers(col.family).elements
    return color_centers(col)


def check_color(index: int, col, cap: int) -> ColorCheck:
    """Structure checks for one color: size, intersecting, tau, centers."""
    size = col.size()
    if size == 0:
        return ColorCheck(index, col.name, 0, True, 0, False, ())
    intersecting, _ = col.check_intersecting()
    tau_res = _tau_of_color(col, cap)
    return ColorCheck(
        index,
        col.name,
        size,
        intersecting,
        tau_res.tau,
        tau_res.capped,
        _centers_of_color(col),
    )


def verify_cover(
    cover: LabeledCover,
    mode: str = "covering",
    sample: Optional[int] = None,
    seed: Optional[int] = None,
    exhaustive_budget: int = EXHAUSTIVE_BUDGET,
    threads: Optional[int] = None,
) -> VerificationReport:
    """Full verification of a claimed cover.

    Coverage is exhaustive when C(n, k) fits the budget, otherwise a seeded
    uniform sample of `sample` k-sets (default 10^6) must show zero misses.
    Every color is checked to be intersecting with tau >= 2, and the color
    count is compared against n - 2k + 2. Partition mode additionally demands
    pairwise disjoint colors. Failures are report entries, never exceptions.
    """
    if mode not in ("covering", "partition"):
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    n, k = cover.universe.n, cover.universe.k
    total = math.comb(n, k)
    workers = resolve_threads(threads)

    if total <= exhaustive_budget:
        coverage, disjoint, disjoint_witness = _exhaustive_coverage(
            cover, mode == "partition", workers, total
        )
    else:
        if mode == "partition":
            raise BudgetExceededError(
                f"partition check needs an exhaustive pass; C({n},{k}) = {total} exceeds budget {exhaustive_budget}"
            )
        if seed is None:
            raise ValueError("sampled verification requires a seed")
        coverage = _sampled_coverage(cover, sample or DEFAULT_SAMPLE, seed, workers)
        disjoint, disjoint_witness = None, None

    color_checks = tuple(check_color(i, col, k) for i, col in enumerate(cover.colors))
    return VerificationReport(
        n=n,
        k=k,
        mode=mode,
        coverage=coverage,
        colors=color_checks,
        count_expected=chromatic_color_count(n, k),
        count_actual=len(cover.colors),
        kneser_regime=cover.universe.kneser_regime,
        disjoint=disjoint,
        disjoint_witness=disjoint_witness,
        elapsed=time.perf_counter() - t0,
    )


def _chunk_ranges(total: int, workers: int) -> list[tuple[int, int]]:
    if total == 0:
        return []
    chunk = max(1, min(total, max(50_000, total // (workers * 8)))) if workers > 1 else total
    return [(s, min(s + chunk, total)) for s in range(0, total, chunk)]


def _exhaustive_coverage(cover: LabeledCover, partition: bool, workers: int, total: int):
    n, k = cover.universe.n, cover.universe.k
    ranges = _chunk_ranges(total, workers)
    jobs = [(cover.colors, n, k, s, e, partition) for s, e in ranges]
    if workers > 1 and len(jobs) > 1 and total > 200_000:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_chunk, jobs))
    else:
        results = [_scan_chunk(j) for j in jobs]
    checked = sum(r[0] for r in results)
    misses = sum(r[1] for r in results)
    miss_wits = [r[2] for r in results if r[2] is not None]
    first_miss = min(miss_wits) if miss_wits else None
    multi = sum(r[3] for r in results)
    multi_wits = [r[4] for r in results if r[4] is not None]
    first_multi = min(multi_wits) if multi_wits else None
    coverage = CoverageResult(
        "exhaustive",
        checked,
        misses,
        first_miss[0] if first_miss else None,
        ElementSet(n, first_miss[1]) if first_miss else None,
    )
    if partition:
        return coverage, multi == 0, ElementSet(n, first_multi[1]) if first_multi else None
    return coverage, None, None


def _sampled_coverage(cover: LabeledCover, sample: int, seed: int, workers: int) -> CoverageResult:
    n, k = cover.universe.n, cover.universe.k
    chunks = 32
    base = sample // chunks
    counts = [base + (1 if i < sample % chunks else 0) for i in range(chunks)]
    jobs = [
        (cover.colors, n, k, counts[i], seed ^ (i + 1), i)
        for i in range(chunks)
        if counts[i]
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sample_chunk, jobs))
    else:
        results = [_sample_chunk(j) for j in jobs]
    results.sort()
    checked = sum(r[1] for r in results)
    misses = sum(r[2] for r in results)
    witness = None
    for idx, _cnt, _miss, wit in results:
        if wit is not None:
            witness = wit
            break
    return CoverageResult(
        "sampled",
        checked,
        misses,
        None,
        ElementSet(n, witness[1]) if witness else None,
    )


# ---------------------------------------------------------------------------
# Covering -> partition conversion


@dataclass(frozen=True)
class PartitionFlag:
    index: int
    name: str
    problem: str
    centers: tuple[int, ...] = ()


@dataclass(frozen=True)
class PartitionReport:
    sizes: tuple[int, ...]
    flags: tuple[PartitionFlag, ...]

    @property
    def clean(self) -> bool:
        return not self.flags


def cover_to_partition(
    cover: LabeledCover,
    exhaustive_budget: int = EXHAUSTIVE_BUDGET,
    threads: Optional[int] = None,
) -> tuple[LabeledCover, PartitionReport]:
    """Assign each k-set to its lowest-index containing color.

    The input must verify as a covering. Colors that end up empty or trivial
    are flagged in the report, never silently repaired.
    """
    n, k = cover.universe.n, cover.universe.k
    total = math.comb(n, k)
    if total > exhaustive_budget:
        raise BudgetExceededError(
            f"partition materialization of C({n},{k}) = {total} sets exceeds budget {exhaustive_budget}"
        )
    pre = verify_cover(cover, mode="covering", exhaustive_budget=exhaustive_budget, threads=threads)
    if pre.coverage.misses:
        raise ValueError(
            f"input is not a covering: {pre.coverage.misses} sets uncovered, first witness {pre.coverage.witness}"
        )
    mats = _color_matchers(cover.colors)
    buckets: list[list[int]] = [[] for _ in cover.colors]
    for mask in iter_ksets(n, k, 0, None):
        for i, f in enumerate(mats):
            if f(mask):
                buckets[i].append(mask)
                break
    colors = tuple(
        ExplicitColor(SetFamily.from_masks(n, bucket, k=k), name=col.name)
        for bucket, col in zip(buckets, cover.colors)
    )
    flags = []
    for i, col in enumerate(colors):
        if col.size() == 0:
            flags.append(PartitionFlag(i, col.name, "empty"))
            continue
        cs = centers(col.family).elements
        if cs:
            flags.append(PartitionFlag(i, col.name, "trivial", cs))
    partition = LabeledCover(cover.universe, colors, provenance=f"{cover.provenance}/partition")
    return partition, PartitionReport(tuple(len(b) for b in buckets), tuple(flags))
