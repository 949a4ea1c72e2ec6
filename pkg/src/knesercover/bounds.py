"""Exact-arithmetic certification of the closed-form bounds.

Every inequality stated exactly is checked with arbitrary-precision integers
or Fractions; the only floating-point quantity is the regime parameter
epsilon = 3 / ln k, compared with a documented 1e-9 tolerance.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional

from .sets import SetFamily, mask_from_elements, elements_from_mask

REGIME_TOLERANCE = 1e-9


def binomial(n: int, k: int) -> int:
    """Exact C(n, k); 0 when k < 0, k > n, or n < 0."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def ekr_bound(n: int, k: int) -> int:
    """Maximum size of an intersecting k-uniform family on [n]: C(n-1, k-1)."""
    if n < 2 * k:
        raise ValueError(f"EKR regime requires n >= 2k, got n={n}, k={k}")
    return binomial(n - 1, k - 1)


def hm_bound(n: int, k: int) -> int:
    """Hilton-Milner cap on non-trivial intersecting families: C(n-1,k-1) - C(n-k-1,k-1) + 1."""
    if n < 2 * k:
        raise ValueError(f"Hilton-Milner regime requires n >= 2k, got n={n}, k={k}")
    return binomial(n - 1, k - 1) - binomial(n - k - 1, k - 1) + 1


@dataclass(frozen=True)
class CubicBarrierResult:
    """Color-count comparison at n = k^3, all quantities exact."""

    k: int
    n: int
    lhs: Fraction
    rhs: int
    holds: bool
    hm_value: int
    hm_cap: int
    hm_cap_holds: bool


def cubic_barrier_check(k: int) -> CubicBarrierResult:
    """At n = k^3, the counting lower bound n(n-1)/(k^2 (k-1)) on the number of
    non-trivial colors exceeds n - 2k + 2, so no such coloring exists there.

    Also certifies the intermediate cap hm_bound(n, k) <= k * C(n-2, k-2).
    """
    if k < 3:
        raise ValueError(f"needs k >= 3, got {k}")
    n = k**3
    lhs = Fraction(n * (n - 1), k * k * (k - 1))
    rhs = n - 2 * k + 2
    hm_value = hm_bound(n, k)
    hm_cap = k * binomial(n - 2, k - 2)
    return CubicBarrierResult(
        k, n, lhs, rhs, lhs > rhs, hm_value, hm_cap, hm_value <= hm_cap
    )


@dataclass(frozen=True)
class ThresholdResult:
    bound: Fraction
    m: int
    holds: bool


def covering_count_threshold(n: int, k: int, m: int) -> ThresholdResult:
    """Any covering by m non-trivial intersecting families forces m > n^2/(8k^2)."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    bound = Fraction(n * n, 8 * k * k)
    return ThresholdResult(bound, m, m > bound)


@dataclass(frozen=True)
class ContradictionResult:
    bound: Fraction
    colors: int
    contradiction: bool


def threshold_contradiction(n: int, k: int) -> ContradictionResult:
    """Whether m = n - 2k + 2 colors already violates the n^2/(8k^2) threshold.

    When the contradiction fires, no covering of the k-sets of [n] by
    n - 2k + 2 non-trivial intersecting families can exist.
    """
    res = covering_count_threshold(n, k, n - 2 * k + 2)
    return ContradictionResult(res.bound, res.m, not res.holds)


# ---------------------------------------------------------------------------
# Deletion bound for families with no large independent set


class IndependentSetFound(ValueError):
    """Raised when the no-independent-b-set hypothesis fails; carries a witness."""

    def __init__(self, b: int, witness: tuple[int, ...]):
        super().__init__(f"independent set of size {b} exists: {witness}")
        self.witness = witness


def profile_from_family(f: SetFamily) -> dict[int, int]:
    """Per-cardinality member counts of a mixed-uniformity family."""
    counts: dict[int, int] = {}
    for m in f.members:
        c = m.bit_count()
        counts[c] = counts.get(c, 0) + 1
    return counts


def independent_b_set(h: SetFamily, b: int) -> Optional[tuple[int, ...]]:
    """An independent set of size b (no member inside it), or None.

    Exhaustive over all C(n, b) candidates; independence is downward closed,
    so checking size exactly b decides sizes >= b as well.
    """
    n = h.n
    if b > n:
        return None
    members = h.members
    for combo in combinations(range(1, n + 1), b):
        imask = mask_from_elements(combo)
        if all(m & ~imask for m in members):
            return combo
    return None


def independence_number_ok(h: SetFamily, b: int) -> bool:
    """True iff the family has no independent set of size b."""
    return independent_b_set(h, b) is None


@dataclass(frozen=True)
class SpencerCheck:
    lhs: Fraction
    rhs: Fraction
    holds: bool


def spencer_check(profile: Mapping[int, int], n: int, b: int, p: Fraction) -> SpencerCheck:
    """Exact evaluation of sum_{i>=2} |H^(i)| p^i > n p - b.

    The caller is responsible for the hypothesis that the family has no
    independent set of size b (see independence_number_ok).
    """
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    lhs = Fraction(0)
    for size, count in profile.items():
        if size >= 2:
            lhs += count * p**size
    rhs = n * p - b
    return SpencerCheck(lhs, rhs, lhs > rhs)


@dataclass(frozen=True)
class SpencerExperiment:
    trials: int
    seed: int
    mean_a: float
    mean_hits: float
    bound_ok: float
    expected_a: float
    expected_hits: float


def spencer_experiment(
    h: SetFamily, b: int, p: Fraction, trials: int, seed: int
) -> SpencerExperiment:
    """Randomized deletion experiment behind the inequality.

    Each trial samples A by keeping every element independently with
    probability p, then deletes from A the smallest element of every member
    contained in A. The per-trial bound |A| - |{members inside A}| < b must
    hold on every sample, not just on average; bound_ok reports the fraction
    of trials satisfying it. Trial t uses the derived seed (seed XOR t).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    pf = Fraction(p)
    if not 0 < pf < 1:
        raise ValueError(f"p must lie in (0, 1), got {pf}")
    witness = independent_b_set(h, b)
    if witness is not None:
        raise IndependentSetFound(b, witness)
    n = h.n
    members = h.members
    p_float = float(pf)
    sum_a = 0
    sum_hits = 0
    ok = 0
    for t in range(trials):
        rng = random.Random(seed ^ t)
        amask = 0
        for e in range(n):
            if rng.random() < p_float:
                amask |= 1 << e
        inside = [m for m in members if not m & ~amask]
        removed = 0
        for m in inside:
            removed |= m & -m
        a_prime = amask & ~removed
        a_size = amask.bit_count()
        hits = len(inside)
        # per-sample chain from the proof: |A| - hits <= |A'| and A' independent
        assert a_size - hits <= a_prime.bit_count()
        assert all(m & ~a_prime for m in members)
        sum_a += a_size
        sum_hits += hits
        if a_size - hits < b:
            ok += 1
    expected_hits = float(
        sum(count * pf**size for size, count in profile_from_family(h).items() if size >= 2)
    )
    return SpencerExperiment(
        trials=trials,
        seed=seed,
        mean_a=sum_a / trials,
        mean_hits=sum_hits / trials,
        bound_ok=ok / trials,
        expected_a=n * p_float,
        expected_hits=expected_hits,
    )


@dataclass(frozen=True)
class RegimeResult:
    epsilon: float
    threshold: float
    in_regime: bool


def epsilon_regime(n: int, k: int) -> RegimeResult:
    """Parameter gate n >= (2 + eps) k^2 with eps = 3 / ln k.

    Floating point with a 1e-9 comparison tolerance; this is the one bound
    that is not exact rational arithmetic.
    """
    if k < 2:
        raise ValueError(f"regime needs k >= 2, got {k}")
    eps = 3.0 / math.log(k)
    threshold = (2.0 + eps) * k * k
    return RegimeResult(eps, threshold, n >= threshold - REGIME_TOLERANCE)
