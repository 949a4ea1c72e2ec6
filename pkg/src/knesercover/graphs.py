"""Simple graphs on [n] with bit-row adjacency.

Supports exact clique counting, independent k-set counting (optionally
restricted to sets containing/avoiding fixed vertices), complements and
induced subgraphs, and the Khadzhiivanov-Nikiforov clique-count inequality
certified with exact rational arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from .sets import SetFamily, _as_mask, elements_from_mask


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected graph on vertices 1..n; rows[i] is the neighbor mask of i+1."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if len(self.rows) != self.n:
            raise ValueError("adjacency must have one row per vertex")
        full = (1 << self.n) - 1
        for i, row in enumerate(self.rows):
            if row & ~full:
                raise ValueError(f"row {i + 1} has neighbors outside [1, {self.n}]")
            if row >> i & 1:
                raise ValueError(f"self-loop at vertex {i + 1}")
        for i in range(self.n):
            for j in elements_from_mask(self.rows[i]):
                if not self.rows[j - 1] >> i & 1:
                    raise ValueError(f"adjacency not symmetric at ({i + 1}, {j})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "SimpleGraph":
        rows = [0] * n
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n) or u == v:
                raise ValueError(f"bad edge ({u}, {v}) for n={n}")
            rows[u - 1] |= 1 << (v - 1)
            rows[v - 1] |= 1 << (u - 1)
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> "SimpleGraph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "SimpleGraph":
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << i) for i in range(n)))

    @classmethod
    def cycle(cls, n: int) -> "SimpleGraph":
        return cls.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])

    @property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for i in range(self.n):
            row = self.rows[i] >> (i + 1) << (i + 1)
            for j in elements_from_mask(row):
                yield (i + 1, j)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u - 1] >> (v - 1) & 1)


def complement(g: SimpleGraph) -> SimpleGraph:
    """Edge set complemented off-diagonal."""
    full = (1 << g.n) - 1
    return SimpleGraph(g.n, tuple(full & ~row & ~(1 << i) for i, row in enumerate(g.rows)))


def induced_subgraph(g: SimpleGraph, vertices) -> SimpleGraph:
    """Subgraph induced on the given vertices, relabeled 1..|X| in sorted order."""
    if isinstance(vertices, int):
        verts = elements_from_mask(vertices)
    else:
        verts = tuple(sorted(set(vertices)))
    for v in verts:
        if not 1 <= v <= g.n:
            raise ValueError(f"vertex {v} outside [1, {g.n}]")
    index = {v: i for i, v in enumerate(verts)}
    rows = []
    for v in verts:
        row = 0
        for w in elements_from_mask(g.rows[v - 1]):
            if w in index:
                row |= 1 << index[w]
        rows.append(row)
    return SimpleGraph(len(verts), tuple(rows))


def _degeneracy_order(g: SimpleGraph) -> list[int]:
    """Vertex positions (0-indexed) in degeneracy order, smallest index first on ties."""
    n = g.n
    alive = (1 << n) - 1
    order = []
    for _ in range(n):
        best_v, best_d = -1, n + 1
        m = alive
        while m:
            low = m & -m
            v = low.bit_length() - 1
            d = (g.rows[v] & alive).bit_count()
            if d < best_d:
                best_v, best_d = v, d
            m ^= low
        order.append(best_v)
        alive &= ~(1 << best_v)
    return order


def count_cliques(g: SimpleGraph, r: int) -> int:
    """Exact number of r-vertex cliques, by ordered backtracking on bit rows."""
    if r < 1:
        raise ValueError(f"clique size must be >= 1, got {r}")
    n = g.n
    if r > n:
        return 0
    if r == 1:
        return n
    order = _degeneracy_order(g)
    pos = {v: i for i, v in enumerate(order)}
    adj = [0] * n
    for i, v in enumerate(order):
        row = 0
        for w in elements_from_mask(g.rows[v]):
            row |= 1 << pos[w - 1]
        adj[i] = row

    def count_from(cand: int, need: int) -> int:
        if need == 1:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            if cand.bit_count() < need - 1:
                break
            v = low.bit_length() - 1
            total += count_from(adj[v] & cand, need - 1)
        return total

    return count_from((1 << n) - 1, r)


def independent_ksets(
    g: SimpleGraph,
    k: int,
    mode: str = "count",
    require=0,
    avoid=0,
    visitor: Optional[Callable[[int], None]] = None,
):
    """Independent k-sets of g, optionally containing `require` and avoiding `avoid`.

    mode "count" returns the exact count, "collect" returns a SetFamily of
    the full k-sets, "visit" calls the visitor with each mask and returns the
    count. Backtracking prunes branches whose candidate pool is too small.
    """
    if mode not in ("count", "collect", "visit"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "visit" and visitor is None:
        raise ValueError("visit mode needs a visitor")
    req = _as_mask(require)
    av = _as_mask(avoid)
    n = g.n
    out: list[int] = []
    if req & av or req.bit_count() > k:
        count = 0
    else:
        rows = g.rows
        blocked = av
        ok = True
        mm = req
        while mm:
            low = mm & -mm
            v = low.bit_length() - 1
            if rows[v] & req:
                ok = False
                break
            blocked |= rows[v]
            mm ^= low
        if not ok:
            count = 0
        else:
            need = k - req.bit_count()
            cand = (1 << n) - 1 & ~req & ~blocked
            count = _independent_rec(rows, cand, need, req, out if mode == "collect" else None, visitor)

    if mode == "collect":
        return SetFamily.from_masks(n, out, k=k)
    return count


def _independent_rec(rows, cand, need, chosen, sink, visitor) -> int:
    if need == 0:
        if sink is not None:
            sink.append(chosen)
        if visitor is not None:
            visitor(chosen)
        return 1
    if cand.bit_count() < need:
        return 0
    if sink is None and visitor is None and need == 1:
        return cand.bit_count()
    total = 0
    while cand:
        low = cand & -cand
        cand ^= low
        if need > 1 and cand.bit_count() < need - 1:
            break
        v = low.bit_length() - 1
        total += _independent_rec(rows, cand & ~rows[v], need - 1, chosen | low, sink, visitor)
    return total


@dataclass(frozen=True)
class KnrResult:
    """Outcome of one clique-count ratio inequality check, all values exact."""

    r: int
    applicable: bool
    gamma: Fraction
    lhs: int
    rhs: Fraction
    n_r_minus_1: int
    holds: Optional[bool]


def knr_check(g: SimpleGraph, r: int) -> KnrResult:
    """Khadzhiivanov-Nikiforov inequality: N_r >= ((2(r-1)g - (r-2)) / r) * n * N_{r-1}.

    Applicable when the edge density g = |E| / n^2 is at least (r-2)/(2(r-1));
    `holds` then requires both the count bound and N_{r-1} > 0, and is None
    when the density gate fails.
    """
    if r < 2:
        raise ValueError(f"inequality needs r >= 2, got {r}")
    n = g.n
    gamma = Fraction(g.edge_count, n * n) if n else Fraction(0)
    applicable = gamma >= Fraction(r - 2, 2 * (r - 1))
    n_r = count_cliques(g, r) if r <= n else 0
    n_prev = count_cliques(g, r - 1) if r - 1 <= n else 0
    rhs = Fraction(2 * (r - 1) * gamma - (r - 2), r) * n * n_prev
    holds = (n_r >= rhs and n_prev > 0) if applicable else None
    return KnrResult(r, applicable, gamma, n_r, rhs, n_prev, holds)


@dataclass(frozen=True)
class GraphStats:
    """Density pair (gamma, rho = 1/2 - gamma) and exact clique counts N_1..N_r."""

    gamma: Fraction
    rho: Fraction
    clique_counts: tuple[int, ...]


def graph_stats(g: SimpleGraph, r_max: int) -> GraphStats:
    gamma = Fraction(g.edge_count, g.n * g.n) if g.n else Fraction(0)
    counts = tuple(count_cliques(g, r) for r in range(1, r_max + 1))
    return GraphStats(gamma, Fraction(1, 2) - gamma, counts)


def gnp(n: int, p: float, seed: int) -> SimpleGraph:
    """Seeded G(n, p) with edges sampled in ascending pair order."""
    rng = random.Random(seed)
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < p]
    return SimpleGraph.from_edges(n, edges)
