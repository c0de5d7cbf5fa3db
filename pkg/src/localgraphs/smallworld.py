"""Kleinberg small-world generator on a sqrt(n) x sqrt(n) grid.

Directed out-edges: (v, u) exists with probability min(c / dist(v,u)^2, 1)
in Manhattan distance.  Because rows are independent, an all-neighbors
query realizes one row in two alternating phases:

* Phase 1 samples the distance of the next non-empty ring from the
  telescoped closed-form CDF (one word per draw);
* Phase 2 samples all successes inside that ring, conditioned on at
  least one, by geometric skips within the block of 4d labels.

Rings are sampled as if they held the full 4d positions; labels landing
outside the grid are discarded on output.  Ring labels start due north
of the vertex and proceed clockwise.

c < 1 thins every reported label with an independent keep-coin of bias
c.  c > 1 runs m = ceil(k*c) independent copies of the base process
(realized as one pass through their exact union, which is a Bernoulli
field of rate 1-(1-p)^m) and keeps a reported label with probability
c*p / (1-(1-p)^m); distances where c/d^2 exceeds 1 - 1/k are handled by
direct per-vertex coin flips instead.

Per-vertex answers are memoized and use per-vertex derived streams, so
they are independent across vertices and identical on repeat queries.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

from .rng import RandomSource, sample_geometric, _INV64


class GridVertex(NamedTuple):
    x: int
    y: int

    def linear_id(self, side: int) -> int:
        return (self.x - 1) * side + self.y


def from_linear(vid: int, side: int) -> GridVertex:
    if not 1 <= vid <= side * side:
        raise ValueError(f"vertex {vid} outside [1, {side * side}]")
    return GridVertex((vid - 1) // side + 1, (vid - 1) % side + 1)


def manhattan(u: GridVertex, v: GridVertex) -> int:
    return abs(u.x - v.x) + abs(u.y - v.y)


@lru_cache(maxsize=None)
def _ring_offsets(d: int) -> tuple[tuple[int, int], ...]:
    """Offsets at Manhattan distance d in label order: due north, clockwise."""
    out = []
    out.extend((i, d - i) for i in range(d))          # north -> east
    out.extend((d - i, -i) for i in range(d))         # east -> south
    out.extend((-i, -(d - i)) for i in range(d))      # south -> west
    out.extend((-(d - i), i) for i in range(d))       # west -> north
    return tuple(out)


def ring_members(center: GridVertex, d: int, side: int
                 ) -> list[tuple[int, GridVertex]]:
    """In-grid vertices at distance exactly d, as (label, vertex) pairs.

    Labels run over the full ring of 4d positions; out-of-grid labels
    are absent from the result.
    """
    if d < 1:
        raise ValueError("ring distance must be positive")
    cx, cy = center
    out = []
    for label, (dx, dy) in enumerate(_ring_offsets(d), start=1):
        x, y = cx + dx, cy + dy
        if 1 <= x <= side and 1 <= y <= side:
            out.append((label, GridVertex(x, y)))
    return out


@lru_cache(maxsize=None)
def _phase1_terms(dmax: int) -> tuple[float, ...]:
    """U(d) = d ln(d+1) - (d+1) ln d for d = 1..dmax (index d)."""
    terms = [0.0] * (dmax + 1)
    for d in range(1, dmax + 1):
        terms[d] = d * math.log(d + 1) - (d + 1) * math.log(d)
    return tuple(terms)


def log_ring_survival(a: int, d: int) -> float:
    """log prod_{i=a..d} (1 - 1/i^2)^{4i}, via the telescoped closed form."""
    if d < a:
        return 0.0
    if a == 1:
        return -math.inf  # ring 1 has success probability 1
    t_a = a * math.log(a - 1) - (a - 1) * math.log(a)
    u_d = d * math.log(d + 1) - (d + 1) * math.log(d)
    return 4.0 * (t_a + u_d)


def sample_next_distance(a: int, dmax: int, src: RandomSource,
                         copies: int = 1):
    """Distance of the next ring holding at least one success, or None.

    The base field has per-position bias 1/d^2; ``copies`` exponentiates
    the survival for the union of that many independent fields.  One
    word per call.
    """
    if a < 1:
        raise ValueError("distance lower bound must be >= 1")
    u = src.next_word() * _INV64
    if a > dmax:
        return None
    if a == 1:
        return 1  # CDF is identically 1 from distance 1 on
    terms = _phase1_terms(dmax)
    t_a = 4.0 * copies * (a * math.log(a - 1) - (a - 1) * math.log(a))

    def cdf(d: int) -> float:
        return 1.0 - math.exp(t_a + 4.0 * copies * terms[d])

    if cdf(dmax) <= u:
        return None
    lo, hi = a, dmax
    while lo < hi:
        mid = (lo + hi) >> 1
        if cdf(mid) > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


def sample_ring_neighbors(d: int, p_eff: float, src: RandomSource) -> list[int]:
    """Labels of all successes in the first non-empty block of 4d trials.

    Distributed as 4d i.i.d. Bernoulli(p_eff) conditioned on at least
    one success: the first geometric draw lands in some block and names
    the first success's label; further geometric skips fill out the rest
    of the block.  One word per draw.
    """
    block = 4 * d
    x = sample_geometric(p_eff, src)
    pos = (x - 1) % block + 1
    labels = [pos]
    while True:
        pos += sample_geometric(p_eff, src)
        if pos > block:
            return labels
        labels.append(pos)


def thin_labels(labels: list[int], c: float, src: RandomSource) -> list[int]:
    """Keep each reported label independently with probability c < 1.

    One word per label, consumed in label order.
    """
    if not 0.0 < c < 1.0:
        raise ValueError("thinning keeps a strict fraction in (0,1)")
    return [lab for lab in labels if src.next_word() * _INV64 < c]


def boost_accept_prob(c: float, d: int, copies: int) -> float:
    """Acceptance ratio c*p / (1 - (1-p)^copies) for p = 1/d^2.

    Faults if the ratio exceeds 1: the caller violated the precondition
    c/d^2 <= 1 - 1/k that makes the boosted union dominate c*p.
    """
    p = 1.0 / (d * d)
    union = -math.expm1(copies * math.log1p(-p))
    ratio = c * p / union
    if ratio > 1.0 + 2.0 ** -40:
        raise ValueError(
            f"boost acceptance ratio {ratio} > 1 at distance {d}; "
            "increase the boost factor k")
    return min(ratio, 1.0)


class SmallWorldGenerator:
    """All-neighbors queries on the directed small-world grid."""

    supports = ("AN",)

    def __init__(self, side: int, c: float, rng: RandomSource,
                 boost_k: int = 2):
        if side < 1:
            raise ValueError("grid side must be positive")
        if c <= 0.0:
            raise ValueError("strength c must be positive")
        if boost_k < 2 or int(boost_k) != boost_k:
            raise ValueError("boost factor k must be an integer >= 2")
        self.side = side
        self.c = float(c)
        self.boost_k = int(boost_k)
        self.n = side * side
        self.dmax = 2 * (side - 1)
        self._base = rng
        self._memo: dict[int, list[GridVertex]] = {}
        self.total_words = 0
        if self.c > 1.0:
            self._copies = math.ceil(self.boost_k * self.c)
            # direct flips where c*p > 1 - 1/k
            self._d_thresh = math.ceil(
                math.sqrt(self.c / (1.0 - 1.0 / self.boost_k)))
        else:
            self._copies = 1
            self._d_thresh = 1

    # -- internals ------------------------------------------------------
    def _ring_successes(self, src: RandomSource, start: int):
        """Yield (d, labels) for every non-empty ring of the union field."""
        copies = self._copies
        a = start
        while True:
            d = sample_next_distance(a, self.dmax, src, copies)
            if d is None:
                return
            if copies == 1:
                p_eff = 1.0 / (d * d)
            else:
                p_eff = -math.expm1(copies * math.log1p(-1.0 / (d * d)))
            yield d, sample_ring_neighbors(d, p_eff, src)
            a = d + 1

    def _generate_row(self, vid: int) -> list[GridVertex]:
        center = from_linear(vid, self.side)
        src = self._base.derive(vid)
        side = self.side
        c = self.c
        out: list[GridVertex] = []
        start = 1
        if c > 1.0:
            # saturated / near-saturated distances: flip each grid vertex
            for d in range(1, min(self._d_thresh - 1, self.dmax) + 1):
                p = min(c / (d * d), 1.0)
                for _lab, member in ring_members(center, d, side):
                    if src.next_word() * _INV64 < p:
                        out.append(member)
            start = self._d_thresh
            if start > self.dmax:
                self.total_words += src.words_consumed
                return out
        cx, cy = center
        for d, labels in self._ring_successes(src, start):
            if c < 1.0:
                labels = thin_labels(labels, c, src)
            elif c > 1.0:
                accept = boost_accept_prob(c, d, self._copies)
                labels = [lab for lab in labels
                          if src.next_word() * _INV64 < accept]
            if not labels:
                continue
            offsets = _ring_offsets(d)
            for lab in labels:
                dx, dy = offsets[lab - 1]
                x, y = cx + dx, cy + dy
                if 1 <= x <= side and 1 <= y <= side:
                    out.append(GridVertex(x, y))
        self.total_words += src.words_consumed
        return out

    # -- queries -----------------------------------------------------------
    def all_neighbors(self, vid: int) -> list[GridVertex]:
        """Out-neighbors of vertex ``vid`` (linear id), ordered by
        increasing distance, ties by ring label; memoized."""
        row = self._memo.get(vid)
        if row is None:
            row = self._generate_row(vid)
            self._memo[vid] = row
        return list(row)

    def all_neighbor_ids(self, vid: int) -> list[int]:
        side = self.side
        return [v.linear_id(side) for v in self.all_neighbors(vid)]
