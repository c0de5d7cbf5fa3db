"""Edge-probability models: pointwise p_{v,u}, range products and range sums.

Every generator in the package only needs three quantities from a model:
the single-edge probability p_{v,u}, the survival product
prod_{u=a..b} (1 - p_{v,u}) over a vertex range, and the expected-degree
sum sum_{u=a..b} p_{v,u}.  G(n,p) has closed forms; the stochastic block
model reduces both to per-community counts of a range, served lazily by a
:class:`~localgraphs.communities.CommunityTree`.

Vertex IDs run from 1 to n and ranges include u = v, so self-loops carry
probability like any other pair.
"""

from __future__ import annotations

import math

from .communities import CommunityTree
from .rng import DiscreteCdf, RandomSource, _INV64, CDF_TOLERANCE


def _pow_one_minus(p: float, k: int) -> float:
    """(1-p)**k with guards for the endpoints; k <= 0 gives 1."""
    if k <= 0 or p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0
    return math.exp(k * math.log1p(-p))


class EdgeProbabilityModel:
    """Shared interface: pointwise, range-product and range-sum queries."""

    n: int
    kind: str

    def edge_prob(self, v: int, u: int) -> float:
        raise NotImplementedError

    def survival(self, v: int, a: int, b: int) -> float:
        """prod_{u=a..b} (1 - p_{v,u}); 1 for an empty range."""
        raise NotImplementedError

    def expected_degree_range(self, v: int, a: int, b: int) -> float:
        """sum_{u=a..b} p_{v,u}; 0 for an empty range."""
        raise NotImplementedError

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} outside [1, {self.n}]")

    def skip_cdf(self, v: int, a: int, b: int) -> DiscreteCdf:
        """CDF of the first-success position on (a, b].

        eval(f) = 1 - survival(v, a+1, f) for a < f < b and eval(b) = 1:
        f = b absorbs the no-success event, so b's own coin stays unflipped.
        """
        if a >= b:
            raise ValueError(f"need a < b, got a={a}, b={b}")

        def _eval(f: int, _v=v, _a=a, _b=b) -> float:
            if f >= _b:
                return 1.0
            return 1.0 - self.survival(_v, _a + 1, f)

        return DiscreteCdf(a + 1, b, _eval)

    def sample_first_success(self, v: int, a: int, b: int,
                             src: RandomSource) -> int:
        """One draw from skip_cdf(v, a, b); bit-identical to routing the
        CDF through :func:`localgraphs.rng.sample_cdf_inverse`, inlined
        because it sits on every generator's hot path."""
        if a >= b:
            raise ValueError(f"need a < b, got a={a}, b={b}")
        u01 = src.next_word() * _INV64
        lo, hi = a + 1, b
        while lo < hi:
            mid = (lo + hi) >> 1
            c = 1.0 if mid >= b else 1.0 - self.survival(v, a + 1, mid)
            if c > u01:
                hi = mid
            else:
                lo = mid + 1
        return lo


class GnpModel(EdgeProbabilityModel):
    """Erdos-Renyi G(n, p): every pair (self-loops included) has bias p."""

    kind = "gnp"
    __slots__ = ("n", "p", "_log1mp")

    def __init__(self, n: int, p: float):
        if n < 1:
            raise ValueError("need at least one vertex")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"edge probability {p!r} outside [0,1]")
        self.n = n
        self.p = p
        self._log1mp = math.log1p(-p) if 0.0 < p < 1.0 else None

    def edge_prob(self, v: int, u: int) -> float:
        self._check_vertex(v)
        self._check_vertex(u)
        return self.p

    def survival(self, v: int, a: int, b: int) -> float:
        k = b - a + 1
        if k <= 0 or self.p == 0.0:
            return 1.0
        if self.p == 1.0:
            return 0.0
        return math.exp(k * self._log1mp)

    def expected_degree_range(self, v: int, a: int, b: int) -> float:
        k = b - a + 1
        return k * self.p if k > 0 else 0.0


class SbmModel(EdgeProbabilityModel):
    """Stochastic block model over lazily realized i.i.d. communities.

    ``prob_matrix`` is r x r symmetric with entries in [0,1];
    ``community_source`` owns the label realization and memoizes range
    counts, so repeated queries are consistent by construction.
    """

    kind = "sbm"
    __slots__ = ("n", "prob_matrix", "community_source", "r")

    def __init__(self, n: int, prob_matrix, community_source: CommunityTree):
        if n < 1:
            raise ValueError("need at least one vertex")
        r = len(prob_matrix)
        if r < 1:
            raise ValueError("need at least one community")
        for i in range(r):
            if len(prob_matrix[i]) != r:
                raise ValueError("probability matrix must be square")
            for j in range(r):
                pij = prob_matrix[i][j]
                if not 0.0 <= pij <= 1.0:
                    raise ValueError(f"matrix entry {pij!r} outside [0,1]")
                if abs(pij - prob_matrix[j][i]) > CDF_TOLERANCE:
                    raise ValueError("probability matrix must be symmetric")
        if community_source.n != n or community_source.r != r:
            raise ValueError("community source does not match model shape")
        self.n = n
        self.r = r
        self.prob_matrix = tuple(tuple(float(x) for x in row)
                                 for row in prob_matrix)
        self.community_source = community_source

    def community_of(self, v: int) -> int:
        return self.community_source.community_of(v)

    def edge_prob(self, v: int, u: int) -> float:
        self._check_vertex(v)
        self._check_vertex(u)
        i = self.community_source.community_of(v)
        j = self.community_source.community_of(u)
        return self.prob_matrix[i - 1][j - 1]

    def survival(self, v: int, a: int, b: int) -> float:
        if a > b:
            return 1.0
        row = self.prob_matrix[self.community_source.community_of(v) - 1]
        counts = self.community_source.count_range(a, b)
        out = 1.0
        for j, cj in enumerate(counts):
            if cj:
                out *= _pow_one_minus(row[j], cj)
        return out

    def expected_degree_range(self, v: int, a: int, b: int) -> float:
        if a > b:
            return 0.0
        row = self.prob_matrix[self.community_source.community_of(v) - 1]
        counts = self.community_source.count_range(a, b)
        return math.fsum(cj * row[j] for j, cj in enumerate(counts) if cj)


def load_sbm_file(path) -> tuple[tuple[float, ...], tuple[tuple[float, ...], ...]]:
    """Parse an SBM spec file: r, then r community weights, then the
    r x r symmetric probability matrix, whitespace separated."""
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError("empty SBM file")
    it = iter(tokens)
    try:
        r = int(next(it))
        if r < 1:
            raise ValueError("community count must be positive")
        weights = tuple(float(next(it)) for _ in range(r))
        matrix = tuple(tuple(float(next(it)) for _ in range(r))
                       for _ in range(r))
    except StopIteration:
        raise ValueError("truncated SBM file") from None
    leftovers = sum(1 for _ in it)
    if leftovers:
        raise ValueError(f"{leftovers} unexpected trailing tokens in SBM file")
    return weights, matrix
