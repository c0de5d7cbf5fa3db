"""Next-neighbor queries by sampling runs of non-edges in one shot.

Instead of flipping each candidate coin, the generator draws the
position of the first success directly from the survival-product CDF of
the remaining range, then re-draws whenever the landed cell was already
decided to be a non-edge by the other endpoint (its ``last`` passed us)
or by an explicit vertex-pair answer (the pair sits in ``Q``).  The
state is the classic succinct representation of the partially revealed
adjacency matrix:

* ``last[v]``   - everything at or below it in row v is decided;
* ``P_v``       - the known neighbors of v (kept symmetric);
* ``Q``         - pairs explicitly decided 0 by vertex-pair queries while
                  still undecided by both ``last`` pointers.

Pairs enter ``Q`` only when u > last[v] and v > last[u]; stale entries
(later implied by ``last``) are tolerated because the last/P checks run
first.  Entries are never deleted.
"""

from __future__ import annotations

from bisect import bisect_right, insort

from .models import EdgeProbabilityModel
from .rng import RandomSource, sample_bernoulli


class SkipGenerator:
    """Local-access generator supporting next-neighbor and vertex-pair."""

    supports = ("NN", "VP")

    def __init__(self, model: EdgeProbabilityModel, rng: RandomSource):
        self.model = model
        self.n = model.n
        self.rng = rng
        self._last: dict[int, int] = {}
        self._P: dict[int, list[int]] = {}
        self._Q: set[tuple[int, int]] = set()
        self.last_query_iterations = 0
        self.max_query_iterations = 0

    # -- queries ---------------------------------------------------------
    def next_neighbor(self, v: int) -> int:
        """Smallest undiscovered neighbor above last[v], or n+1."""
        n = self.n
        if not 1 <= v <= n:
            raise ValueError(f"vertex {v} outside [1, {n}]")
        last = self._last.get(v, 0)
        if last >= n + 1:
            self.last_query_iterations = 0
            return n + 1
        pv = self._P.get(v)
        w = n + 1
        if pv:
            i = bisect_right(pv, last)
            if i < len(pv):
                w = pv[i]
        u = last
        iters = 0
        model = self.model
        rng = self.rng
        q = self._Q
        lastmap = self._last
        while True:
            iters += 1
            u = model.sample_first_success(v, u, w, rng)
            if u == w:
                break
            if lastmap.get(u, 0) < v and (
                    (u, v) if u <= v else (v, u)) not in q:
                self._record_edge(v, u)
                break
        self._last[v] = u
        self.last_query_iterations = iters
        if iters > self.max_query_iterations:
            self.max_query_iterations = iters
        return u

    def vertex_pair(self, u: int, v: int) -> int:
        """Whether edge {u,v} exists, consistent with all prior answers."""
        n = self.n
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValueError(f"pair ({u}, {v}) outside [1, {n}]")
        pv = self._P.get(v)
        if pv:
            i = bisect_right(pv, u)
            if i and pv[i - 1] == u:
                return 1
        if u < self._last.get(v, 0) or v < self._last.get(u, 0):
            return 0
        key = (u, v) if u <= v else (v, u)
        if key in self._Q:
            return 0
        bit = sample_bernoulli(self.model.edge_prob(v, u), self.rng)
        if bit:
            self._record_edge(v, u)
        else:
            # only undecided pairs reach here, so the Q invariant
            # (u > last[v] and v > last[u]) holds at insertion
            self._Q.add(key)
        return bit

    # -- internals ---------------------------------------------------------
    def _record_edge(self, v: int, u: int) -> None:
        pv = self._P.setdefault(v, [])
        insort(pv, u)
        if u != v:
            insort(self._P.setdefault(u, []), v)

    def known_neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(self._P.get(v, ()))

    def stored_entries(self) -> int:
        return (len(self._last) + len(self._Q)
                + sum(len(p) for p in self._P.values()))

    def audit(self) -> None:
        """Structural invariants; raises AssertionError on violation."""
        n = self.n
        for v, last in self._last.items():
            if not 0 <= last <= n + 1:
                raise AssertionError(f"last[{v}]={last} outside [0, n+1]")
        for v, pv in self._P.items():
            if pv != sorted(pv):
                raise AssertionError(f"P[{v}] not sorted")
            for u in pv:
                mirror = self._P.get(u, ())
                i = bisect_right(mirror, v)
                if not (i and mirror[i - 1] == v):
                    raise AssertionError(f"P symmetry broken for ({v},{u})")
        for (a, b) in self._Q:
            if a > b:
                raise AssertionError(f"Q pair ({a},{b}) not canonical")
            pv = self._P.get(a, ())
            i = bisect_right(pv, b)
            if i and pv[i - 1] == b:
                raise AssertionError(f"pair ({a},{b}) in both P and Q")
