"""The bucketing generator: all four query types, rejection sampling.

Each vertex's candidate range [1, n] is partitioned into contiguous
buckets holding roughly L expected neighbors each (vertex u goes to
bucket ceil(prefix_mass(u) / L)).  ``fill`` realizes one bucket with the
skip sampler; ``random-neighbor`` picks buckets uniformly at random from
a shrinking pool and accepts a filled bucket with probability
|neighbors| / M, which equalizes the return probability of every
neighbor without knowing the degree.  M is the Chernoff cap on the
neighbors a bucket can hold; a fill overflowing M indicates a mis-sized
cap and faults loudly rather than skewing uniformity.

Vertices whose bucket count is below ~4 ln n fall back to filling
everything (the concentration argument behind the pool needs
logarithmically many buckets).
"""

from __future__ import annotations

import math
from bisect import bisect_right, insort

from .models import EdgeProbabilityModel
from .rng import RandomSource, _INV64

_CEIL_GUARD = 1.0 - 2.0 ** -40


class FilledBucketError(RuntimeError):
    """fill() invoked on an already-FILLED bucket."""


class BucketOverflowError(RuntimeError):
    """A bucket realized more than M neighbors; M was sized too small."""


def default_bucket_cap(n: int, L: float) -> int:
    """M = ceil((1 + 3 ln n) * L), from the bucket-size tail bound."""
    return math.ceil((1.0 + 3.0 * math.log(max(n, 2))) * L)


class BucketGenerator:
    """Local-access generator with NN, RN, VP and AN queries."""

    supports = ("NN", "RN", "VP", "AN")

    def __init__(self, model: EdgeProbabilityModel, rng: RandomSource,
                 L: float = 8.0, M: int | None = None):
        if L < 1.0:
            raise ValueError("bucket mass L must be at least 1")
        self.model = model
        self.n = model.n
        self.rng = rng
        self.L = float(L)
        self.M = default_bucket_cap(model.n, L) if M is None else int(M)
        self._small_b = 4.0 * math.log(max(model.n, 2)) if model.n > 1 else 0.0
        self._marks: set[int] = set()          # (v << 32) | bucket index
        self._sets: dict[int, list[int]] = {}  # (v << 32) | i -> neighbors
        self._last: dict[int, int] = {}
        self._counts: dict[int, int] = {}      # memoized bucket_count per v
        # instrumentation
        self.fill_calls = 0
        self.fill_iterations = 0
        self.last_rn_iterations = 0
        self.max_rn_iterations = 0

    # -- bucket geometry ---------------------------------------------------
    def bucket_index(self, v: int, u: int) -> int:
        """Bucket of v that candidate u belongs to (1-based)."""
        prefix = self.model.expected_degree_range(v, 1, u)
        return max(1, math.ceil(prefix / self.L * _CEIL_GUARD))

    def bucket_count(self, v: int) -> int:
        count = self._counts.get(v)
        if count is None:
            total = self.model.expected_degree_range(v, 1, self.n)
            count = max(1, math.ceil(total / self.L * _CEIL_GUARD))
            self._counts[v] = count
        return count

    def bucket_range(self, v: int, i: int) -> tuple[int, int]:
        """Maximal contiguous candidate range mapping to bucket i."""
        count = self.bucket_count(v)
        if not 1 <= i <= count:
            raise ValueError(f"bucket {i} outside [1, {count}]")
        lo = 1 if i == 1 else self._first_of_bucket(v, i)
        hi = self.n if i == count else self._first_of_bucket(v, i + 1) - 1
        return lo, hi

    def _first_of_bucket(self, v: int, i: int) -> int:
        lo, hi = 1, self.n
        while lo < hi:
            mid = (lo + hi) >> 1
            if self.bucket_index(v, mid) >= i:
                hi = mid
            else:
                lo = mid + 1
        return lo

    # -- fill ----------------------------------------------------------------
    def fill(self, v: int, i: int) -> None:
        """Realize every undecided pair of bucket i of v and mark it FILLED."""
        key = (v << 32) | i
        if key in self._marks:
            raise FilledBucketError(f"bucket ({v}, {i}) already filled")
        lo, hi = self.bucket_range(v, i)
        self.fill_calls += 1
        model = self.model
        rng = self.rng
        marks = self._marks
        a = lo - 1
        iters = 0
        while a <= hi:
            iters += 1
            u = model.sample_first_success(v, a, hi + 1, rng)
            if u > hi:
                break
            j = self.bucket_index(u, v)
            if ((u << 32) | j) not in marks:
                self._insert(key, u)
                self._insert((u << 32) | j, v)
            a = u
        self.fill_iterations += iters
        marks.add(key)
        mine = self._sets.get(key)
        if mine is not None and len(mine) > self.M:
            raise BucketOverflowError(
                f"bucket ({v},{i}) holds {len(mine)} > M={self.M} neighbors")

    def _insert(self, key: int, u: int) -> None:
        lst = self._sets.get(key)
        if lst is None:
            self._sets[key] = [u]
        else:
            insort(lst, u)

    def _ensure_filled(self, v: int, i: int) -> list[int]:
        key = (v << 32) | i
        if key not in self._marks:
            self.fill(v, i)
        return self._sets.get(key, [])

    # -- queries ---------------------------------------------------------------
    def random_neighbor(self, v: int):
        """Uniform over the realized neighbors of v; None if isolated."""
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} outside [1, {self.n}]")
        rng = self.rng
        count = self.bucket_count(v)
        if count < self._small_b:
            neighbors = self.all_neighbors(v)
            self.last_rn_iterations = 1
            if not neighbors:
                return None
            return neighbors[int(rng.next_word() * _INV64 * len(neighbors))]
        pool = list(range(1, count + 1))
        m_inv = 1.0 / self.M
        iters = 0
        while pool:
            iters += 1
            slot = int(rng.next_word() * _INV64 * len(pool))
            i = pool[slot]
            members = self._ensure_filled(v, i)
            if members:
                if rng.next_word() * _INV64 < len(members) * m_inv:
                    self.last_rn_iterations = iters
                    if iters > self.max_rn_iterations:
                        self.max_rn_iterations = iters
                    return members[int(rng.next_word() * _INV64 * len(members))]
            else:
                pool[slot] = pool[-1]
                pool.pop()
        self.last_rn_iterations = iters
        if iters > self.max_rn_iterations:
            self.max_rn_iterations = iters
        return None

    def next_neighbor(self, v: int) -> int:
        """Smallest unreported neighbor above last[v], or n+1."""
        n = self.n
        if not 1 <= v <= n:
            raise ValueError(f"vertex {v} outside [1, {n}]")
        last = self._last.get(v, 0)
        if last >= n + 1:
            return n + 1
        if last >= n:
            self._last[v] = n + 1
            return n + 1
        count = self.bucket_count(v)
        i = self.bucket_index(v, last + 1)
        while i <= count:
            members = self._ensure_filled(v, i)
            pos = bisect_right(members, last)
            if pos < len(members):
                u = members[pos]
                self._last[v] = u
                return u
            i += 1
        self._last[v] = n + 1
        return n + 1

    def vertex_pair(self, u: int, v: int) -> int:
        """Whether edge {u,v} exists; fills u's bucket holding v if needed."""
        n = self.n
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValueError(f"pair ({u}, {v}) outside [1, {n}]")
        j = self.bucket_index(u, v)
        key_u = (u << 32) | j
        if key_u in self._marks:
            members = self._sets.get(key_u, ())
            pos = bisect_right(members, v)
            return 1 if pos and members[pos - 1] == v else 0
        i = self.bucket_index(v, u)
        key_v = (v << 32) | i
        if key_v in self._marks:
            members = self._sets.get(key_v, ())
            pos = bisect_right(members, u)
            return 1 if pos and members[pos - 1] == u else 0
        members = self._ensure_filled(u, j)
        pos = bisect_right(members, v)
        return 1 if pos and members[pos - 1] == v else 0

    def all_neighbors(self, v: int) -> list[int]:
        """The full realized neighbor list of v, ascending."""
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} outside [1, {self.n}]")
        out: list[int] = []
        for i in range(1, self.bucket_count(v) + 1):
            out.extend(self._ensure_filled(v, i))
        return out

    # -- accounting / audit -------------------------------------------------
    def stored_entries(self) -> int:
        return (len(self._last) + len(self._marks) + len(self._counts)
                + sum(len(s) for s in self._sets.values()))

    def words_consumed(self) -> int:
        return self.rng.words_consumed

    def audit(self) -> None:
        n = self.n
        for key, members in self._sets.items():
            v, i = key >> 32, key & 0xFFFFFFFF
            if members != sorted(members):
                raise AssertionError(f"bucket set ({v},{i}) not sorted")
            if len(members) > self.M:
                raise AssertionError(f"bucket set ({v},{i}) exceeds M")
            lo, hi = self.bucket_range(v, i)
            for u in members:
                if not lo <= u <= hi:
                    raise AssertionError(
                        f"neighbor {u} outside bucket ({v},{i})=[{lo},{hi}]")
                j = self.bucket_index(u, v)
                mirror = self._sets.get((u << 32) | j, ())
                pos = bisect_right(mirror, v)
                if not (pos and mirror[pos - 1] == v):
                    raise AssertionError(f"bucket symmetry broken ({v},{u})")
        for v, last in self._last.items():
            if not 0 <= last <= n + 1:
                raise AssertionError(f"last[{v}]={last} outside [0, n+1]")
