"""Alternative generator with worst-case guarantees and one word per query.

Instead of re-sampling over already-decided cells, this generator counts
the undecided candidates exactly and draws the first success among just
those coins.  A range tree over vertex positions keeps, per canonical
range, an order-statistic AVL multiset of the ``last`` values of the
vertices in that range.  A candidate u in (last[v], w_v) is undecided
iff last[u] < v and u is not an explicit vertex-pair zero, so per-range
undecided counts are range-width minus entries >= v minus recorded
zeros.

Queries:

* ``count(v)``  - number of undecided candidates below the next known
  neighbor;
* ``pick(v,F)`` - F-th smallest undecided candidate (canonical-range
  prefix sums, then a root-to-leaf descent);
* ``update(v,u)`` - move last[v] to u in the k+1 multisets holding it and
  purge newly implied entries from the vertex-pair zero sets.

Next-neighbor draws one ExactF variate (one word) and either picks the
F-th undecided candidate or takes the first known neighbor.  The SBM
variant keeps one range-tree copy and one zero-set per community and
inverts the community-weighted first-success CDF over positions, still
one word per query.

Vertex-pair zeros live in per-vertex ordered sets Q'_v, mirrored, and
only while both endpoints' ``last`` are below each other; ``update``
purges entries its ``last`` advance implies, keeping counts exact.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right, insort

from .models import EdgeProbabilityModel, GnpModel, SbmModel
from .rng import RandomSource, sample_bernoulli, sample_exactf, _INV64


class _Node:
    __slots__ = ("key", "cnt", "size", "height", "left", "right")

    def __init__(self, key: int):
        self.key = key
        self.cnt = 1
        self.size = 1
        self.height = 1
        self.left = None
        self.right = None


def _size(node) -> int:
    return node.size if node is not None else 0


def _height(node) -> int:
    return node.height if node is not None else 0


def _fix(node) -> None:
    node.size = node.cnt + _size(node.left) + _size(node.right)
    node.height = 1 + max(_height(node.left), _height(node.right))


def _rot_right(node):
    child = node.left
    node.left = child.right
    child.right = node
    _fix(node)
    _fix(child)
    return child


def _rot_left(node):
    child = node.right
    node.right = child.left
    child.left = node
    _fix(node)
    _fix(child)
    return child


def _balance(node):
    _fix(node)
    bal = _height(node.left) - _height(node.right)
    if bal > 1:
        if _height(node.left.left) < _height(node.left.right):
            node.left = _rot_left(node.left)
        return _rot_right(node)
    if bal < -1:
        if _height(node.right.right) < _height(node.right.left):
            node.right = _rot_right(node.right)
        return _rot_left(node)
    return node


class OrderStatMultiset:
    """AVL multiset of integers with subtree sizes (rank queries)."""

    __slots__ = ("root", "visits")

    def __init__(self):
        self.root = None
        self.visits = 0

    def __len__(self) -> int:
        return _size(self.root)

    def insert(self, key: int) -> None:
        self.root = self._ins(self.root, key)

    def _ins(self, node, key):
        self.visits += 1
        if node is None:
            return _Node(key)
        if key == node.key:
            node.cnt += 1
            node.size += 1
            return node
        if key < node.key:
            node.left = self._ins(node.left, key)
        else:
            node.right = self._ins(node.right, key)
        return _balance(node)

    def remove(self, key: int) -> None:
        self.root, found = self._del(self.root, key)
        if not found:
            raise KeyError(key)

    def _del(self, node, key):
        self.visits += 1
        if node is None:
            return None, False
        if key == node.key:
            if node.cnt > 1:
                node.cnt -= 1
                node.size -= 1
                return node, True
            if node.left is None:
                return node.right, True
            if node.right is None:
                return node.left, True
            succ = node.right
            self.visits += 1
            while succ.left is not None:
                succ = succ.left
                self.visits += 1
            # adopt the successor's key (all its copies), detach its node
            node.key, node.cnt = succ.key, succ.cnt
            node.right, _ = self._del_min(node.right)
            return _balance(node), True
        if key < node.key:
            node.left, found = self._del(node.left, key)
        else:
            node.right, found = self._del(node.right, key)
        return _balance(node), found

    def _del_min(self, node):
        self.visits += 1
        if node.left is None:
            return node.right, node
        node.left, out = self._del_min(node.left)
        return _balance(node), out

    def count_ge(self, key: int) -> int:
        """Number of stored values >= key."""
        node = self.root
        acc = 0
        while node is not None:
            self.visits += 1
            if node.key >= key:
                acc += node.cnt + _size(node.right)
                node = node.left
            else:
                node = node.right
        return acc

    def to_sorted_list(self) -> list[int]:
        out: list[int] = []

        def walk(node):
            if node is None:
                return
            walk(node.left)
            out.extend([node.key] * node.cnt)
            walk(node.right)

        walk(self.root)
        return out


class RangeTreeIndex:
    """Lazily instantiated range tree of order-statistic multisets.

    Level j (0..k) splits [1, 2**k] into ranges of width 2**(k-j); the
    multiset of node (j, i) holds the nonzero ``last`` values of the
    vertices in its range.  Zero is never stored, so an empty multiset
    costs nothing and initialization is free.
    """

    __slots__ = ("n", "k", "size", "trees")

    def __init__(self, n: int):
        self.n = n
        self.k = (n - 1).bit_length() if n > 1 else 0
        self.size = 1 << self.k
        self.trees: dict[tuple[int, int], OrderStatMultiset] = {}

    def update_last(self, v: int, old: int, new: int) -> None:
        """Replace v's stored last value (old 0 means nothing stored)."""
        k = self.k
        for j in range(k + 1):
            idx = (v - 1) >> (k - j)
            key = (j, idx)
            tree = self.trees.get(key)
            if tree is None:
                tree = OrderStatMultiset()
                self.trees[key] = tree
            if old:
                tree.remove(old)
            tree.insert(new)

    def count_ge_piece(self, j: int, idx: int, threshold: int) -> int:
        tree = self.trees.get((j, idx))
        return tree.count_ge(threshold) if tree is not None else 0

    def decompose(self, lo: int, hi: int) -> list[tuple[int, int, int, int]]:
        """O(log n) disjoint canonical pieces (level, idx, a, b) covering
        [lo, hi], in ascending position order."""
        out: list[tuple[int, int, int, int]] = []
        stack = [(0, 0, 1, self.size)]
        while stack:
            j, idx, a, b = stack.pop()
            if lo <= a and b <= hi:
                out.append((j, idx, a, b))
                continue
            mid = (a + b) >> 1
            if hi > mid:
                stack.append((j + 1, 2 * idx + 1, mid + 1, b))
            if lo <= mid:
                stack.append((j + 1, 2 * idx, a, mid))
        return out

    def visits(self) -> int:
        return sum(t.visits for t in self.trees.values())

    def audit(self, last_map: dict[int, int], members) -> None:
        """Every instantiated multiset must equal the nonzero last values
        of ``members`` vertices inside its range."""
        for (j, idx), tree in self.trees.items():
            width = 1 << (self.k - j)
            a = idx * width + 1
            b = (idx + 1) * width
            expect = sorted(last_map[u] for u in members
                            if a <= u <= b and last_map.get(u, 0))
            got = tree.to_sorted_list()
            if got != expect:
                raise AssertionError(
                    f"range tree node ({j},{idx}) holds {got}, expected {expect}")


class DetGenerator:
    """Deterministic-performance generator: next-neighbor and vertex-pair."""

    supports = ("NN", "VP")

    def __init__(self, model: EdgeProbabilityModel, rng: RandomSource):
        self.model = model
        self.n = model.n
        self.rng = rng
        self._last: dict[int, int] = {}
        self._P: dict[int, list[int]] = {}
        # Q'_v split by the community of the stored entry
        self._Q: dict[int, dict[int, list[int]]] = {}
        self.q_inserts = 0
        self.q_removals = 0
        if isinstance(model, SbmModel):
            self._r = model.r
            self._indexes = [RangeTreeIndex(model.n) for _ in range(model.r)]
            self._comm = model.community_source.community_of
        elif isinstance(model, GnpModel):
            self._r = 1
            self._indexes = [RangeTreeIndex(model.n)]
            self._comm = None
        else:
            raise TypeError("det generator supports Gnp and Sbm models only")

    # -- helpers -----------------------------------------------------------
    def _community(self, v: int) -> int:
        return 1 if self._comm is None else self._comm(v)

    def _w(self, v: int, last: int) -> int:
        pv = self._P.get(v)
        if pv:
            i = bisect_right(pv, last)
            if i < len(pv):
                return pv[i]
        return self.n + 1

    def _q_count_in(self, v: int, lo: int, hi: int, comm: int | None = None) -> int:
        qv = self._Q.get(v)
        if not qv:
            return 0
        if comm is not None:
            lst = qv.get(comm)
            if not lst:
                return 0
            return bisect_right(lst, hi) - bisect_left(lst, lo)
        return sum(bisect_right(lst, hi) - bisect_left(lst, lo)
                   for lst in qv.values())

    def _undecided_in(self, v: int, lo: int, hi: int) -> int:
        """|{u in [lo,hi]: A[v][u] undecided}| (no known 1s inside)."""
        if lo > hi:
            return 0
        index = self._indexes[0]
        total = 0
        if self._comm is None:
            for j, idx, a, b in index.decompose(lo, hi):
                total += (b - a + 1) - index.count_ge_piece(j, idx, v)
        else:
            counts = self.model.community_source.count_range(lo, hi)
            for c, width in enumerate(counts):
                if not width:
                    continue
                got = 0
                for j, idx, a, b in self._indexes[c].decompose(lo, hi):
                    got += self._indexes[c].count_ge_piece(j, idx, v)
                total += width - got
        return total - self._q_count_in(v, lo, hi)

    # -- spec operations -----------------------------------------------------
    def count(self, v: int) -> int:
        """Undecided candidates of v strictly between last[v] and w_v."""
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} outside [1, {self.n}]")
        last = self._last.get(v, 0)
        w = self._w(v, last)
        return self._undecided_in(v, last + 1, w - 1)

    def pick(self, v: int, F: int) -> int:
        """The F-th smallest undecided candidate of v (1-based rank)."""
        last = self._last.get(v, 0)
        w = self._w(v, last)
        lo, hi = last + 1, w - 1
        if F < 1 or lo > hi:
            raise ValueError(f"rank {F} out of range")
        if self._comm is None:
            index = self._indexes[0]
            pieces = index.decompose(lo, hi)
            rank = F
            for j, idx, a, b in pieces:
                t = (b - a + 1) - index.count_ge_piece(j, idx, v) \
                    - self._q_count_in(v, a, b)
                if rank <= t:
                    return self._descend(v, j, idx, a, b, rank)
                rank -= t
            raise ValueError(f"rank {F} exceeds count(v)={F - rank}")
        # community-split variant: walk positions by binary search on the
        # undecided prefix count (exact, O(log^2 n) range queries)
        if F > self._undecided_in(v, lo, hi):
            raise ValueError(f"rank {F} exceeds count(v)")
        a, b = lo, hi
        while a < b:
            mid = (a + b) >> 1
            if self._undecided_in(v, lo, mid) >= F:
                b = mid
            else:
                a = mid + 1
        return a

    def _descend(self, v: int, j: int, idx: int, a: int, b: int, rank: int) -> int:
        index = self._indexes[0]
        while a < b:
            mid = (a + b) >> 1
            jl, il = j + 1, 2 * idx
            t_left = (mid - a + 1) - index.count_ge_piece(jl, il, v) \
                - self._q_count_in(v, a, mid)
            if rank <= t_left:
                j, idx, b = jl, il, mid
            else:
                rank -= t_left
                j, idx, a = j + 1, 2 * idx + 1, mid + 1
        return a

    def update(self, v: int, u: int) -> None:
        """Advance last[v] to u: move the stored value in the range tree
        and purge Q' entries the new last implies."""
        if u <= self._last.get(v, 0):
            raise ValueError("last values only advance")
        old = self._last.get(v, 0)
        comm_v = self._community(v)
        self._indexes[comm_v - 1].update_last(v, old, u)
        self._last[v] = u
        qv = self._Q.get(v)
        if qv:
            for lists in qv.values():
                cut = bisect_left(lists, u)
                if cut:
                    removed = lists[:cut]
                    del lists[:cut]
                    self.q_removals += len(removed)
                    for x in removed:
                        if x == v:
                            continue
                        mirror = self._Q[x][comm_v]
                        pos = bisect_left(mirror, v)
                        if pos >= len(mirror) or mirror[pos] != v:
                            raise AssertionError(
                                f"Q' mirror missing ({x},{v}) during purge")
                        del mirror[pos]
                        self.q_removals += 1

    # -- queries ----------------------------------------------------------------
    def next_neighbor(self, v: int) -> int:
        """Exact next neighbor; consumes exactly one random word."""
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} outside [1, {self.n}]")
        n = self.n
        last = self._last.get(v, 0)
        if last >= n + 1:
            self.rng.next_word()  # the ExactF draw of a degenerate query
            return n + 1
        w = self._w(v, last)
        if self._comm is None:
            t = self._undecided_in(v, last + 1, w - 1)
            F = sample_exactf(self.model.p, t, self.rng)
            if F <= t:
                u = self._pick_from(v, last, w, F)
                self._record_edge(v, u)
            else:
                u = w
        else:
            u = self._next_neighbor_sbm_inner(v, last, w)
        self.update(v, u)
        return u

    def next_neighbor_sbm(self, v: int) -> int:
        """Alias making the community-weighted variant explicit."""
        if self._comm is None:
            raise TypeError("model has no communities")
        return self.next_neighbor(v)

    def _pick_from(self, v: int, last: int, w: int, F: int) -> int:
        index = self._indexes[0]
        rank = F
        for j, idx, a, b in index.decompose(last + 1, w - 1):
            t = (b - a + 1) - index.count_ge_piece(j, idx, v) \
                - self._q_count_in(v, a, b)
            if rank <= t:
                return self._descend(v, j, idx, a, b, rank)
            rank -= t
        raise AssertionError("rank exceeded undecided count")

    def _next_neighbor_sbm_inner(self, v: int, last: int, w: int) -> int:
        """First success among the position-ordered undecided candidates,
        each with its community's bias; one word, binary search on the
        log-survival prefix."""
        u01 = self.rng.next_word() * _INV64
        lo, hi = last + 1, w - 1
        if lo > hi:
            return w
        row = self.model.prob_matrix[self._community(v) - 1]
        log1m = [(-math.inf if pj >= 1.0 else math.log1p(-pj)) for pj in row]

        def cdf(x: int) -> float:
            acc = 0.0
            counts = self.model.community_source.count_range(lo, x)
            for c, width in enumerate(counts):
                if not width or row[c] == 0.0:
                    continue
                got = 0
                for j, idx, a, b in self._indexes[c].decompose(lo, x):
                    got += self._indexes[c].count_ge_piece(j, idx, v)
                undecided = width - got - self._q_count_in(v, lo, x, c + 1)
                if undecided:
                    acc += undecided * log1m[c]
            return 1.0 - math.exp(acc)

        if cdf(hi) <= u01:
            return w
        a, b = lo, hi
        while a < b:
            mid = (a + b) >> 1
            if cdf(mid) > u01:
                b = mid
            else:
                a = mid + 1
        self._record_edge(v, a)
        return a

    def vertex_pair(self, u: int, v: int) -> int:
        """Whether edge {u,v} exists; at most one word."""
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
        comm_u = self._community(u)
        qv = self._Q.get(v)
        if qv:
            lst = qv.get(comm_u)
            if lst:
                i = bisect_right(lst, u)
                if i and lst[i - 1] == u:
                    return 0
        bit = sample_bernoulli(self.model.edge_prob(v, u), self.rng)
        if bit:
            self._record_edge(v, u)
        else:
            self._q_insert(v, u, comm_u)
            if u != v:
                self._q_insert(u, v, self._community(v))
        return bit

    def _q_insert(self, v: int, u: int, comm_u: int) -> None:
        insort(self._Q.setdefault(v, {}).setdefault(comm_u, []), u)
        self.q_inserts += 1

    def _record_edge(self, v: int, u: int) -> None:
        insort(self._P.setdefault(v, []), u)
        if u != v:
            insort(self._P.setdefault(u, []), v)

    # -- accounting / audit ----------------------------------------------------
    def node_visits(self) -> int:
        return sum(ix.visits() for ix in self._indexes)

    def stored_entries(self) -> int:
        return (len(self._last)
                + sum(len(p) for p in self._P.values())
                + sum(len(l) for q in self._Q.values() for l in q.values()))

    def audit(self) -> None:
        if self._comm is None:
            self._indexes[0].audit(self._last, list(self._last))
        else:
            for c in range(1, self._r + 1):
                members = [u for u in self._last if self._community(u) == c]
                self._indexes[c - 1].audit(self._last, members)
        for v, pv in self._P.items():
            for u in pv:
                mirror = self._P.get(u, ())
                i = bisect_right(mirror, v)
                if not (i and mirror[i - 1] == v):
                    raise AssertionError(f"P symmetry broken for ({v},{u})")
        for v, qv in self._Q.items():
            last_v = self._last.get(v, 0)
            for comm, lst in qv.items():
                for u in lst:
                    if u < last_v or v < self._last.get(u, 0):
                        raise AssertionError(
                            f"stale Q' entry ({v},{u}) not purged")
                    if u != v:
                        mirror = self._Q.get(u, {}).get(self._community(v), ())
                        j = bisect_right(mirror, v)
                        if not (j and mirror[j - 1] == v):
                            raise AssertionError(
                                f"Q' mirror broken for ({v},{u})")
