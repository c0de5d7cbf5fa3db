"""Lazy i.i.d. community labels with range counting.

Labels are never materialized one by one.  A dyadic tree keeps, per
range, the count vector of communities among the real vertices of that
range; the root is drawn from the multinomial distribution and children
split their parent through exact multivariate hypergeometric sampling
(draw `left-width` marbles without replacement from the parent urn).
Materialized counts are memoized, so answers are independent of query
order and repeated queries consume no randomness.

The two-color sampler follows the halving recursion: drawing exactly
half the urn has a directly invertible PMF, an odd urn first draws one
marble proportionally, and drawing more than half samples the
complement.
"""

from __future__ import annotations

import math
from math import lgamma

from .rng import RandomSource, sample_multinomial, _INV64


def _log_comb(n: int, k: int) -> float:
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def sample_two_color_half(c1: int, c2: int, src: RandomSource) -> tuple[int, int]:
    """Counts of each color when drawing exactly (c1+c2)/2 marbles.

    The urn size must be even.  One word; exact hypergeometric CDF
    inversion, accumulating the PMF through its ratio recurrence.
    """
    if c1 < 0 or c2 < 0:
        raise ValueError("negative marble count")
    B = c1 + c2
    if B % 2 != 0:
        raise ValueError(f"urn size {B} is odd")
    ell = B // 2
    u = src.next_word() * _INV64
    s_lo = max(0, ell - c2)
    s_hi = min(c1, ell)
    # pmf(s) = C(c1,s)*C(c2,ell-s)/C(B,ell)
    pmf = math.exp(_log_comb(c1, s_lo) + _log_comb(c2, ell - s_lo)
                   - _log_comb(B, ell))
    cdf = 0.0
    s = s_lo
    while s < s_hi:
        cdf += pmf
        if cdf > u:
            break
        pmf *= (c1 - s) * (ell - s) / ((s + 1) * (c2 - ell + s + 1))
        s += 1
    return s, ell - s


def sample_two_color(c1: int, c2: int, ell: int, src: RandomSource) -> tuple[int, int]:
    """Counts of each color when drawing ell marbles without replacement.

    Halving recursion: O(log(c1+c2)) words.
    """
    if c1 < 0 or c2 < 0:
        raise ValueError("negative marble count")
    if not 0 <= ell <= c1 + c2:
        raise ValueError(f"cannot draw {ell} from {c1 + c2} marbles")
    d1 = d2 = 0  # marbles drawn by odd-step single draws
    while True:
        B = c1 + c2
        if ell == 0:
            return d1, d2
        if ell == B:
            return d1 + c1, d2 + c2
        if B % 2 == 1:
            # draw a single marble, color 1 with probability c1/B
            if src.next_word() * _INV64 * B < c1:
                c1 -= 1
                d1 += 1
            else:
                c2 -= 1
                d2 += 1
            ell -= 1
            continue
        if ell > B // 2:
            s1, s2 = sample_two_color(c1, c2, B - ell, src)
            return d1 + c1 - s1, d2 + c2 - s2
        c1, c2 = sample_two_color_half(c1, c2, src)
        if ell == B // 2:
            return d1 + c1, d2 + c2


def sample_mvh(counts, ell: int, src: RandomSource) -> tuple[int, ...]:
    """Multivariate hypergeometric sample: how many of each of r colors
    appear when drawing ell marbles without replacement.

    Peels one color at a time against the collapsed rest; O(r log B)
    words.
    """
    counts = list(counts)
    if any(c < 0 for c in counts):
        raise ValueError("negative marble count")
    total = sum(counts)
    if not 0 <= ell <= total:
        raise ValueError(f"cannot draw {ell} from {total} marbles")
    out = []
    rest = total
    for k in range(len(counts) - 1):
        rest -= counts[k]
        s1, _ = sample_two_color(counts[k], rest, ell, src)
        out.append(s1)
        ell -= s1
    out.append(ell)
    return tuple(out)


class CommunityTree:
    """Dyadic tree of per-range community counts over vertices 1..n.

    ``weights`` is the community distribution; communities are reported
    1-based.  ``root_counts`` overrides the multinomial root draw for
    the fixed-community-sizes variant.  The tree pads n up to a power of
    two; phantom positions past n carry no community and never mix into
    real counts (splits draw only over the real positions of a range).
    """

    __slots__ = ("n", "r", "weights", "rng", "_size", "_levels", "_nodes",
                 "_root_override")

    def __init__(self, n: int, weights, rng: RandomSource, root_counts=None):
        if n < 1:
            raise ValueError("need at least one vertex")
        weights = tuple(float(w) for w in weights)
        if not weights:
            raise ValueError("need at least one community")
        if any(w < 0.0 for w in weights):
            raise ValueError("negative community weight")
        self.n = n
        self.r = len(weights)
        self.weights = weights
        self.rng = rng
        self._levels = (n - 1).bit_length()
        self._size = 1 << self._levels
        self._nodes: dict[tuple[int, int], tuple[int, ...]] = {}
        if root_counts is not None:
            root_counts = tuple(int(c) for c in root_counts)
            if len(root_counts) != self.r or any(c < 0 for c in root_counts):
                raise ValueError("bad root count vector")
            if sum(root_counts) != n:
                raise ValueError("root counts must sum to n")
        self._root_override = root_counts

    # -- lazy materialization -------------------------------------------
    def _real_width(self, lo: int, hi: int) -> int:
        return max(0, min(hi, self.n) - lo + 1)

    def _root(self) -> tuple[int, ...]:
        node = self._nodes.get((0, 0))
        if node is None:
            if self._root_override is not None:
                node = self._root_override
            else:
                node = sample_multinomial(self.n, self.weights, self.rng)
            self._nodes[(0, 0)] = node
        return node

    def _children(self, level: int, idx: int, counts, lo: int,
                  hi: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        key_l = (level + 1, 2 * idx)
        left = self._nodes.get(key_l)
        if left is not None:
            return left, self._nodes[(level + 1, 2 * idx + 1)]
        mid = (lo + hi) >> 1
        left_real = self._real_width(lo, mid)
        parent_real = self._real_width(lo, hi)
        if left_real >= parent_real:
            left = counts
        elif left_real == 0:
            left = (0,) * self.r
        else:
            left = sample_mvh(counts, left_real, self.rng)
        right = tuple(c - l for c, l in zip(counts, left))
        if any(x < 0 for x in right):
            raise AssertionError("community split broke conservation")
        self._nodes[key_l] = left
        self._nodes[(level + 1, 2 * idx + 1)] = right
        return left, right

    # -- queries ----------------------------------------------------------
    def count_range(self, a: int, b: int) -> tuple[int, ...]:
        """Counts of each community among vertices a..b (inclusive)."""
        if not 1 <= a <= b <= self.n:
            raise ValueError(f"range [{a}, {b}] outside [1, {self.n}]")
        acc = [0] * self.r
        stack = [(0, 0, 1, self._size, self._root())]
        while stack:
            level, idx, lo, hi, counts = stack.pop()
            if a <= lo and min(hi, self.n) <= b:
                for j in range(self.r):
                    acc[j] += counts[j]
                continue
            mid = (lo + hi) >> 1
            left, right = self._children(level, idx, counts, lo, hi)
            if a <= mid:
                stack.append((level + 1, 2 * idx, lo, mid, left))
            if b > mid:
                stack.append((level + 1, 2 * idx + 1, mid + 1, hi, right))
        return tuple(acc)

    def community_of(self, v: int) -> int:
        """1-based community of vertex v (realizes the leaf if needed)."""
        counts = self.count_range(v, v)
        for j, c in enumerate(counts):
            if c:
                return j + 1
        raise AssertionError(f"leaf {v} has no community")

    def materialized_nodes(self) -> int:
        return len(self._nodes)

    def check_conservation(self) -> None:
        """Audit: every materialized child pair sums to its parent."""
        for (level, idx), counts in self._nodes.items():
            left = self._nodes.get((level + 1, 2 * idx))
            if left is None:
                continue
            right = self._nodes[(level + 1, 2 * idx + 1)]
            if tuple(l + r for l, r in zip(left, right)) != counts:
                raise AssertionError(f"node ({level},{idx}) not conserved")
