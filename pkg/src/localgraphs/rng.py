"""Deterministic counter-based randomness and the shared discrete samplers.

The word source is a counter-based construction: the 64-bit output for a
given (seed, stream_id, counter) triple is a fixed avalanche hash of the
triple, so identical (seed, stream) pairs always reproduce the identical
word sequence and distinct streams of one seed are independent for all
practical purposes.  Every sampler in this module consumes exactly one
word per returned value (the multinomial sampler consumes one word per
conditional binomial, i.e. r-1 words for r categories), which makes
randomness accounting testable via ``words_consumed`` deltas.

Samplers invert discrete CDFs: a word maps to u in [0,1) and the sampler
returns the smallest domain element whose CDF exceeds u.  All floating
point work is double precision; the documented tolerance for CDF values
is 2**-40.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV64 = 2.0 ** -64

#: Absolute tolerance for "this CDF reaches 1" and weight-sum checks.
CDF_TOLERANCE = 2.0 ** -40


class MalformedCdfError(ValueError):
    """Raised when a CDF handed to the inverse sampler is not a CDF."""


def _mix64(x: int) -> int:
    x &= _MASK64
    x ^= x >> 30
    x = (x * _MIX1) & _MASK64
    x ^= x >> 27
    x = (x * _MIX2) & _MASK64
    return x ^ (x >> 31)


class RandomSource:
    """A single stream of 64-bit words identified by (seed, stream_id).

    The source is single-owner: it may be handed between threads but must
    not be shared.  Independent streams (distinct ``stream_id``) may be
    used concurrently without coordination.
    """

    __slots__ = ("seed", "stream_id", "counter", "words_consumed", "_key")

    def __init__(self, seed: int, stream_id: int = 0, counter: int = 0):
        if not (0 <= seed <= _MASK64 and 0 <= stream_id <= _MASK64):
            raise ValueError("seed and stream_id must be 64-bit unsigned")
        self.seed = seed
        self.stream_id = stream_id
        self.counter = counter
        self.words_consumed = 0
        self._key = _mix64(_mix64(seed) ^ (stream_id * _MIX2 + _GOLDEN))

    def next_word(self) -> int:
        """Return the next 64-bit word of the stream."""
        self.counter += 1
        self.words_consumed += 1
        x = (self._key + _GOLDEN * self.counter) & _MASK64
        x ^= x >> 30
        x = (x * _MIX1) & _MASK64
        x ^= x >> 27
        x = (x * _MIX2) & _MASK64
        return x ^ (x >> 31)

    def uniform(self) -> float:
        """Map the next word to [0, 1) by dividing by 2**64."""
        return self.next_word() * _INV64

    def derive(self, salt: int) -> "RandomSource":
        """A fresh stream deterministically derived from this one.

        Used to fan out independent per-vertex / per-trial streams.
        """
        return RandomSource(self.seed, _mix64(self.stream_id ^ (salt * _GOLDEN)))

    def __repr__(self) -> str:  # pragma: no cover
        return (f"RandomSource(seed={self.seed}, stream_id={self.stream_id}, "
                f"counter={self.counter})")


def next_word(src: RandomSource) -> int:
    """Functional alias for :meth:`RandomSource.next_word`."""
    return src.next_word()


@dataclass(frozen=True)
class DiscreteCdf:
    """A CDF over consecutive integers [domain_lo, domain_hi].

    ``eval(f)`` must be non-decreasing and reach 1 (within ``CDF_TOLERANCE``)
    at ``domain_hi``.
    """

    domain_lo: int
    domain_hi: int
    eval: Callable[[int], float]

    def __post_init__(self):
        if self.domain_lo > self.domain_hi:
            raise ValueError("empty CDF domain")


def sample_cdf_inverse(cdf: DiscreteCdf, src: RandomSource) -> int:
    """Draw one word, binary-search the smallest f with cdf.eval(f) > u.

    Consumes exactly one word.  The strict comparison with u in [0, 1)
    makes boundary words exact: with eval(f) = 0.5 the result flips at
    u = 0.5 precisely, and u = 0 cannot force domain_lo out of a
    zero-mass prefix.
    """
    u = src.next_word() * _INV64
    ev = cdf.eval
    lo, hi = cdf.domain_lo, cdf.domain_hi
    covered = False
    while lo < hi:
        mid = (lo + hi) >> 1
        c = ev(mid)
        if c != c or c < -CDF_TOLERANCE or c > 1.0 + CDF_TOLERANCE:
            raise MalformedCdfError(f"cdf value {c!r} at {mid} outside [0,1]")
        if c > u:
            hi = mid
            covered = True
        else:
            lo = mid + 1
    if not covered:
        c = ev(lo)
        if c != c or (c <= u and c < 1.0 - CDF_TOLERANCE):
            raise MalformedCdfError(
                f"cdf does not reach 1 at domain_hi ({c!r} at {lo} vs u={u!r})")
    return lo


def sample_bernoulli(p: float, src: RandomSource) -> int:
    """Return 1 with probability p; consumes one word."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"bernoulli bias {p!r} outside [0,1]")
    return 1 if src.next_word() * _INV64 < p else 0


def sample_geometric(p: float, src: RandomSource) -> int:
    """Index of the first success among Bernoulli(p) trials, starting at 1.

    Inverts P[X <= x] = 1 - (1-p)**x in closed form at double precision;
    consumes one word.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"geometric bias {p!r} outside (0,1]")
    u = src.next_word() * _INV64
    if p == 1.0:
        return 1
    # smallest x with 1-(1-p)^x > u  <=>  x > log(1-u)/log(1-p)
    return math.floor(math.log1p(-u) / math.log1p(-p)) + 1


def sample_exactf(p: float, t: int, src: RandomSource) -> int:
    """First success among exactly t Bernoulli(p) trials, or t+1 if all fail.

    CDF is 1 - (1-p)**f for f <= t and 1 at t+1; consumes one word.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"bias {p!r} outside [0,1]")
    if t < 0:
        raise ValueError("trial count must be non-negative")
    u = src.next_word() * _INV64
    if t == 0 or p == 0.0:
        return t + 1
    if p == 1.0:
        return 1
    l1p = math.log1p(-p)
    if 1.0 - math.exp(t * l1p) > u:
        f = math.floor(math.log1p(-u) / l1p) + 1
        return f if f <= t else t
    return t + 1


def sample_binomial(n: int, p: float, src: RandomSource) -> int:
    """Binomial(n, p) by sequential CDF inversion; consumes one word.

    The PMF is accumulated through the log-space recurrence
    pmf(k+1) = pmf(k) * (n-k)/(k+1) * p/(1-p), so the walk stays stable
    for small p and large n.  O(n) worst-case work, acceptable at desk
    scale.
    """
    if n < 0 or n > 2 ** 32:
        raise ValueError("binomial count out of range")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binomial bias {p!r} outside [0,1]")
    u = src.next_word() * _INV64
    if n == 0 or p == 0.0:
        return 0
    if p == 1.0:
        return n
    log_ratio = math.log(p) - math.log1p(-p)
    logpmf = n * math.log1p(-p)
    cdf = 0.0
    for k in range(n):
        cdf += math.exp(logpmf)
        if cdf > u:
            return k
        logpmf += math.log(n - k) - math.log(k + 1) + log_ratio
    return n


def sample_multinomial(n: int, weights: Sequence[float],
                       src: RandomSource) -> tuple[int, ...]:
    """Multinomial counts via sequential conditional binomials.

    Consumes exactly len(weights) - 1 words; the counts sum to n.
    """
    if n < 0:
        raise ValueError("count must be non-negative")
    if not weights:
        raise ValueError("need at least one weight")
    if any(w < 0.0 for w in weights):
        raise ValueError("negative weight")
    total = math.fsum(weights)
    if abs(total - 1.0) > CDF_TOLERANCE:
        raise ValueError(f"weights sum to {total!r}, not 1")
    counts = []
    remaining = n
    mass_left = 1.0
    for w in weights[:-1]:
        pk = 1.0 if mass_left <= 0.0 else min(1.0, max(0.0, w / mass_left))
        x = sample_binomial(remaining, pk, src)
        counts.append(x)
        remaining -= x
        mass_left -= w
    counts.append(remaining)
    return tuple(counts)
