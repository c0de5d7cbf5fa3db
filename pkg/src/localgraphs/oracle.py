"""Ground-truth machinery for verifying the fast generators.

``naive_generate`` realizes a whole graph with one Bernoulli draw per
unordered pair (self-loops included) and is the distributional reference
for every other generator.  ``NaiveGenerator`` is the same process
wrapped as a stateful query interface (explicit adjacency map), used by
the interleaving fuzzer as the simplest local-access implementation.

Also here: the exact multivariate hypergeometric PMF, L1/chi-square
statistics, and the adversarial interleaving fuzzer that cross-checks
every generator's transcript against the graph it finally realized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .rng import RandomSource, _INV64
from .models import EdgeProbabilityModel, GnpModel, SbmModel

NAIVE_MAX_N = 1 << 10


@dataclass(frozen=True)
class RealizedGraph:
    """A fully materialized sample: canonical (min,max) edge pairs."""

    n: int
    edges: frozenset
    labels: tuple | None = None

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges if u <= v else (v, u) in self.edges

    def neighbors(self, v: int) -> list[int]:
        out = [u for u in range(1, self.n + 1) if self.has_edge(v, u)]
        return out

    def edge_count(self) -> int:
        return len(self.edges)


class Histogram:
    """Outcome -> count map with a running total."""

    __slots__ = ("counts", "total")

    def __init__(self):
        self.counts: dict = {}
        self.total = 0

    def add(self, outcome, k: int = 1) -> None:
        self.counts[outcome] = self.counts.get(outcome, 0) + k
        self.total += k

    def merge(self, other: "Histogram") -> None:
        for key, k in other.counts.items():
            self.counts[key] = self.counts.get(key, 0) + k
        self.total += other.total

    def freq(self, outcome) -> float:
        return self.counts.get(outcome, 0) / self.total

    def to_prob_map(self) -> dict:
        t = self.total
        return {k: c / t for k, c in self.counts.items()}


def _sample_label(weights, src: RandomSource) -> int:
    """One i.i.d. label from the weight vector (1-based); one word."""
    u = src.next_word() * _INV64
    acc = 0.0
    for j, w in enumerate(weights):
        acc += w
        if acc > u:
            return j + 1
    return len(weights)


def naive_generate(model: EdgeProbabilityModel, src: RandomSource) -> RealizedGraph:
    """Algorithm-1 semantics in one shot: flip every pair independently.

    For the SBM the labels are sampled i.i.d. directly from the weight
    vector, bypassing the community tree, so this stays an independent
    reference for the lazy samplers.
    """
    n = model.n
    if n > NAIVE_MAX_N:
        raise ValueError(f"naive generation capped at n={NAIVE_MAX_N}")
    labels = None
    if isinstance(model, SbmModel):
        weights = model.community_source.weights
        labels = tuple(_sample_label(weights, src) for _ in range(n))
        mat = model.prob_matrix

        def prob(u, v):
            return mat[labels[u - 1] - 1][labels[v - 1] - 1]
    else:
        p_const = model.p if isinstance(model, GnpModel) else None

        def prob(u, v):
            return p_const if p_const is not None else model.edge_prob(u, v)

    edges = set()
    for u in range(1, n + 1):
        for v in range(u, n + 1):
            if src.next_word() * _INV64 < prob(u, v):
                edges.add((u, v))
    return RealizedGraph(n, frozenset(edges), labels)


class NaiveGenerator:
    """Algorithm-1 as a stateful local-access generator (explicit matrix).

    Supports next-neighbor, random-neighbor, vertex-pair and
    all-neighbors; reference implementation for the fuzzer.
    """

    supports = ("NN", "RN", "VP", "AN")

    def __init__(self, model: EdgeProbabilityModel, rng: RandomSource):
        if model.n > NAIVE_MAX_N:
            raise ValueError(f"naive generator capped at n={NAIVE_MAX_N}")
        self.model = model
        self.n = model.n
        self.rng = rng
        self._adj: dict[tuple[int, int], int] = {}
        self._last: dict[int, int] = {}

    def vertex_pair(self, u: int, v: int) -> int:
        key = (u, v) if u <= v else (v, u)
        bit = self._adj.get(key)
        if bit is None:
            p = self.model.edge_prob(u, v)
            bit = 1 if self.rng.next_word() * _INV64 < p else 0
            self._adj[key] = bit
        return bit

    def next_neighbor(self, v: int) -> int:
        last = self._last.get(v, 0)
        for u in range(last + 1, self.n + 1):
            if self.vertex_pair(v, u):
                self._last[v] = u
                return u
        self._last[v] = self.n + 1
        return self.n + 1

    def random_neighbor(self, v: int):
        pool = list(range(1, self.n + 1))
        while pool:
            i = int(self.rng.next_word() * _INV64 * len(pool))
            u = pool[i]
            if self.vertex_pair(v, u):
                return u
            pool[i] = pool[-1]
            pool.pop()
        return None

    def all_neighbors(self, v: int) -> list[int]:
        return [u for u in range(1, self.n + 1) if self.vertex_pair(v, u)]

    def audit(self) -> None:
        for (u, v) in self._adj:
            if not (1 <= u <= v <= self.n):
                raise AssertionError("adjacency key outside vertex range")


def mvh_exact_pmf(counts, ell: int) -> dict[tuple[int, ...], float]:
    """Exact multivariate hypergeometric PMF over its whole support.

    P[s] = prod_k C(counts_k, s_k) / C(B, ell); exact integer
    combinatorics, converted to float at the end.  Requires B <= 64.
    """
    counts = tuple(int(c) for c in counts)
    B = sum(counts)
    if B > 64:
        raise ValueError("exact PMF capped at urn size 64")
    if not 0 <= ell <= B:
        raise ValueError(f"cannot draw {ell} from {B} marbles")
    denom = math.comb(B, ell)
    out: dict[tuple[int, ...], float] = {}

    def rec(idx: int, left: int, prefix: tuple[int, ...], ways: int):
        if idx == len(counts) - 1:
            if left <= counts[idx]:
                out[prefix + (left,)] = ways * math.comb(counts[idx], left) / denom
            return
        tail = sum(counts[idx + 1:])
        for s in range(max(0, left - tail), min(counts[idx], left) + 1):
            rec(idx + 1, left - s, prefix + (s,), ways * math.comb(counts[idx], s))

    rec(0, ell, (), 1)
    return out


def l1_distance(hist: Histogram, ref: dict) -> float:
    """Sum of |empirical - reference| over outcomes; outcomes absent from
    the reference contribute their full empirical mass."""
    total = hist.total
    if total <= 0:
        raise ValueError("empty histogram")
    acc = 0.0
    for key, p in ref.items():
        acc += abs(hist.counts.get(key, 0) / total - p)
    for key, c in hist.counts.items():
        if key not in ref:
            acc += c / total
    return acc


def chi_square_p(hist: Histogram, ref: dict) -> float:
    """Goodness-of-fit p-value of the histogram against the reference.

    Outcomes observed outside the reference support make the fit
    impossible (p = 0).  Expected counts should be reasonably large.
    """
    from scipy import stats

    if any(key not in ref for key in hist.counts):
        return 0.0
    keys = list(ref)
    observed = [hist.counts.get(k, 0) for k in keys]
    expected = [ref[k] * hist.total for k in keys]
    res = stats.chisquare(observed, expected)
    return float(res.pvalue)


# --------------------------------------------------------------------------
# interleaving fuzzer
# --------------------------------------------------------------------------

@dataclass
class FuzzViolation:
    generator: str
    trial: int
    stream_salt: int
    message: str
    minimized_prefix: int


@dataclass
class FuzzReport:
    trials: int
    query_budget: int
    queries_run: int = 0
    violations: list[FuzzViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def render(self) -> str:
        lines = [
            "report: fuzz_interleavings",
            f"trials: {self.trials}",
            f"query_budget: {self.query_budget}",
            f"queries_run: {self.queries_run}",
            f"violations: {len(self.violations)}",
        ]
        for v in self.violations:
            lines.append(
                f"violation: generator={v.generator} trial={v.trial} "
                f"salt={v.stream_salt} prefix={v.minimized_prefix} msg={v.message}")
        lines.append(f"status: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def _make_generator(name: str, model_factory, rng: RandomSource):
    from .skipgen import SkipGenerator
    from .bucketgen import BucketGenerator
    from .detgen import DetGenerator

    model = model_factory(rng.derive(101))
    gen_rng = rng.derive(202)
    if name == "naive":
        return NaiveGenerator(model, gen_rng)
    if name == "skip":
        return SkipGenerator(model, gen_rng)
    if name == "bucket":
        return BucketGenerator(model, gen_rng)
    if name == "det":
        return DetGenerator(model, gen_rng)
    raise ValueError(f"unknown generator {name!r}")


def _run_one_interleaving(name: str, model_factory, queries) -> None:
    """Execute a query list, then exhaust the graph and cross-check the
    transcript.  Raises AssertionError on any inconsistency."""
    gen = queries.gen
    n = gen.n
    transcript = []  # (op, args, answer)
    nn_prev: dict[int, int] = {}
    for op, args in queries.ops:
        if op == "NN":
            (v,) = args
            ans = gen.next_neighbor(v)
            prev = nn_prev.get(v, 0)
            if not (prev < ans or (prev == n + 1 and ans == n + 1)):
                raise AssertionError(
                    f"NN({v}) not monotone: {prev} then {ans}")
            nn_prev[v] = ans
        elif op == "VP":
            (u, v) = args
            ans = gen.vertex_pair(u, v)
            mirror = gen.vertex_pair(v, u)
            if ans != mirror:
                raise AssertionError(f"VP({u},{v})={ans} but VP({v},{u})={mirror}")
        elif op == "RN":
            (v,) = args
            ans = gen.random_neighbor(v)
        elif op == "AN":
            (v,) = args
            ans = gen.all_neighbors(v)
            if ans != sorted(ans):
                raise AssertionError(f"AN({v}) not sorted: {ans}")
        else:  # pragma: no cover
            raise ValueError(op)
        transcript.append((op, args, ans))
        if hasattr(gen, "audit"):
            gen.audit()

    # realize the rest of the graph through next-neighbor exhaustion
    edges = set()
    for v in range(1, n + 1):
        while True:
            u = gen.next_neighbor(v)
            if u == n + 1:
                break
            edges.add((min(u, v), max(u, v)))
    graph = RealizedGraph(n, frozenset(edges))

    for op, args, ans in transcript:
        if op == "NN":
            (v,) = args
            if ans != n + 1 and not graph.has_edge(v, ans):
                raise AssertionError(f"NN({v})={ans} is not an edge")
        elif op == "VP":
            (u, v) = args
            if bool(ans) != graph.has_edge(u, v):
                raise AssertionError(f"VP({u},{v})={ans} vs realized "
                                     f"{graph.has_edge(u, v)}")
        elif op == "RN":
            (v,) = args
            if ans is None:
                if graph.neighbors(v):
                    raise AssertionError(f"RN({v})=NONE but neighbors exist")
            elif not graph.has_edge(v, ans):
                raise AssertionError(f"RN({v})={ans} is not an edge")
        elif op == "AN":
            (v,) = args
            if ans != graph.neighbors(v):
                raise AssertionError(f"AN({v})={ans} vs realized "
                                     f"{graph.neighbors(v)}")
    # NN answers per vertex must enumerate realized neighbors in order
    for v in range(1, n + 1):
        reported = [a for op, args, a in transcript
                    if op == "NN" and args == (v,) and a != n + 1]
        expected = graph.neighbors(v)[:len(reported)]
        if reported != expected:
            raise AssertionError(
                f"NN({v}) sequence {reported} != realized prefix {expected}")


class _QueryPlan:
    """A deterministic query list plus the generator it drives."""

    def __init__(self, name, model_factory, trial_salt, base: RandomSource,
                 budget: int):
        self.name = name
        self.trial_salt = trial_salt
        src = base.derive(trial_salt)
        self.gen = _make_generator(name, model_factory, src)
        plan_rng = src.derive(303)
        n = self.gen.n
        ops = []
        supported = self.gen.supports
        for _ in range(budget):
            op = supported[int(plan_rng.uniform() * len(supported))]
            if op == "VP":
                args = (1 + int(plan_rng.uniform() * n),
                        1 + int(plan_rng.uniform() * n))
            else:
                args = (1 + int(plan_rng.uniform() * n),)
            ops.append((op, args))
        self.ops = ops


def fuzz_interleavings(model_factory, generators, q: int, trials: int,
                       src: RandomSource, max_n: int = 1 << 8) -> FuzzReport:
    """Random interleavings of supported queries against each generator,
    with invariant checks per query and a final consistency cross-check
    of the whole transcript against the realized graph.

    ``model_factory(src) -> model`` builds a fresh model per trial (SBM
    trees are stateful).  Violations carry the trial salt and a
    minimized failing query-prefix length for reproduction.
    """
    report = FuzzReport(trials=trials, query_budget=q)
    probe = model_factory(src.derive(0))
    if probe.n > max_n:
        raise ValueError(f"fuzzing capped at n={max_n}")
    for t in range(trials):
        name = generators[t % len(generators)]
        plan = _QueryPlan(name, model_factory, t + 1, src, q)
        try:
            _run_one_interleaving(name, model_factory, plan)
            report.queries_run += len(plan.ops)
        except AssertionError as exc:
            minimized = len(plan.ops)
            for prefix in range(len(plan.ops) + 1):
                short = _QueryPlan(name, model_factory, t + 1, src, q)
                short.ops = short.ops[:prefix]
                try:
                    _run_one_interleaving(name, model_factory, short)
                except AssertionError:
                    minimized = prefix
                    break
            report.violations.append(FuzzViolation(
                generator=name, trial=t, stream_salt=t + 1,
                message=str(exc), minimized_prefix=minimized))
    return report
