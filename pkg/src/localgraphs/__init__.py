"""Local-access generators for huge random graphs.

The package answers vertex-pair, next-neighbor, random-neighbor and
all-neighbors queries on a partially materialized random graph,
consistently with a single sample from the target distribution, doing
polylogarithmic work per query.  Supported models: Erdos-Renyi G(n,p),
the stochastic block model with lazily sampled communities, and the
Kleinberg small-world grid.  A brute-force oracle harness verifies the
output distributions at small scale.
"""

from .rng import (
    RandomSource,
    DiscreteCdf,
    MalformedCdfError,
    sample_cdf_inverse,
    sample_bernoulli,
    sample_geometric,
    sample_exactf,
    sample_binomial,
    sample_multinomial,
)
from .models import GnpModel, SbmModel, load_sbm_file
from .communities import (
    CommunityTree,
    sample_two_color_half,
    sample_two_color,
    sample_mvh,
)
from .skipgen import SkipGenerator
from .bucketgen import BucketGenerator
from .detgen import DetGenerator
from .smallworld import SmallWorldGenerator, GridVertex
from .oracle import (
    RealizedGraph,
    Histogram,
    naive_generate,
    mvh_exact_pmf,
    l1_distance,
    chi_square_p,
    fuzz_interleavings,
)

SENTINEL_OFFSET = 1  # next-neighbor exhaustion sentinel is n + 1

__all__ = [
    "RandomSource", "DiscreteCdf", "MalformedCdfError",
    "sample_cdf_inverse", "sample_bernoulli", "sample_geometric",
    "sample_exactf", "sample_binomial", "sample_multinomial",
    "GnpModel", "SbmModel", "load_sbm_file",
    "CommunityTree", "sample_two_color_half", "sample_two_color", "sample_mvh",
    "SkipGenerator", "BucketGenerator", "DetGenerator",
    "SmallWorldGenerator", "GridVertex",
    "RealizedGraph", "Histogram", "naive_generate", "mvh_exact_pmf",
    "l1_distance", "chi_square_p", "fuzz_interleavings",
]
