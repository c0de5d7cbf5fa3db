"""Frozen statistical thresholds and trial counts for the test suites.

Every distributional check in the package reads its trial count and
threshold from here so the power budget lives in one place.  The values
are fixed; the noise-floor helpers exist so reports can state how much
of a measured distance is plain sampling noise at the pinned counts.
"""

from __future__ import annotations

import math

# --- distribution equivalence, G(n,p), n=4 exhaustion ---------------------
DIST_TRIALS = 200_000
DIST_L1_MAX = 0.05
DIST_N = 4
DIST_PS = (0.2, 0.5, 0.8)

# --- SBM equivalence, n=6 --------------------------------------------------
SBM_TRIALS = 200_000
SBM_L1_MAX = 0.08
SBM_N = 6
SBM_WEIGHTS = (0.5, 0.5)
SBM_MATRIX = ((0.8, 0.1), (0.1, 0.5))

# --- random-neighbor uniformity --------------------------------------------
UNIFORMITY_QUERIES = 10_000
UNIFORMITY_REPS = 20
UNIFORMITY_MAX_FAILURES = 1
UNIFORMITY_N = 64
UNIFORMITY_P = 0.3
CHI2_MIN_P = 1e-3

# --- iteration bounds -------------------------------------------------------
ITER_NN_N = 1 << 10
ITER_NN_CALLS = 100_000
ITER_NN_MAX = 3 * 10 + 10            # 3*log2(n) + 10 at n = 2**10
FILL_MEAN_ITER_SLACK = 2.0           # mean fill iterations <= L + 2
RN_CAP_FACTOR = 10                   # rejection loop <= 10*log2(n)**2

# --- multivariate hypergeometric exactness ---------------------------------
MVH_TRIALS = 100_000
MVH_L1_MAX = 0.02
MVH_MAX_B = 8
MVH_MAX_R = 3

# --- small world ------------------------------------------------------------
SW_TRIALS = 100_000
SW_SIDE = 8
SW_CS = (0.5, 1.0, 4.0)
SW_SIGMA = 3.0
SW_TELESCOPE_RELTOL = 1e-10
SW_DEGREE_SIDE = 64
SW_DEGREE_RELTOL = 0.02

# --- scaling / memory -------------------------------------------------------
SCALING_NS = (10_000, 100_000, 1_000_000)
SCALING_GROWTH_MAX = 15.0
SCALING_ENTRY_FACTOR = 32

# --- accounting / fuzz / determinism ----------------------------------------
ACCOUNTING_QUERIES = 100_000
FUZZ_RUNS = 10_000
FUZZ_N = 64
FUZZ_P = 0.3

# --- community sampler label-vector equivalence -----------------------------
LABELS_TRIALS = 200_000
LABELS_L1_MAX = 0.03

# --- det generator instrumentation ------------------------------------------
# Calibrated once on fuzz workloads and frozen: BBST node visits per
# count/pick/update call stay below DET_VISIT_FACTOR * log2(n)**2.
DET_VISIT_FACTOR = 8.0


def l1_noise_floor(ref_probs, trials: int, two_sample: bool = False) -> float:
    """Expected L1 distance between a perfect empirical sample and ``ref``.

    Normal approximation: E|phat_i - p_i| ~= sqrt(2 p_i (1-p_i) / (pi N)).
    ``two_sample`` doubles the variance (empirical vs empirical).
    """
    scale = 2.0 if two_sample else 1.0
    return math.fsum(
        math.sqrt(scale * 2.0 * p * (1.0 - p) / (math.pi * trials))
        for p in ref_probs)
