"""Binary hypothesis tests between biased bit sources.

Two settings are covered:

``symmetric``   H0: bias +d  vs  H1: bias -d
``vs-uniform``  H0: bias d   vs  H1: bias 0

A bit source with bias ``d`` emits 0 with probability ``(1+d)/2``. The
sample sizes ``2 ln 2 / d^2`` and ``8 ln 2 / d^2`` are the reciprocals of
the small-bias capacities of the matching binary channels.

Monte Carlo runs are deterministic in ``seed``: trials are processed in
fixed-size blocks and block ``b`` draws from ``SeedSequence([seed, b])``, so
per-trial outcomes do not depend on how blocks are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

LN2 = math.log(2.0)

SYMMETRIC = "symmetric"
VS_UNIFORM = "vs-uniform"
KINDS = (SYMMETRIC, VS_UNIFORM)

H0, H1 = "H0", "H1"
BIASED, UNIFORM = "biased", "uniform"

MAX_BIAS = 0.2
MIN_TRIALS = 1000
BLOCK = 8192


@dataclass(frozen=True)
class HypothesisPair:
    kind: str
    d: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown hypothesis kind {self.kind!r}; expected one of {KINDS}")
        d = float(self.d)
        if not 0.0 < abs(d) <= MAX_BIAS:
            raise ValueError(f"|d| must lie in (0, {MAX_BIAS}], got {d!r}")
        object.__setattr__(self, "d", d)

    def one_probabilities(self) -> tuple[float, float]:
        """Pr(bit = 1) under H0 and under H1."""
        d = self.d
        if self.kind == SYMMETRIC:
            return (1.0 - d) / 2.0, (1.0 + d) / 2.0
        return (1.0 - d) / 2.0, 0.5


@dataclass(frozen=True)
class TrialReport:
    trials: int
    errors_h0: int
    errors_h1: int
    error_rate: float
    ci95_halfwidth: float
    N: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _required(constant: float, d: float) -> int:
    d = float(d)
    if d == 0.0:
        raise ValueError("d = 0: the hypotheses coincide and no finite N suffices")
    if abs(d) > MAX_BIAS:
        raise ValueError(f"|d| must be <= {MAX_BIAS}, got {d!r}")
    return math.ceil(constant * LN2 / (d * d))


def required_samples_symmetric(d: float) -> int:
    """ceil(2 ln 2 / d^2)."""
    return _required(2.0, d)


def required_samples_vs_uniform(d: float) -> int:
    """ceil(8 ln 2 / d^2)."""
    return _required(8.0, d)


def required_samples(pair: HypothesisPair) -> int:
    if pair.kind == SYMMETRIC:
        return required_samples_symmetric(pair.d)
    return required_samples_vs_uniform(pair.d)


def _symmetric_says_h0(ones, N):
    return np.asarray(ones) * 2 <= N


def _llr_says_biased(ones, N, d: float):
    ones = np.asarray(ones, dtype=np.float64)
    if d < 0:
        # mirror: a negative bias favours ones
        ones, d = N - ones, -d
    llr = ones * math.log1p(-d) + (N - ones) * math.log1p(d)
    return llr >= 0.0


def decide_symmetric(ones_count: int, N: int) -> str:
    """Majority vote between bias +d (H0) and -d (H1); ties go to H0."""
    if not 0 <= ones_count <= N:
        raise ValueError(f"ones_count={ones_count} outside [0, N={N}]")
    return H0 if _symmetric_says_h0(ones_count, N) else H1


def decide_vs_uniform(ones_count: int, N: int, d: float) -> str:
    """Likelihood-ratio test of bias ``d`` against a fair coin.

    Decides "biased" iff ``ones*ln(1-d) + zeros*ln(1+d) >= 0`` (for d > 0;
    mirrored for d < 0).
    """
    d = float(d)
    if abs(d) >= 1.0:
        raise ValueError(f"|d| must be < 1, got {d!r}")
    if not 0 <= ones_count <= N:
        raise ValueError(f"ones_count={ones_count} outside [0, N={N}]")
    return BIASED if bool(_llr_says_biased(ones_count, N, d)) else UNIFORM


def vs_uniform_threshold(N: int, d: float) -> float:
    """Ones count at which the log-likelihood ratio vanishes (d > 0)."""
    d = abs(float(d))
    return N * math.log1p(d) / (math.log1p(d) - math.log1p(-d))


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def theoretical_error_gaussian(pair: HypothesisPair, N: int) -> float:
    """Normal approximation to the balanced error of the optimal test.

    ``Phi(-sqrt(N) |d|)`` for the symmetric pair and
    ``Phi(-sqrt(N) |d| / 2)`` against uniform, treating the test as a
    midpoint threshold on the empirical bias.
    """
    scale = 1.0 if pair.kind == SYMMETRIC else 0.5
    return _normal_cdf(-math.sqrt(N) * abs(pair.d) * scale)


def _block_errors(pair: HypothesisPair, N: int, seed: int, block: int, size: int) -> tuple[int, int]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
    p_h0, p_h1 = pair.one_probabilities()
    # the ones count is sufficient for both tests, so draw it directly
    ones = rng.binomial(N, [p_h0, p_h1], size=(size, 2))
    if pair.kind == SYMMETRIC:
        says_h0 = _symmetric_says_h0(ones if pair.d > 0 else N - ones, N)
    else:
        says_h0 = _llr_says_biased(ones, N, pair.d)
    return int(np.count_nonzero(~says_h0[:, 0])), int(np.count_nonzero(says_h0[:, 1]))


def monte_carlo_error(
    pair: HypothesisPair, N: int, trials: int, seed: int, workers: int = 1
) -> TrialReport:
    """Empirical balanced error rate of the optimal test at ``N`` samples.

    Each trial draws ``N`` bits under H0 and another ``N`` under H1 and
    applies :func:`decide_symmetric` or :func:`decide_vs_uniform` to both, so
    the two hypotheses carry exactly equal weight. ``errors_h0`` counts
    rejections of a true H0, ``errors_h1`` acceptances of H0 under H1.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    sizes = [min(BLOCK, trials - start) for start in range(0, trials, BLOCK)]
    jobs = [(pair, N, seed, b, size) for b, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda job: _block_errors(*job), jobs))
    else:
        counts = [_block_errors(*job) for job in jobs]
    e0 = sum(c[0] for c in counts)
    e1 = sum(c[1] for c in counts)
    rate = (e0 + e1) / (2 * trials)
    half = 1.96 * math.sqrt(rate * (1.0 - rate) / (2 * trials))
    return TrialReport(trials, e0, e1, rate, half, N, seed)


def error_curve(
    pair: HypothesisPair,
    sample_sizes: Iterable[int],
    trials: int,
    seed: int,
    workers: int = 1,
) -> list[dict]:
    """Measured and approximate error rate for each N in ``sample_sizes``."""
    rows = []
    for N in sample_sizes:
        rep = monte_carlo_error(pair, int(N), trials, seed, workers)
        rows.append(
            {
                "N": rep.N,
                "error_rate": rep.error_rate,
                "ci95": rep.ci95_halfwidth,
                "theory": theoretical_error_gaussian(pair, rep.N),
                "errors_h0": rep.errors_h0,
                "errors_h1": rep.errors_h1,
            }
        )
    return rows


def scaled_sizes(base: int, multipliers: Sequence[float]) -> list[int]:
    return [max(1, int(round(base * k))) for k in multipliers]
