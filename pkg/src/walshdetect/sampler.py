"""Signal-versus-noise decisions from a bounded number of samples.

A source over n-bit values is declared a real signal when the squared
Euclidean imbalance (SEI) of its Walsh spectrum,
``sum_{i != 0} f^(i)^2``, reaches ``8 n ln 2 / N``. Equivalently
``||f^||_2^2 >= 1 + 8 n ln 2 / N``. For n = 1 this is a bias of at least
``sqrt(8 ln 2) / sqrt(N)``.

When applied to an *empirical* spectrum built from N uniform samples the SEI
is not zero: ``N * SEI`` is approximately chi-square with ``2^n - 1`` degrees
of freedom, so its mean is ``(2^n - 1) / N``. Reports carry this noise floor
next to the raw value. The verdict is always taken on the raw SEI.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import distinguisher as dist_mod
from .sources import SignalSource, sample
from .walsh import (
    WalshSpectrum,
    empirical_distribution,
    fwht,
    l2_norm_sq,
    parity,
    sei,
    top_coefficients,
)

LN2 = math.log(2.0)
C_GENERIC = math.sqrt(8.0 * LN2)

CLASSICAL = "classical"
GENERIC_N1 = "generic-n1"
GENERIC_GENERAL = "generic-general"
MODES = (CLASSICAL, GENERIC_N1, GENERIC_GENERAL)

SIGNAL, NOISE = "signal", "noise"
REPORT_TOP_K = 8


def generic_threshold_n1(N: int) -> float:
    """Smallest detectable |bias| of a one-bit source with N samples."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return C_GENERIC / math.sqrt(N)


def generic_threshold(n: int, N: int) -> float:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return 8.0 * n * LN2 / N


def classic_threshold(n: int, N: int) -> float:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return 4.0 * n * LN2 / N


def generic_condition(spectrum: WalshSpectrum, N: int) -> tuple[bool, float, float]:
    """Return ``(SEI >= 8 n ln 2 / N, SEI, threshold)``."""
    value = sei(spectrum)
    threshold = generic_threshold(spectrum.n, N)
    return value >= threshold, value, threshold


def l2_condition(spectrum: WalshSpectrum, N: int) -> bool:
    return l2_norm_sq(spectrum) >= 1.0 + generic_threshold(spectrum.n, N)


def classic_sei_condition(spectrum: WalshSpectrum, N: int) -> bool:
    return sei(spectrum) >= classic_threshold(spectrum.n, N)


@dataclass(frozen=True)
class DetectionConfig:
    n: int
    N: int
    mode: str = GENERIC_GENERAL
    known_mask: Optional[int] = None
    known_d: Optional[float] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.N < 1:
            raise ValueError(f"sample budget N must be >= 1, got {self.N}")
        if self.mode == CLASSICAL:
            if not self.known_mask or not self.known_d:
                raise ValueError("classical mode needs a nonzero known_mask and known_d")
            if not 0 < self.known_mask < (1 << self.n):
                raise ValueError(f"known_mask {self.known_mask} outside [1, 2^{self.n})")
        if self.mode == GENERIC_N1 and self.n != 1:
            raise ValueError(f"generic-n1 mode requires n = 1, got n={self.n}")


@dataclass
class DetectionReport:
    verdict: str
    mode: str
    n: int
    N_used: int
    sei_value: float
    sei_corrected: float
    noise_floor: float
    l2_sq: float
    threshold_generic: float
    threshold_classic: float
    generic_condition: bool
    l2_condition: bool
    classic_condition: bool
    top: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["top"] = [{"mask": m, "coeff": c} for m, c in self.top]
        return out


def _report(spectrum: WalshSpectrum, N: int, mode: str, verdict: Optional[str] = None,
            top=None) -> DetectionReport:
    ok, value, threshold = generic_condition(spectrum, N)
    floor = ((1 << spectrum.n) - 1) / N
    if verdict is None:
        verdict = SIGNAL if ok else NOISE
    return DetectionReport(
        verdict=verdict,
        mode=mode,
        n=spectrum.n,
        N_used=N,
        sei_value=value,
        sei_corrected=max(value - floor, 0.0),
        noise_floor=floor,
        l2_sq=l2_norm_sq(spectrum),
        threshold_generic=threshold,
        threshold_classic=classic_threshold(spectrum.n, N),
        generic_condition=ok,
        l2_condition=l2_condition(spectrum, N),
        classic_condition=classic_sei_condition(spectrum, N),
        top=top if top is not None else top_coefficients(spectrum, REPORT_TOP_K),
    )


def classical_minimum_samples(d: float) -> int:
    d = float(d)
    if d == 0.0:
        raise ValueError("known bias must be nonzero")
    return math.ceil(8.0 * LN2 / (d * d))


def classical_detect(samples: Sequence[int], cfg: DetectionConfig) -> DetectionReport:
    """Test for a known bias ``known_d`` at the known mask ``known_mask``.

    The samples are reduced to the parity bits ``<known_mask, x>`` and the
    one-bit likelihood-ratio test against a fair coin decides. The report
    describes that projected one-bit source, so its thresholds use n = 1.
    """
    if cfg.mode != CLASSICAL:
        raise ValueError(f"classical_detect needs mode={CLASSICAL!r}, got {cfg.mode!r}")
    needed = classical_minimum_samples(cfg.known_d)
    arr = np.asarray(samples, dtype=np.int64)
    if arr.size < needed:
        raise ValueError(
            f"{arr.size} samples is below the minimum {needed} = ceil(8 ln 2 / d^2) for d={cfg.known_d}"
        )
    size = 1 << cfg.n
    if np.any((arr < 0) | (arr >= size)):
        bad = int(np.flatnonzero((arr < 0) | (arr >= size))[0])
        raise ValueError(f"sample {int(arr[bad])} at index {bad} outside [0, {size})")
    N = int(arr.size)
    ones = int(parity(arr.astype(np.uint64) & np.uint64(cfg.known_mask)).sum())
    verdict = dist_mod.decide_vs_uniform(ones, N, cfg.known_d)
    projected = WalshSpectrum(1, [1.0, (N - 2 * ones) / N], from_distribution=True)
    return _report(
        projected,
        N,
        CLASSICAL,
        verdict=SIGNAL if verdict == dist_mod.BIASED else NOISE,
        top=[(int(cfg.known_mask), float(projected.coeffs[1]))],
    )


def empirical_spectrum(samples, n: int) -> WalshSpectrum:
    return fwht(empirical_distribution(samples, n))


def detect(samples: Sequence[int], cfg: DetectionConfig, n: Optional[int] = None) -> DetectionReport:
    """Generic decision: is there a real signal behind these samples?

    ``n`` may be passed to assert the bit-width the samples were recorded
    with (e.g. from a file header); it must agree with ``cfg.n``.
    """
    if cfg.mode not in (GENERIC_N1, GENERIC_GENERAL):
        raise ValueError(f"detect needs a generic mode, got {cfg.mode!r}")
    if n is not None and n != cfg.n:
        raise ValueError(f"samples are {n}-bit but the configuration says n={cfg.n}")
    arr = np.asarray(samples)
    if arr.size == 0:
        raise ValueError("empty sample set")
    if arr.size > cfg.N:
        raise ValueError(f"{arr.size} samples exceed the budget N={cfg.N}")
    spectrum = empirical_spectrum(arr, cfg.n)
    return _report(spectrum, int(arr.size), cfg.mode)


def detection_error(d: float, N: int, trials: int, seed: int, workers: int = 1) -> dist_mod.TrialReport:
    """Balanced error of the optimal one-bit test for bias ``d`` vs noise."""
    pair = dist_mod.HypothesisPair(dist_mod.VS_UNIFORM, d)
    return dist_mod.monte_carlo_error(pair, N, trials, seed, workers)


@dataclass(frozen=True)
class MaskStat:
    mask: int
    recurrence: int
    frequency: float
    top1: int
    mean_coeff: float
    std_coeff: float


@dataclass(frozen=True)
class RepeatReport:
    runs: int
    N: int
    k: int
    seed: int
    masks: tuple[MaskStat, ...]

    def top1_counts(self) -> dict[int, int]:
        return {s.mask: s.top1 for s in self.masks if s.top1}

    def max_top1(self) -> int:
        return max((s.top1 for s in self.masks), default=0)


def _one_run(src: SignalSource, N: int, k: int, seed: int, run: int):
    draws = sample(src, N, np.random.SeedSequence([seed, run]))
    spectrum = empirical_spectrum(draws, src.n)
    return [m for m, _ in top_coefficients(spectrum, k)], spectrum.coeffs


def repeat_experiment(
    src: SignalSource, N: int, runs: int, k: int, seed: int, workers: int = 1
) -> RepeatReport:
    """Draw ``runs`` independent sample sets and track which masks keep
    showing up among the ``k`` largest empirical coefficients.

    Run ``r`` samples from ``SeedSequence([seed, r])``.
    """
    if runs < 1 or k < 1 or N < 1:
        raise ValueError("runs, k and N must all be >= 1")
    seed = int(seed)
    args = [(src, N, k, seed, r) for r in range(runs)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _one_run(*a), args))
    else:
        results = [_one_run(*a) for a in args]

    coeffs = np.stack([c for _, c in results])
    recurrence: dict[int, int] = {}
    top1: dict[int, int] = {}
    for masks, _ in results:
        for m in masks:
            recurrence[m] = recurrence.get(m, 0) + 1
        top1[masks[0]] = top1.get(masks[0], 0) + 1
    stats = []
    for m in sorted(recurrence, key=lambda m: (-recurrence[m], m)):
        col = coeffs[:, m]
        stats.append(
            MaskStat(
                mask=m,
                recurrence=recurrence[m],
                frequency=recurrence[m] / runs,
                top1=top1.get(m, 0),
                mean_coeff=float(col.mean()),
                std_coeff=float(col.std(ddof=1)) if runs > 1 else 0.0,
            )
        )
    return RepeatReport(runs, N, k, seed, tuple(stats))
