"""Sources of n-bit samples with exactly known distributions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .walsh import Distribution, WalshSpectrum, _check_bits, inverse_fwht

UNIFORM_NOISE = "uniform-noise"
PLANTED_BIAS = "planted-bias"
NOISY_FUNCTION = "noisy-function"
FROM_FILE = "from-file"
KINDS = (UNIFORM_NOISE, PLANTED_BIAS, NOISY_FUNCTION, FROM_FILE)

# float slack when checking that planted biases give a nonnegative pmf
_NEG_TOL = 1e-12


@dataclass(frozen=True)
class SignalSource:
    kind: str
    n: int
    planted: tuple[tuple[int, float], ...] = ()
    truth_table: Optional[Distribution] = None
    noise_mix: float = 0.0
    path: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        object.__setattr__(self, "n", _check_bits(self.n))
        if not 0.0 <= self.noise_mix <= 1.0:
            raise ValueError(f"noise mix lambda={self.noise_mix!r} outside [0, 1]")
        if self.kind in (NOISY_FUNCTION, FROM_FILE):
            if self.truth_table is None:
                raise ValueError(f"{self.kind} source needs a truth table")
            if self.truth_table.n != self.n:
                raise ValueError(f"truth table has n={self.truth_table.n}, source n={self.n}")
        if self.kind == PLANTED_BIAS:
            self._check_planted()

    def _check_planted(self):
        size = 1 << self.n
        seen = set()
        for mask, d in self.planted:
            if not 0 < mask < size:
                raise ValueError(f"planted mask {mask} outside [1, {size})")
            if mask in seen:
                raise ValueError(f"mask {mask} planted twice")
            if abs(d) > 1.0:
                raise ValueError(f"planted bias {d!r} at mask {mask} exceeds 1 in magnitude")
            seen.add(mask)
        # sum |d_m| <= 1 is sufficient; the exact minimum is what decides
        mass = _planted_mass(self.n, self.planted)
        low = float(mass.min())
        if low < -_NEG_TOL:
            raise ValueError(
                f"planted biases are not realizable: pmf would be {low!r} at x={int(mass.argmin())}"
            )

    @property
    def within_safe_envelope(self) -> bool:
        """True when ``sum |d_m| <= 1``, which guarantees realizability."""
        return sum(abs(d) for _, d in self.planted) <= 1.0


def _planted_mass(n: int, planted) -> np.ndarray:
    coeffs = np.zeros(1 << n)
    coeffs[0] = 1.0
    for mask, d in planted:
        coeffs[mask] = d
    return inverse_fwht(WalshSpectrum(n, coeffs)).values


def uniform_noise(n: int) -> SignalSource:
    return SignalSource(UNIFORM_NOISE, n)


def planted_bias(n: int, planted: Sequence[tuple[int, float]]) -> SignalSource:
    """Source whose spectrum is 1 at mask 0, ``d_m`` at each planted mask, 0 elsewhere."""
    return SignalSource(PLANTED_BIAS, n, tuple((int(m), float(d)) for m, d in planted))


def noisy_function(truth_table: Distribution, noise_mix: float) -> SignalSource:
    return SignalSource(NOISY_FUNCTION, truth_table.n, truth_table=truth_table, noise_mix=float(noise_mix))


def from_file(truth_table: Distribution, noise_mix: float = 0.0, path: Optional[str] = None) -> SignalSource:
    return SignalSource(FROM_FILE, truth_table.n, truth_table=truth_table,
                        noise_mix=float(noise_mix), path=path)


def exact_distribution(src: SignalSource) -> Distribution:
    size = 1 << src.n
    if src.kind == UNIFORM_NOISE:
        return Distribution.uniform(src.n)
    if src.kind == PLANTED_BIAS:
        mass = _planted_mass(src.n, src.planted)
        # clip float dust like -1e-17 left by the inverse transform
        return Distribution(src.n, np.clip(mass, 0.0, None))
    lam = src.noise_mix
    mass = (1.0 - lam) * src.truth_table.mass + lam / size
    return Distribution(src.n, mass)


def sample(src: SignalSource, count: int, seed) -> np.ndarray:
    """``count`` i.i.d. draws from the source, by inverse CDF.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts (an int or
    a ``SeedSequence``).
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    cdf = np.cumsum(exact_distribution(src).mass)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    out = np.searchsorted(cdf, u, side="right")
    # u < 1 always, but rounding in the cumsum can leave cdf[-2] == 1
    return np.minimum(out, (1 << src.n) - 1).astype(np.int64)


def parse_source_spec(spec: str, loader=None) -> SignalSource:
    """Parse a CLI source description.

    Accepted forms::

        uniform:n=4
        planted:n=4,m=5:d=0.3,m=9:d=-0.1
        file:path.dist,lambda=0.2

    ``loader`` reads a distribution file for the ``file:`` form.
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "uniform":
        key, _, val = rest.partition("=")
        if key.strip() != "n":
            raise ValueError(f"expected 'uniform:n=<bits>', got {spec!r}")
        return uniform_noise(int(val))
    if kind == "planted":
        n = None
        planted = []
        for item in rest.split(","):
            item = item.strip()
            if item.startswith("n="):
                n = int(item[2:])
            elif item.startswith("m="):
                m_part, _, d_part = item.partition(":")
                if not d_part.startswith("d="):
                    raise ValueError(f"planted term {item!r} must look like m=<mask>:d=<bias>")
                planted.append((int(m_part[2:], 0), float(d_part[2:])))
            elif item:
                raise ValueError(f"unrecognized planted term {item!r}")
        if n is None:
            raise ValueError(f"planted source needs n=<bits>: {spec!r}")
        return planted_bias(n, planted)
    if kind == "file":
        parts = rest.split(",")
        path = parts[0].strip()
        lam = 0.0
        for item in parts[1:]:
            key, _, val = item.partition("=")
            if key.strip() not in ("lambda", "λ"):
                raise ValueError(f"unrecognized file-source option {item!r}")
            lam = float(val)
        if loader is None:
            from .fileio import read_distribution

            loader = read_distribution
        return from_file(loader(path), lam, path=path)
    raise ValueError(f"unknown source kind in {spec!r}; expected uniform, planted or file")
