"""Walsh-Hadamard transforms over arrays indexed by n-bit vectors.

Conventions used throughout the package:

* The transform is unnormalized, ``W[i] = sum_j (-1)^<i,j> x[j]``, so the
  spectrum of a probability mass function is literally a vector of biases
  (``W[0] == 1`` and ``W[m] = Pr(<m,X> = 0) - Pr(<m,X> = 1)``).
* ``<i,j>`` is ``parity(i & j)`` on the integer encodings; bit ``k`` of a mask
  selects bit ``k`` of the sample.
* The inverse carries the full ``1/2^n`` factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

MAX_FWHT_BITS = 26
MAX_NAIVE_BITS = 16
PMF_TOL = 1e-9


def _check_bits(n: int, limit: int = MAX_FWHT_BITS) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"bit-width must be an integer, got {n!r}")
    n = int(n)
    if not 1 <= n <= limit:
        raise ValueError(f"bit-width n={n} outside [1, {limit}]")
    return n


def _as_vector(values, n: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if arr.size != 1 << n:
        raise ValueError(f"{what} needs 2^{n} = {1 << n} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def bits_for_length(length: int) -> int:
    """Return n such that ``length == 2**n``; raise otherwise."""
    if length < 2 or length & (length - 1):
        raise ValueError(f"length {length} is not a power of two >= 2")
    return length.bit_length() - 1


@dataclass(frozen=True)
class RealSignal:
    """Time-domain array of 2^n reals."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        n = _check_bits(self.n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", _as_vector(self.values, n, "signal"))

    @classmethod
    def from_values(cls, values) -> "RealSignal":
        arr = np.asarray(values, dtype=np.float64).reshape(-1)
        return cls(bits_for_length(arr.size), arr)


@dataclass(frozen=True)
class Distribution:
    """Probability mass function over the 2^n values of an n-bit variable."""

    n: int
    mass: np.ndarray

    def __post_init__(self):
        n = _check_bits(self.n)
        mass = _as_vector(self.mass, n, "distribution")
        if np.any(mass < 0):
            bad = int(np.argmax(mass < 0))
            raise ValueError(f"negative probability mass {mass[bad]!r} at index {bad}")
        total = float(mass.sum())
        if abs(total - 1.0) > PMF_TOL:
            raise ValueError(f"probability mass sums to {total!r}, not 1")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_values(cls, values) -> "Distribution":
        arr = np.asarray(values, dtype=np.float64).reshape(-1)
        return cls(bits_for_length(arr.size), arr)

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls(n, np.full(1 << n, 1.0 / (1 << n)))


@dataclass(frozen=True)
class WalshSpectrum:
    """Walsh coefficients ``coeffs[mask]``.

    ``from_distribution`` records whether the spectrum was computed from a
    pmf, in which case ``coeffs[0] == 1`` and every ``|coeffs[i]| <= 1``.
    """

    n: int
    coeffs: np.ndarray
    from_distribution: bool = False

    def __post_init__(self):
        n = _check_bits(self.n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", _as_vector(self.coeffs, n, "spectrum"))

    @classmethod
    def from_values(cls, values, from_distribution: bool = False) -> "WalshSpectrum":
        arr = np.asarray(values, dtype=np.float64).reshape(-1)
        return cls(bits_for_length(arr.size), arr, from_distribution)

    def __len__(self) -> int:
        return self.coeffs.size


SignalLike = Union[RealSignal, Distribution, Sequence[float], np.ndarray]


def _unpack(signal: SignalLike) -> tuple[int, np.ndarray, bool]:
    if isinstance(signal, Distribution):
        return signal.n, signal.mass, True
    if isinstance(signal, RealSignal):
        return signal.n, signal.values, False
    sig = RealSignal.from_values(signal)
    return sig.n, sig.values, False


def _parity_table(n: int) -> np.ndarray:
    table = np.zeros(1 << n, dtype=np.uint8)
    for b in range(n):
        half = 1 << b
        table[half : 2 * half] = table[:half] ^ 1
    return table


def parity(x):
    """Parity of the set bits of ``x`` (int or integer array)."""
    if isinstance(x, (int, np.integer)):
        return bin(int(x)).count("1") & 1
    x = np.asarray(x, dtype=np.uint64).copy()
    out = np.zeros(x.shape, dtype=np.uint64)
    while np.any(x):
        out ^= x & np.uint64(1)
        x >>= np.uint64(1)
    return out.astype(np.int64)


@lru_cache(maxsize=4)
def _sign_matrix(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    par = _parity_table(n)[np.bitwise_and.outer(idx, idx)]
    signs = 1.0 - 2.0 * par
    signs.setflags(write=False)
    return signs


def naive_wht(signal: SignalLike) -> WalshSpectrum:
    """Direct evaluation of ``sum_j (-1)^<i,j> x[j]`` for every mask ``i``.

    O(4^n) work; kept as an independent reference for :func:`fwht` and
    restricted to small n.
    """
    n, x, is_pmf = _unpack(signal)
    if n > MAX_NAIVE_BITS:
        raise ValueError(f"naive_wht is limited to n <= {MAX_NAIVE_BITS}, got n={n}")
    if n <= 12:
        return WalshSpectrum(n, _sign_matrix(n) @ x, is_pmf)
    size = 1 << n
    table = _parity_table(n)
    j = np.arange(size)
    out = np.empty(size)
    for i in range(size):
        out[i] = np.dot(1.0 - 2.0 * table[j & i], x)
    return WalshSpectrum(n, out, is_pmf)


def _butterflies(x: np.ndarray) -> np.ndarray:
    # stage h combines indices differing only in bit log2(h)
    a = np.array(x, dtype=np.float64, copy=True)
    size = a.size
    h = 1
    while h < size:
        view = a.reshape(-1, 2, h)
        lo = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        np.subtract(lo, view[:, 1, :], out=view[:, 1, :])
        h <<= 1
    return a


def fwht(signal: SignalLike) -> WalshSpectrum:
    """Fast Walsh-Hadamard transform, O(n 2^n).

    Matches :func:`naive_wht` exactly on integer-valued input and to
    rounding error otherwise.

    >>> fwht([1.0, 1.0, 1.0, 1.0]).coeffs.tolist()
    [4.0, 0.0, 0.0, 0.0]
    """
    n, x, is_pmf = _unpack(signal)
    return WalshSpectrum(n, _butterflies(x), is_pmf)


def inverse_fwht(spectrum: Union[WalshSpectrum, Sequence[float], np.ndarray]) -> RealSignal:
    if not isinstance(spectrum, WalshSpectrum):
        spectrum = WalshSpectrum.from_values(spectrum)
    return RealSignal(spectrum.n, _butterflies(spectrum.coeffs) / float(1 << spectrum.n))


def bias(dist: Distribution, mask: int) -> float:
    """``Pr(<mask,X> = 0) - Pr(<mask,X> = 1)`` computed by direct summation."""
    size = 1 << dist.n
    if not 0 <= int(mask) < size:
        raise ValueError(f"mask {mask} outside [0, {size})")
    odd = parity(np.arange(size, dtype=np.uint64) & np.uint64(mask)).astype(bool)
    return float(dist.mass[~odd].sum() - dist.mass[odd].sum())


def l2_norm_sq(spectrum: WalshSpectrum) -> float:
    return float(np.dot(spectrum.coeffs, spectrum.coeffs))


def sei(spectrum: WalshSpectrum) -> float:
    """Squared Euclidean imbalance: sum of squared coefficients over nonzero masks."""
    rest = spectrum.coeffs[1:]
    return float(np.dot(rest, rest))


def empirical_distribution(samples: Iterable[int], n: int) -> Distribution:
    """Relative frequencies of the observed n-bit values."""
    n = _check_bits(n)
    arr = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples)
    if arr.size == 0:
        raise ValueError("empty sample set")
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(arr == np.floor(arr)):
            arr = arr.astype(np.int64)
        else:
            raise ValueError("samples must be integers")
    size = 1 << n
    bad = np.flatnonzero((arr < 0) | (arr >= size))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"sample {int(arr[i])} at index {i} outside [0, {size})")
    counts = np.bincount(arr.astype(np.int64), minlength=size)
    return Distribution(n, counts / arr.size)


def top_coefficients(spectrum: WalshSpectrum, k: int) -> list[tuple[int, float]]:
    """The ``k`` nonzero masks with the largest ``|coeff|``.

    Sorted by decreasing magnitude; equal magnitudes are ordered by
    ascending mask. Asking for more than ``2^n - 1`` entries returns them all.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    masks = np.arange(1, len(spectrum))
    mags = np.abs(spectrum.coeffs[1:])
    # lexsort: last key is primary
    order = np.lexsort((masks, -mags))[:k]
    return [(int(masks[i]), float(spectrum.coeffs[masks[i]])) for i in order]
