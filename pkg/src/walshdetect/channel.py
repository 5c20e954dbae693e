"""Binary entropy, mutual information and binary-channel capacity.

All capacities and entropies are in bits. The constants ``2 ln 2`` and
``8 ln 2`` appearing in the small-bias approximations use the natural
logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)

EXACT = "exact-closed-form"
APPROX = "extremal-approx"
BLAHUT_ARIMOTO = "blahut-arimoto"

# beyond this the O(d^4) term is no longer negligible
APPROX_MAX_BIAS = 0.2

# 1 / (2k (2k-1)) for k = 1..4
_TAYLOR_COEFFS = (1.0 / 2.0, 1.0 / 12.0, 1.0 / 30.0, 1.0 / 56.0)


def _check_prob(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name}={p!r} is not a probability")
    return p


def _xlog2x(p: float) -> float:
    return 0.0 if p <= 0.0 else p * math.log2(p)


def binary_entropy(p: float) -> float:
    """H(p) = -p log2 p - (1-p) log2(1-p), with 0 log 0 = 0."""
    p = _check_prob(p)
    return -_xlog2x(p) - _xlog2x(1.0 - p)


def entropy(probs) -> float:
    """Shannon entropy in bits of a probability vector."""
    return -sum(_xlog2x(float(q)) for q in np.ravel(probs))


def entropy_taylor(d: float, order: int = 8) -> float:
    """Truncated series for H((1+d)/2) around d = 0.

    Keeps the terms up to ``d**order`` of
    ``1 - (d^2/2 + d^4/12 + d^6/30 + d^8/56) / ln 2``.
    """
    d = float(d)
    if abs(d) >= 1.0:
        raise ValueError(f"series requires |d| < 1, got {d!r}")
    if order not in (0, 2, 4, 6, 8):
        raise ValueError(f"order must be an even integer in [0, 8], got {order!r}")
    d2 = d * d
    total = 0.0
    power = 1.0
    for c in _TAYLOR_COEFFS[: order // 2]:
        power *= d2
        total += c * power
    return 1.0 - total / LN2


@dataclass(frozen=True)
class BinaryChannel:
    """2x2 transition matrix, ``transition[x][y] = p(y | x)``."""

    transition: np.ndarray

    def __post_init__(self):
        t = np.array(self.transition, dtype=np.float64)
        if t.shape != (2, 2):
            raise ValueError(f"binary channel needs a 2x2 matrix, got shape {t.shape}")
        if np.any(t < 0) or np.any(t > 1) or not np.all(np.isfinite(t)):
            raise ValueError("transition probabilities must lie in [0, 1]")
        if np.any(np.abs(t.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError(f"rows must sum to 1, got {t.sum(axis=1).tolist()}")
        t.setflags(write=False)
        object.__setattr__(self, "transition", t)

    @classmethod
    def bsc(cls, p: float) -> "BinaryChannel":
        p = _check_prob(p, "crossover")
        return cls([[1.0 - p, p], [p, 1.0 - p]])


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    input_dist: tuple[float, float]
    method: str
    iterations: int = 0
    converged: bool = True

    @property
    def p0(self) -> float:
        return self.input_dist[0]

    def to_dict(self) -> dict:
        return {
            "capacity": self.capacity,
            "p0": self.p0,
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _check_approx_bias(d: float) -> float:
    d = float(d)
    if abs(d) > APPROX_MAX_BIAS:
        raise ValueError(
            f"|d|={abs(d)!r} exceeds {APPROX_MAX_BIAS}; use the exact or Blahut-Arimoto path"
        )
    return d


def bsc_capacity_exact(p: float) -> CapacityResult:
    """Capacity 1 - H(p) of the BSC with crossover probability ``p``."""
    return CapacityResult(1.0 - binary_entropy(p), (0.5, 0.5), EXACT)


def bsc_capacity_extremal(d: float) -> CapacityResult:
    """Small-bias BSC capacity d^2 / (2 ln 2), crossover (1-d)/2."""
    d = _check_approx_bias(d)
    return CapacityResult(d * d / (2.0 * LN2), (0.5, 0.5), APPROX)


def asym_channel(d: float) -> BinaryChannel:
    """Input 0 sees bias ``d`` (error (1-d)/2); input 1 sees a fair coin."""
    d = float(d)
    if abs(d) > 1.0:
        raise ValueError(f"|d| must be <= 1, got {d!r}")
    pe = (1.0 - d) / 2.0
    return BinaryChannel([[1.0 - pe, pe], [0.5, 0.5]])


def mutual_information(ch: BinaryChannel, p0: float) -> float:
    """I(X;Y) = H(Y) - H(Y|X) for input distribution (p0, 1-p0), in bits."""
    p0 = _check_prob(p0, "p0")
    px = np.array([p0, 1.0 - p0])
    py = px @ ch.transition
    h_y_given_x = sum(px[x] * entropy(ch.transition[x]) for x in range(2))
    return entropy(py) - h_y_given_x


def asym_mi_closed_form(d: float, p0: float) -> float:
    """I(X;Y) of :func:`asym_channel` written as
    ``H((1 + p0 d)/2) - p0 (H((1-d)/2) - 1) - 1``.
    """
    d = float(d)
    if abs(d) >= 1.0:
        raise ValueError(f"|d| must be < 1, got {d!r}")
    p0 = _check_prob(p0, "p0")
    return binary_entropy((1.0 + p0 * d) / 2.0) - p0 * (binary_entropy((1.0 - d) / 2.0) - 1.0) - 1.0


def asym_capacity_approx(d: float) -> CapacityResult:
    d = _check_approx_bias(d)
    return CapacityResult(d * d / (8.0 * LN2), (0.5, 0.5), APPROX)


def _row_divergences(t: np.ndarray, q: np.ndarray) -> np.ndarray:
    # D(p(.|x) || q) in nats, 0 log 0 = 0
    ratio = np.divide(t, q, out=np.ones_like(t), where=t > 0)
    return np.sum(t * np.log(ratio), axis=1)


def blahut_arimoto(
    ch: BinaryChannel, tol: float = 1e-10, max_iter: int = 100_000
) -> CapacityResult:
    """Numerical capacity by Blahut-Arimoto alternating maximization.

    Each step computes ``D_x = KL(p(.|x) || q)`` for the current output
    distribution ``q``. ``log sum_x r_x exp(D_x)`` and ``max_x D_x`` bracket
    the capacity; iteration stops once the bracket is narrower than ``tol``
    bits. Nearly useless channels (bias of a few percent) converge linearly
    with a rate close to 1 and need tens of thousands of steps at
    ``tol=1e-10``. The reported capacity is I(X;Y) at the final input
    distribution; if ``max_iter`` runs out first it is returned with
    ``converged=False``.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    t = ch.transition
    r = np.array([0.5, 0.5])
    for it in range(1, max_iter + 1):
        q = r @ t
        dx = _row_divergences(t, q)
        # only inputs with r_x > 0 contribute to the lower bound
        weighted = r * np.exp(dx)
        z = float(weighted.sum())
        lower = math.log(z) / LN2
        upper = float(dx.max()) / LN2
        if upper - lower < tol:
            cap = mutual_information(ch, float(r[0]))
            return CapacityResult(min(max(cap, 0.0), 1.0), (float(r[0]), float(r[1])),
                                  BLAHUT_ARIMOTO, it, True)
        r = weighted / z
    cap = mutual_information(ch, float(r[0]))
    return CapacityResult(min(max(cap, 0.0), 1.0), (float(r[0]), float(r[1])),
                          BLAHUT_ARIMOTO, max_iter, False)
