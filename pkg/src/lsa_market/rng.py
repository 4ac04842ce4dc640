"""Deterministic counter-based random streams.

Every stream is a keyed SplitMix64 sequence: the i-th raw 64-bit word of a
stream with key ``k`` is ``mix64(k + (i+1)*GOLDEN)``, where ``mix64`` is the
SplitMix64 finalizer (Steele, Lea & Flood, 2014). Child streams are derived
by hashing ``(key, index)`` with a different multiplier, so any substream can
be reconstructed in isolation without touching its parent's draw position.

Draw primitives consume a fixed number of raw words (uniform: 1, standard
normal: 2, permutation of n: n), which makes the draw sequence independent of
how requests are batched: ``uniforms(5)`` then ``uniforms(3)`` yields the same
values as ``uniforms(8)``. The same property lets the vectorized samplers in
:mod:`lsa_market.engine` reproduce scalar draws bit for bit.

No platform-default generator is used anywhere; results depend only on the
seed path and this module.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr, ndtri

ALGORITHM = "splitmix64-counter"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_CHILD_GOLDEN = 0xD1B54A32D192ED03
_CHILD_SALT = 0x8BB84B93962EACC9
_TWO_PI = 2.0 * np.pi
_INV_2_53 = 2.0 ** -53

# Minimum acceptance probability before the truncated-normal sampler switches
# from rejection to the inverse-CDF transform.
TRUNCATION_REJECTION_FLOOR = 1e-3


def _mix64_int(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z


def _mix64_array(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, element-wise on uint64 arrays (wrapping)."""
    with np.errstate(over="ignore"):
        z = z ^ (z >> np.uint64(30))
        z = z * np.uint64(0xBF58476D1CE4E5B9)
        z = z ^ (z >> np.uint64(27))
        z = z * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return z


def derive_child_key(key: int, index: int) -> int:
    """Key of child ``index`` of a stream with ``key``.

    Uses a multiplier distinct from the raw-word path so child keys and raw
    words come from unrelated hash sequences.
    """
    z = ((key ^ _CHILD_SALT) + (index + 1) * _CHILD_GOLDEN) & _MASK
    return _mix64_int(_mix64_int(z))


def derive_child_keys(key: int | np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Vectorized :func:`derive_child_key`; broadcasts key against indices."""
    k = np.asarray(key, dtype=np.uint64)
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (k ^ np.uint64(_CHILD_SALT)) + (idx + np.uint64(1)) * np.uint64(_CHILD_GOLDEN)
    return _mix64_array(_mix64_array(z))


def raw_words(key: int | np.ndarray, counters: np.ndarray) -> np.ndarray:
    """Raw word of stream ``key`` at position ``counter`` (pure function)."""
    k = np.asarray(key, dtype=np.uint64)
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = k + (c + np.uint64(1)) * np.uint64(_GOLDEN)
    return _mix64_array(z)


def uniforms_from_raw(raw: np.ndarray) -> np.ndarray:
    """Map raw words to doubles strictly inside (0, 1)."""
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def normals_from_uniform_pairs(u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """Box-Muller cosine branch; one variate per (u1, u2) pair."""
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)


class RngStream:
    """One independently keyed draw sequence.

    Streams are single-owner: never draw from one stream from two concurrent
    activities. Parallel work should operate on child streams, which are pure
    functions of ``(key, index)`` and independent of the parent's position.
    """

    __slots__ = ("key", "_counter")

    def __init__(self, key: int, counter: int = 0):
        self.key = key & _MASK
        self._counter = counter

    @classmethod
    def from_seed(cls, seed: int) -> "RngStream":
        if seed < 0:
            raise ValueError("seed must be non-negative")
        return cls(derive_child_key(seed & _MASK, 0))

    @property
    def counter(self) -> int:
        return self._counter

    def child(self, index: int) -> "RngStream":
        return RngStream(derive_child_key(self.key, index))

    def raw(self, count: int) -> np.ndarray:
        start = self._counter
        self._counter += count
        return raw_words(self.key, np.arange(start, start + count, dtype=np.uint64))

    def uniforms(self, count: int) -> np.ndarray:
        return uniforms_from_raw(self.raw(count))

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def normals(self, count: int) -> np.ndarray:
        u = self.uniforms(2 * count)
        return normals_from_uniform_pairs(u[0::2], u[1::2])

    def normal(self) -> float:
        return float(self.normals(1)[0])

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of range(n) via argsort of n uniforms."""
        return np.argsort(self.uniforms(n), kind="stable")


def sample_truncated_normal(stream: RngStream, mu: float, sigma: float, minimum: float) -> float:
    """Draw from Normal(mu, sigma) conditioned on the value being >= minimum.

    Rejection from the untruncated normal; when the acceptance probability
    1 - Phi((minimum - mu) / sigma) falls below ``TRUNCATION_REJECTION_FLOOR``
    the draw switches to the inverse-CDF transform (one uniform). sigma == 0
    degenerates to max(mu, minimum).
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return float(max(mu, minimum))
    alpha = (minimum - mu) / sigma
    accept = float(ndtr(-alpha))
    if accept < TRUNCATION_REJECTION_FLOOR:
        if accept == 0.0:
            # conditioning on a numerically impossible event; collapse to the bound
            return float(minimum)
        lo = float(ndtr(alpha))
        u = stream.uniform()
        return float(mu + sigma * float(ndtri(lo + u * accept)))
    while True:
        x = mu + sigma * stream.normal()
        if x >= minimum:
            return float(x)


def truncated_normal_batch(
    keys: np.ndarray,
    counters: np.ndarray,
    mu: np.ndarray,
    sigma: np.ndarray,
    minimum: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`sample_truncated_normal`, one draw per (key, counter).

    Consumes exactly the words the scalar routine would consume on a stream
    positioned at ``counter``; returns the values and the advanced counters.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    cnt = np.array(counters, dtype=np.int64, copy=True)
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    minimum = np.asarray(minimum, dtype=np.float64)
    if np.any(sigma < 0):
        raise ValueError("sigma must be non-negative")

    out = np.empty(keys.shape, dtype=np.float64)
    degenerate = sigma == 0
    if degenerate.any():
        out[degenerate] = np.maximum(mu[degenerate], minimum[degenerate])

    active = ~degenerate
    alpha = np.zeros_like(mu)
    accept = np.ones_like(mu)
    if active.any():
        alpha[active] = (minimum[active] - mu[active]) / sigma[active]
        accept[active] = ndtr(-alpha[active])

    inverse = active & (accept < TRUNCATION_REJECTION_FLOOR)
    if inverse.any():
        impossible = inverse & (accept == 0.0)
        out[impossible] = minimum[impossible]
        inv = inverse & ~impossible
        if inv.any():
            u = uniforms_from_raw(raw_words(keys[inv], cnt[inv]))
            cnt[inv] += 1
            lo = ndtr(alpha[inv])
            out[inv] = mu[inv] + sigma[inv] * ndtri(lo + u * accept[inv])

    pending = active & ~inverse
    while pending.any():
        idx = np.flatnonzero(pending)
        u1 = uniforms_from_raw(raw_words(keys[idx], cnt[idx]))
        u2 = uniforms_from_raw(raw_words(keys[idx], cnt[idx] + 1))
        cnt[idx] += 2
        x = mu[idx] + sigma[idx] * normals_from_uniform_pairs(u1, u2)
        ok = x >= minimum[idx]
        hit = idx[ok]
        out[hit] = x[ok]
        pending[hit] = False
    return out, cnt
