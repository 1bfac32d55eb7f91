"""Deterministic randomness built on SplitMix64 counter streams.

Every random decision in the toolkit (splitting, bootstrap draws, per-node
feature subsets, epoch shuffles, permutation importance, the synthetic
generator) is driven by one generator so that a run is reproducible
bit-for-bit across platforms and across sequential/parallel execution.

SplitMix64 is counter-based: the k-th output of a stream with seed ``s`` is
``mix64(s + (k + 1) * GAMMA)``, which vectorizes trivially in numpy and is
re-implemented verbatim inside the numba tree kernels (see
``_tree_kernels``). Sub-streams are derived from a root seed and a path of
integer tags via :func:`derive`, so independent consumers never share a
stream.

Purpose tags used across the package:

==================  =======================================
STREAM_SPLIT        stratified train/test shuffles (per class)
STREAM_EPOCH        logistic-regression epoch shuffles
STREAM_BOOTSTRAP    per-tree bootstrap draws
STREAM_NODE_FEATS   per-tree feature-subset streams
STREAM_PERMUTE      permutation-importance shuffles
STREAM_SYNTH        synthetic flow generator
STREAM_VALIDATION   validation carve-out for threshold tuning
==================  =======================================
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_C1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_C2 = np.uint64(0x94D049BB133111EB)

STREAM_SPLIT = 1
STREAM_EPOCH = 2
STREAM_BOOTSTRAP = 3
STREAM_NODE_FEATS = 4
STREAM_PERMUTE = 5
STREAM_SYNTH = 6
STREAM_VALIDATION = 7

_U64 = np.uint64


def mix64(z: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """SplitMix64 finalizer; accepts a uint64 scalar or array."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _MIX_C1
        z = (z ^ (z >> _U64(27))) * _MIX_C2
        return z ^ (z >> _U64(31))


def derive(seed: int, *tags: int) -> np.uint64:
    """Derive a sub-stream seed from a root seed and a path of integer tags."""
    s = _U64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    with np.errstate(over="ignore"):
        for t in tags:
            s = mix64((s + GAMMA) ^ _U64(np.uint64(t & 0xFFFFFFFFFFFFFFFF)))
    return s


class Stream:
    """A SplitMix64 stream: stateless counter, deterministic per seed."""

    def __init__(self, seed: np.uint64 | int):
        self._seed = _U64(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF))
        self._pos = 0

    def next_block(self, n: int) -> np.ndarray:
        """Return the next ``n`` raw uint64 outputs."""
        counters = np.arange(self._pos + 1, self._pos + n + 1, dtype=np.uint64)
        self._pos += n
        with np.errstate(over="ignore"):
            return mix64(self._seed + counters * GAMMA)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1) with 53-bit resolution."""
        return (self.next_block(n) >> _U64(11)).astype(np.float64) * (2.0 ** -53)

    def normal(self, n: int) -> np.ndarray:
        """``n`` standard normals via Box-Muller on paired uniforms."""
        m = (n + 1) // 2
        u1 = self.uniform(m)
        u2 = self.uniform(m)
        # guard log(0); 2^-54 keeps the value in the open interval
        r = np.sqrt(-2.0 * np.log(np.maximum(u1, 2.0 ** -54)))
        theta = 2.0 * np.pi * u2
        out = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return out[:n]

    def integers(self, n: int, bound: int) -> np.ndarray:
        """``n`` ints uniform on [0, bound) via rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        b = _U64(bound)
        full = (2**64 // bound) * bound
        if full == 2**64:  # power-of-two bound: no rejection needed
            return (self.next_block(n) % b).astype(np.int64)
        limit = _U64(full)
        out = np.empty(n, dtype=np.int64)
        filled = 0
        while filled < n:
            raw = self.next_block(n - filled)
            ok = raw < limit
            accepted = (raw[ok] % b).astype(np.int64)
            out[filled : filled + accepted.size] = accepted
            filled += accepted.size
        return out

    def permutation(self, n: int) -> np.ndarray:
        """Permutation of range(n): stable argsort of fresh 64-bit keys."""
        return np.argsort(self.next_block(n), kind="stable")

    def choice(self, n: int, probs: np.ndarray) -> np.ndarray:
        """``n`` category indices drawn from the probability vector ``probs``."""
        cdf = np.cumsum(np.asarray(probs, dtype=np.float64))
        cdf[-1] = 1.0
        return np.searchsorted(cdf, self.uniform(n), side="right").astype(np.int64)


def stream(seed: int, *tags: int) -> Stream:
    """Stream for the sub-seed ``derive(seed, *tags)``."""
    return Stream(derive(seed, *tags))
