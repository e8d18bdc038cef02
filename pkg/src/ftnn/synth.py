"""Seeded synthetic data: low-tubal-rank tensors, smooth tensors, masks and
salt-and-pepper corruption.

All randomness comes from ``numpy.random.Philox``, a counter-based generator
with 64-bit keys, seeded directly with the user's integer seed.  The same
seed and arguments give bit-identical output on every platform numpy
supports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ftnn.tensor import Mask, tprod


def rng(seed):
    return np.random.Generator(np.random.Philox(int(seed)))


def _check_dims(n1, n2, n3):
    dims = tuple(int(n) for n in (n1, n2, n3))
    if min(dims) < 1:
        raise ValueError(f"extents must be positive, got {dims}")
    return dims


def rescale(x):
    """Affine map of the whole tensor onto [0, 1]; returns ``(y, lo, span)``."""
    lo, hi = float(x.min()), float(x.max())
    span = hi - lo
    if span == 0:
        return np.zeros_like(x), lo, 0.0
    return (x - lo) / span, lo, span


@dataclass(frozen=True)
class TubalFactors:
    """Generator factors: ``tensor == (tprod(a, b) - lo) / span``."""

    a: np.ndarray
    b: np.ndarray
    lo: float
    span: float

    def reconstruct(self):
        return (tprod(self.a, self.b) - self.lo) / self.span


def gen_tubal_lowrank(n1, n2, n3, rank, seed, return_factors=False):
    """``A * B`` (t-product) with standard normal factors, rescaled to [0, 1]."""
    n1, n2, n3 = _check_dims(n1, n2, n3)
    if not 1 <= rank <= min(n1, n2):
        raise ValueError(f"rank must lie in [1, {min(n1, n2)}], got {rank}")
    g = rng(seed)
    a = g.standard_normal((n1, rank, n3))
    b = g.standard_normal((rank, n2, n3))
    x, lo, span = rescale(tprod(a, b))
    if return_factors:
        return x, TubalFactors(a, b, lo, span)
    return x


def smooth_basis(n3, bandwidth):
    """First ``bandwidth`` periodic Fourier modes sampled on ``n3`` points.

    Column 0 is the constant, then cos/sin pairs of increasing frequency.
    """
    t = np.arange(n3) / n3
    cols = [np.ones(n3)]
    freq = 1
    while len(cols) < bandwidth:
        cols.append(np.cos(2 * np.pi * freq * t))
        if len(cols) < bandwidth:
            cols.append(np.sin(2 * np.pi * freq * t))
        freq += 1
    return np.stack(cols, axis=1)


def gen_smooth(n1, n2, n3, bandwidth, seed):
    """Tensor whose tubes are random mixtures of ``bandwidth`` low-frequency modes."""
    n1, n2, n3 = _check_dims(n1, n2, n3)
    if bandwidth < 1:
        raise ValueError("bandwidth must be >= 1")
    coef = rng(seed).standard_normal((n1, n2, bandwidth))
    return rescale(coef @ smooth_basis(n3, bandwidth).T)[0]


def gen_mask(n1, n2, n3, sr, seed):
    """Uniformly random observed set with ``round(sr * N)`` entries."""
    dims = _check_dims(n1, n2, n3)
    if not 0 < sr <= 1:
        raise ValueError(f"sampling rate must lie in (0, 1], got {sr}")
    size = int(np.prod(dims))
    count = int(round(sr * size))
    picked = rng(seed).choice(size, size=count, replace=False)
    return Mask(dims, np.sort(picked))


def add_salt_pepper(x, rho, seed):
    """Set ``round(rho * N)`` random entries to 0 or 1 with a fair coin.

    Returns the corrupted tensor and the :class:`Mask` of touched entries.
    """
    x = np.asarray(x, dtype=np.float64)
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    g = rng(seed)
    size = x.size
    picked = np.sort(g.choice(size, size=int(round(rho * size)), replace=False))
    values = g.integers(0, 2, size=picked.size).astype(np.float64)
    flat = x.ravel(order="F").copy()
    flat[picked] = values
    return flat.reshape(x.shape, order="F"), Mask(x.shape, picked)
