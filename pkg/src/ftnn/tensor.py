"""Dense third-order tensor algebra and the proximal operators used by the solvers.

Tensors are plain ``numpy.ndarray`` objects of shape ``(n1, n2, n3)`` and
dtype float64.  The canonical linear ordering is Fortran order (``i`` fastest,
then ``j``, then ``k``), so the mode-3 unfolding is a reshape of the raveled
data.  Matrices are 2-D float64 arrays.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ftnn._validation import check_tensor, num_workers


class ShapeError(ValueError):
    """Raised when operand extents are incompatible."""


class NumericError(ValueError):
    """Raised on non-finite input to a numerical kernel."""


def unfold3(x):
    """Mode-3 unfolding: ``n3 x (n1*n2)`` with column ``l = j*n1 + i`` (0-based)."""
    x = check_tensor(x)
    n1, n2, n3 = x.shape
    return x.reshape(n1 * n2, n3, order="F").T.copy()


def fold3(m, n1, n2):
    """Inverse of :func:`unfold3`."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != n1 * n2:
        raise ShapeError(
            f"cannot fold a matrix of shape {m.shape} into {n1}x{n2}xN")
    n3 = m.shape[0]
    return m.T.reshape(n1, n2, n3, order="F").copy()


def mode3_product(x, a):
    """Tensor-matrix product along mode 3, ``Y_(3) = A @ X_(3)``."""
    x = check_tensor(x)
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != x.shape[2]:
        raise ShapeError(
            f"matrix with {a.shape[-1]} columns cannot act on n3={x.shape[2]}")
    n1, n2, _ = x.shape
    return fold3(a @ unfold3(x), n1, n2)


def tprod(a, b):
    """t-product of ``a`` (n1 x n2 x n3) and ``b`` (n2 x n4 x n3).

    Tubes are combined by direct circular convolution, so no complex
    arithmetic is involved.  Cost is O(n1 n2 n4 n3^2).
    """
    a = check_tensor(a)
    b = check_tensor(b)
    if a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise ShapeError(f"t-product undefined for {a.shape} and {b.shape}")
    n3 = a.shape[2]
    out = np.zeros((a.shape[0], b.shape[1], n3))
    for k in range(n3):
        for m in range(n3):
            out[:, :, k] += a[:, :, m] @ b[:, :, (k - m) % n3]
    return out


def identity_tensor(n, n3):
    """Identity under t-product: first frontal slice ``I_n``, the rest zero."""
    out = np.zeros((n, n, n3))
    out[:, :, 0] = np.eye(n)
    return out


@dataclass(frozen=True)
class Mask:
    """Set of observed entries, stored as sorted Fortran-order linear offsets."""

    shape: tuple
    indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        if len(shape) != 3 or min(shape) < 1:
            raise ShapeError(f"mask shape must be three positive extents, got {shape}")
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        size = int(np.prod(shape))
        if idx.size:
            if idx[0] < 0 or idx[-1] >= size:
                raise ValueError("mask offset out of range")
            if np.any(np.diff(idx) <= 0):
                raise ValueError("mask offsets must be strictly increasing")
        idx.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_bool(cls, observed):
        observed = np.asarray(observed, dtype=bool)
        if observed.ndim != 3:
            raise ShapeError("boolean mask must be three-dimensional")
        return cls(observed.shape, np.flatnonzero(observed.ravel(order="F")))

    @classmethod
    def full(cls, shape):
        return cls(shape, np.arange(int(np.prod(shape)), dtype=np.int64))

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def sampling_rate(self):
        return len(self.indices) / self.size

    def __len__(self):
        return len(self.indices)

    def to_bool(self):
        flat = np.zeros(self.size, dtype=bool)
        flat[self.indices] = True
        return flat.reshape(self.shape, order="F")


def as_mask(mask, shape):
    """Accept a :class:`Mask` or a boolean array and check it against ``shape``."""
    if not isinstance(mask, Mask):
        mask = Mask.from_bool(mask)
    if mask.shape != tuple(shape):
        raise ShapeError(f"mask shape {mask.shape} does not match tensor {tuple(shape)}")
    return mask


def project_mask(x, mask, complement=False):
    """Keep the entries of ``x`` on the mask (or on its complement) and zero the rest."""
    x = check_tensor(x)
    observed = as_mask(mask, x.shape).to_bool()
    if complement:
        observed = ~observed
    return np.where(observed, x, 0.0)


def svd(m):
    """Thin SVD with a fixed sign convention.

    Each left singular vector is flipped so its largest-magnitude entry is
    nonnegative (ties go to the lowest index); the matching right vector is
    flipped too.  Works on a single matrix or a stack ``(..., r, c)``.
    """
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    pick = np.argmax(np.abs(u), axis=-2)[..., None, :]
    signs = np.sign(np.take_along_axis(u, pick, axis=-2))
    signs[signs == 0] = 1.0
    u = u * signs
    vt = vt * np.swapaxes(signs, -1, -2)
    return u, s, vt


def svt(m, tau):
    """Singular value thresholding, the prox of ``tau * ||.||_*``."""
    m = np.asarray(m, dtype=np.float64)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if not np.all(np.isfinite(m)):
        raise NumericError("svt input contains non-finite entries")
    if not np.any(m):
        return np.zeros_like(m)
    u, s, vt = svd(m)
    s = np.maximum(s - tau, 0.0)
    return (u * s) @ vt


def _svt_stack(stack, tau):
    # stack: (k, n1, n2); all-zero slices are skipped without an SVD call
    out = np.zeros_like(stack)
    live = np.flatnonzero(np.any(stack != 0, axis=(1, 2)))
    if live.size:
        u, s, vt = svd(stack[live])
        s = np.maximum(s - tau, 0.0)
        out[live] = (u * s[:, None, :]) @ vt
    return out


def svt_slices(x, tau, n_jobs=None):
    """Apply :func:`svt` to every frontal slice of ``x``.

    Slices are split into contiguous chunks that may run on a thread pool.
    Every slice is processed independently by the same kernel, so the result
    does not depend on the number of workers.
    """
    x = check_tensor(x)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if not np.all(np.isfinite(x)):
        raise NumericError("svt input contains non-finite entries")
    stack = np.ascontiguousarray(np.moveaxis(x, 2, 0))
    workers = num_workers(n_jobs)
    if workers <= 1 or stack.shape[0] < 2:
        out = _svt_stack(stack, tau)
    else:
        chunks = np.array_split(np.arange(stack.shape[0]), workers)
        chunks = [c for c in chunks if c.size]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda c: _svt_stack(stack[c], tau), chunks))
        out = np.concatenate(parts, axis=0)
    return np.moveaxis(out, 0, 2).copy()


def soft_threshold(x, tau):
    """Elementwise shrinkage ``sign(x) * max(|x| - tau, 0)``."""
    x = np.asarray(x, dtype=np.float64)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if not np.all(np.isfinite(x)):
        raise NumericError("soft_threshold input contains non-finite entries")
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


class Norms(NamedTuple):
    fro: float
    l1: float
    linf: float


def norms(x):
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return Norms(0.0, 0.0, 0.0)
    a = np.abs(x)
    return Norms(float(np.sqrt(np.sum(x * x))), float(a.sum()), float(a.max()))
