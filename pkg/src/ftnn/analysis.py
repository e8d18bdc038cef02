"""Transform-domain rank diagnostics.

For a tensor and a mode-3 transform, compute the singular values of every
transformed frontal slice, the truncated multi-rank at relative thresholds,
and a coarse histogram of singular value magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ftnn._validation import check_tensor

# right-closed magnitude bins: [0, 1e-2], (1e-2, 1e-1], (1e-1, 1], (1, inf)
HIST_EDGES = (1e-2, 1e-1, 1.0)
HIST_LABELS = ("[0,1e-2]", "(1e-2,1e-1]", "(1e-1,1]", "(1,inf)")


@dataclass(frozen=True)
class RankSpectrum:
    """Singular value spectrum of one transformed tensor at one threshold.

    Attributes
    ----------
    singular_values : ndarray, shape (w*n3, min(n1, n2))
        Descending singular values, one row per transformed slice.
    epsilon : float
        Relative truncation threshold.
    truncated_ranks : ndarray of int
        Per slice, the count of singular values above ``epsilon`` times the
        largest singular value over all slices.
    histogram : ndarray, shape (4,)
        Fractions of all singular values falling in each bin of
        :data:`HIST_LABELS`.
    """

    singular_values: np.ndarray
    epsilon: float
    truncated_ranks: np.ndarray
    histogram: np.ndarray

    @property
    def mean_rank(self):
        return float(np.mean(self.truncated_ranks))


def slice_singular_values(x, transform):
    xw = transform.forward(check_tensor(x))
    return np.linalg.svd(np.moveaxis(xw, 2, 0), compute_uv=False)


def histogram(singular_values):
    s = np.asarray(singular_values).ravel()
    bins = np.searchsorted(np.asarray(HIST_EDGES), s, side="left")
    counts = np.bincount(bins, minlength=len(HIST_LABELS))
    return counts / s.size


def truncated_ranks(singular_values, epsilon):
    s = np.asarray(singular_values)
    top = s.max() if s.size else 0.0
    if top == 0:
        return np.zeros(s.shape[0], dtype=np.int64)
    return np.sum(s > epsilon * top, axis=1)


def multi_rank_spectrum(x, transform, epsilons=(0.02, 0.01, 0.005)):
    """One :class:`RankSpectrum` per threshold.  ``x`` should be scaled to [0, 1]."""
    s = slice_singular_values(x, transform)
    hist = histogram(s)
    out = []
    for eps in epsilons:
        if not eps > 0:
            raise ValueError(f"epsilon must be positive, got {eps}")
        out.append(RankSpectrum(s, float(eps), truncated_ranks(s, eps), hist))
    return out


def framelet_multi_rank(x, system):
    """Numerical rank of every slice of the transformed tensor.

    Each slice uses its own tolerance ``max(n1, n2) * sigma_max * eps``.
    """
    x = check_tensor(x)
    s = slice_singular_values(x, system)
    tol = max(x.shape[0], x.shape[1]) * s[:, :1] * np.finfo(np.float64).eps
    return np.sum((s > tol) & (s > 0), axis=1)
