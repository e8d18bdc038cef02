"""Per-slice PSNR and SSIM, averaged over frontal slices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from ftnn.tensor import ShapeError

PSNR_CAP = 99.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _pair(ref, test):
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ShapeError(f"shape mismatch: {ref.shape} vs {test.shape}")
    return ref, test


def psnr(ref, test, peak=1.0):
    """``10 log10(peak^2 / MSE)`` in dB, capped at :data:`PSNR_CAP`."""
    ref, test = _pair(ref, test)
    if not peak > 0:
        raise ValueError("peak must be positive")
    mse = np.mean((ref - test) ** 2)
    if mse == 0:
        return PSNR_CAP
    return float(min(10.0 * np.log10(peak * peak / mse), PSNR_CAP))


def _smooth(img):
    # truncate so the kernel spans exactly SSIM_WINDOW taps
    radius = SSIM_WINDOW // 2
    return gaussian_filter(img, SSIM_SIGMA, mode="reflect", truncate=radius / SSIM_SIGMA)


def ssim(ref, test, data_range=1.0):
    """Mean single-scale SSIM with an 11x11 Gaussian window (sigma 1.5).

    Local statistics use symmetric boundary extension.  The expression is
    symmetric in its two arguments, so ``ssim(a, b) == ssim(b, a)`` exactly.
    """
    ref, test = _pair(ref, test)
    if ref.ndim != 2:
        raise ShapeError("ssim expects 2-D slices")
    if min(ref.shape) < SSIM_WINDOW:
        raise ShapeError(f"slices must be at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {ref.shape}")
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    mu_x, mu_y = _smooth(ref), _smooth(test)
    sxx = _smooth(ref * ref) - mu_x * mu_x
    syy = _smooth(test * test) - mu_y * mu_y
    sxy = _smooth(ref * test) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


@dataclass(frozen=True)
class QualityReport:
    psnr: np.ndarray
    ssim: np.ndarray

    @property
    def mean_psnr(self):
        return float(np.mean(self.psnr))

    @property
    def mean_ssim(self):
        return float(np.mean(self.ssim))

    def rows(self):
        """CSV rows: header, one row per slice, then a ``mean`` row."""
        out = [["slice", "psnr", "ssim"]]
        out += [[k + 1, float(p), float(s)] for k, (p, s) in enumerate(zip(self.psnr, self.ssim))]
        out.append(["mean", self.mean_psnr, self.mean_ssim])
        return out


def quality(ref, test, peak=1.0):
    """PSNR and SSIM of every frontal slice of two (n1, n2, n3) tensors."""
    ref, test = _pair(ref, test)
    if ref.ndim != 3:
        raise ShapeError("quality expects third-order tensors")
    n3 = ref.shape[2]
    p = np.array([psnr(ref[:, :, k], test[:, :, k], peak) for k in range(n3)])
    s = np.array([ssim(ref[:, :, k], test[:, :, k], peak) for k in range(n3)])
    return QualityReport(p, s)
