"""Objective quality measures: MSE, PSNR, and single-scale SSIM.

All three operate on luma planes in [0, 1] rescaled to the 0-255 range, so
PSNR is 10*log10(255^2 / MSE) in dB with float('inf') marking identical
inputs. SSIM follows Wang et al. (2004) with a uniform 8x8 window at stride
1, K1 = 0.01, K2 = 0.03, L = 255, averaged over all windows.

A `shave` argument crops that many border pixels from both images before
comparison, the usual convention for super-resolution scoring where
resampling pollutes a thin border ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image import crop_border

SSIM_WINDOW = 8
_C1 = (0.01 * 255.0) ** 2
_C2 = (0.03 * 255.0) ** 2


@dataclass(frozen=True)
class QualityScore:
    psnr_db: float  # inf when the compared regions are identical
    ssim: float
    mse: float  # in 8-bit units squared


def _as_planes(a, b, shave):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError(f"plane shapes differ or not 2-D: {a.shape} vs {b.shape}")
    if shave:
        a = crop_border(a, shave)
        b = crop_border(b, shave)
    return a, b


def mse8(a, b) -> float:
    """Mean squared difference on the 0-255 scale."""
    a, b = _as_planes(a, b, 0)
    diff = (a - b) * 255.0
    return float(np.mean(diff * diff))


def psnr(a, b, shave: int = 0) -> float:
    a, b = _as_planes(a, b, shave)
    err = mse8(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / err)


def ssim(a, b, shave: int = 0) -> float:
    a, b = _as_planes(a, b, shave)
    if min(a.shape) < SSIM_WINDOW:
        raise ValueError(
            f"image {a.shape} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window"
        )
    x = a * 255.0
    y = b * 255.0
    total = 0.0
    count = 0
    # Band the sliding view so the (h, w, 8, 8) window tensor stays small.
    n_rows = x.shape[0] - SSIM_WINDOW + 1
    band = max(1, 2_000_000 // (x.shape[1] * SSIM_WINDOW * SSIM_WINDOW))
    for r0 in range(0, n_rows, band):
        r1 = min(r0 + band, n_rows)
        xs = sliding_window_view(
            x[r0 : r1 + SSIM_WINDOW - 1], (SSIM_WINDOW, SSIM_WINDOW)
        )
        ys = sliding_window_view(
            y[r0 : r1 + SSIM_WINDOW - 1], (SSIM_WINDOW, SSIM_WINDOW)
        )
        mu_x = xs.mean(axis=(2, 3))
        mu_y = ys.mean(axis=(2, 3))
        var_x = (xs * xs).mean(axis=(2, 3)) - mu_x * mu_x
        var_y = (ys * ys).mean(axis=(2, 3)) - mu_y * mu_y
        cov = (xs * ys).mean(axis=(2, 3)) - mu_x * mu_y
        num = (2.0 * mu_x * mu_y + _C1) * (2.0 * cov + _C2)
        den = (mu_x * mu_x + mu_y * mu_y + _C1) * (var_x + var_y + _C2)
        local = num / den
        total += float(np.sum(local))
        count += local.size
    return total / count


def quality(a, b, shave: int = 0) -> QualityScore:
    """PSNR, SSIM, and MSE of the shaved comparison in one record."""
    ap, bp = _as_planes(a, b, shave)
    err = mse8(ap, bp)
    p = math.inf if err == 0.0 else 10.0 * math.log10(255.0 ** 2 / err)
    return QualityScore(psnr_db=p, ssim=ssim(ap, bp), mse=err)
