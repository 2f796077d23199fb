"""Non-local restoration guided by contour-stencil signatures.

Every pixel is re-estimated as a convex combination of the center values of
the most similar patches inside a search window. Patch similarity is the
Euclidean distance between stencil signatures (see ``stencils``), mapped to a
weight through

    s(d) = exp(-d^2 / sigma) / ln(sigma)          (sigma > 1)

and normalized to sum to one, so the 1/ln(sigma) factor cancels and only the
relative distances matter. The reference patch always participates with
distance 0, which keeps the estimator well defined when nothing else in the
window resembles it. A blend parameter mixes the restored value with the
original pixel (blend = 1 is pure restoration).

The image-wide pass (``enhance_image``) is an exact, vectorized equivalent of
calling ``search_similar`` + ``restore_pixel`` per pixel on the
reflection-padded image: accumulation orders match, candidate ties break by
row-major scan order in both, and weights go through the same scalar code, so
the two routes agree bit for bit. Output pixels are independent; the pass is
deterministic and could be row-parallelized without changing any bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .stencils import (
    FOOTPRINT,
    StencilBank,
    signature,
    signature_distance,
)


@dataclass(frozen=True)
class NonlocalParams:
    """Knobs for the non-local pass.

    patch_size: odd side of the compared patches (>= 5, the stencil footprint)
    window:     odd side of the search window, >= patch_size
    mm:         number of retained candidates, including the pixel itself
    sigma:      similarity scale; must exceed 1 so ln(sigma) > 0
    blend:      0..1 mix between original (0) and restored (1) value
    """

    patch_size: int = 7
    window: int = 21
    mm: int = 10
    sigma: float = math.e
    blend: float = 1.0

    def __post_init__(self):
        if self.patch_size % 2 == 0 or self.window % 2 == 0:
            raise ValueError("patch_size and window must be odd")
        if self.patch_size < FOOTPRINT:
            raise ValueError(f"patch_size must be >= {FOOTPRINT} (stencil footprint)")
        if self.patch_size > self.window:
            raise ValueError("patch_size must not exceed window")
        if self.mm < 1:
            raise ValueError("mm must be >= 1")
        if not self.sigma > 1.0:
            raise ValueError("sigma must exceed 1")
        if not 0.0 <= self.blend <= 1.0:
            raise ValueError("blend must lie in [0, 1]")


class Candidate(NamedTuple):
    center_value: float
    distance: float


def similarity(distance: float, sigma: float) -> float:
    """exp(-d^2/sigma) / ln(sigma); positive for every finite distance."""
    if not sigma > 1.0:
        raise ValueError(f"sigma must exceed 1 (got {sigma}); ln(sigma) must be positive")
    if distance < 0.0:
        raise ValueError("distance must be non-negative")
    return math.exp(-(distance * distance) / sigma) / math.log(sigma)


def normalize_weights(sims) -> list:
    """Scale positive similarities so they sum to one."""
    sims = list(sims)
    if not sims:
        raise ValueError("empty similarity list")
    total = 0.0
    for s in sims:
        if not s > 0.0:
            raise ValueError(f"similarities must be positive, got {s}")
        total += s
    return [s / total for s in sims]


def restore_pixel(cands, params: NonlocalParams) -> float:
    """Weighted average of candidate center values; candidate 0 is self.

    The raw average is computed relative to the self value and pinned to the
    candidate value hull, which makes the pass exact on constant inputs and
    keeps the convex-combination property under floating-point rounding.
    """
    if not cands:
        raise ValueError("no candidates to restore from")
    sims = [similarity(c.distance, params.sigma) for c in cands]
    weights = normalize_weights(sims)
    self_value = cands[0].center_value
    restored = self_value
    lo = hi = self_value
    for w, cand in zip(weights, cands):
        restored += w * (cand.center_value - self_value)
        if cand.center_value < lo:
            lo = cand.center_value
        elif cand.center_value > hi:
            hi = cand.center_value
    restored = min(max(restored, lo), hi)
    out = params.blend * restored + (1.0 - params.blend) * self_value
    return min(max(out, 0.0), 1.0)


def search_similar(img, center, bank: StencilBank, params: NonlocalParams):
    """Candidates for one pixel: self first, then the most similar patches.

    Scans every full-patch center inside the window (clipped to the valid
    area), scores it by signature distance to the reference patch, and keeps
    the params.mm best. Ties break by row-major scan order. The caller is
    expected to reflection-pad the image so interesting centers are valid.
    """
    arr = np.asarray(img, dtype=np.float64)
    h, w = arr.shape
    r_patch = params.patch_size // 2
    ci, cj = center
    if not (r_patch <= ci < h - r_patch and r_patch <= cj < w - r_patch):
        raise ValueError(
            f"center {center} closer than {r_patch} pixels to a border of {h}x{w}"
        )
    half = FOOTPRINT // 2
    r_win = params.window // 2
    ref = signature(arr[ci - half : ci + half + 1, cj - half : cj + half + 1], bank)
    scored = []
    for i in range(max(ci - r_win, r_patch), min(ci + r_win, h - 1 - r_patch) + 1):
        for j in range(max(cj - r_win, r_patch), min(cj + r_win, w - 1 - r_patch) + 1):
            if i == ci and j == cj:
                continue
            sig = signature(arr[i - half : i + half + 1, j - half : j + half + 1], bank)
            scored.append(Candidate(float(arr[i, j]), signature_distance(ref, sig)))
    scored.sort(key=lambda c: c.distance)  # stable: scan order breaks ties
    return [Candidate(float(arr[ci, cj]), 0.0)] + scored[: params.mm - 1]


def _signature_field(padded: np.ndarray, pad: int, shape, bank: StencilBank):
    """Responses of all 24 templates at every original pixel position.

    Per-template accumulation follows the template's pair order, matching
    stencil_response exactly.
    """
    h, w = shape
    field = np.zeros((len(bank.templates), h, w))
    for t_idx, template in enumerate(bank.templates):
        plane = field[t_idx]
        for ra, ca, rb, cb, weight in template.pairs:
            a = padded[pad + ra : pad + ra + h, pad + ca : pad + ca + w]
            b = padded[pad + rb : pad + rb + h, pad + cb : pad + cb + w]
            plane += weight * np.abs(a - b)
    return field


def enhance_image(img, bank: StencilBank, params: NonlocalParams) -> np.ndarray:
    """Apply the non-local restoration to every pixel of a luma plane."""
    arr = np.asarray(img, dtype=np.float64)
    h, w = arr.shape
    if h < params.window or w < params.window:
        raise ValueError(
            f"image {h}x{w} smaller than the {params.window}x{params.window} search window"
        )
    pad = params.patch_size // 2
    padded = np.pad(arr, pad, mode="symmetric")
    field = _signature_field(padded, pad, (h, w), bank)
    n_ch = field.shape[0]

    r_win = params.window // 2
    offsets = [(du, dv) for du in range(-r_win, r_win + 1) for dv in range(-r_win, r_win + 1)]
    self_idx = offsets.index((0, 0))
    n_off = len(offsets)
    mm = min(params.mm, n_off)

    out = np.empty_like(arr)
    # Row bands bound the (n_off, band, w) distance buffer to ~50 MB.
    band = max(1, int(6_000_000 // (n_off * max(w, 1))))
    col_idx = np.arange(w)
    for r0 in range(0, h, band):
        r1 = min(r0 + band, h)
        rows = r1 - r0
        dist = np.full((n_off, rows, w), np.inf)
        for o_idx, (du, dv) in enumerate(offsets):
            rs0, rs1 = max(r0, -du), min(r1, h - du)
            cs0, cs1 = max(0, -dv), min(w, w - dv)
            if rs0 >= rs1 or cs0 >= cs1:
                continue
            acc = np.zeros((rs1 - rs0, cs1 - cs0))
            for ch in range(n_ch):
                diff = (
                    field[ch, rs0:rs1, cs0:cs1]
                    - field[ch, rs0 + du : rs1 + du, cs0 + dv : cs1 + dv]
                )
                acc += diff * diff
            dist[o_idx, rs0 - r0 : rs1 - r0, cs0:cs1] = np.sqrt(acc)
        # Self participates with a sentinel below any true distance so it is
        # always selected first; its recorded distance is 0.
        dist[self_idx] = -1.0

        # mm rounds of first-occurrence argmin = smallest distances with
        # ties broken by scan order, identical to search_similar's sort.
        row_idx = np.arange(rows)[:, None]
        sel_off = np.empty((mm, rows, w), dtype=np.int64)
        sel_dist = np.empty((mm, rows, w))
        for rank in range(mm):
            pick = np.argmin(dist, axis=0)
            sel_off[rank] = pick
            sel_dist[rank] = np.take_along_axis(dist, pick[None], axis=0)[0]
            dist[pick, row_idx, col_idx[None, :]] = np.inf
        sel_dist[0] = 0.0

        for i in range(rows):
            gi = r0 + i
            for j in range(w):
                cands = []
                for rank in range(mm):
                    d = sel_dist[rank, i, j]
                    if d == np.inf:
                        break
                    du, dv = offsets[sel_off[rank, i, j]]
                    cands.append(Candidate(float(arr[gi + du, j + dv]), float(d)))
                out[gi, j] = restore_pixel(cands, params)
    return out
