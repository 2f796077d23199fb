"""Non-local TV enhancement: similarity weighting and the blend knob.

Restores an upsampled photo with the stencil-guided non-local pass at several
blend strengths and reports the PSNR effect of each setting.
"""

import math

import numpy as np

from tvsr import (
    BICUBIC_KEYS,
    CUBIC_BSPLINE,
    NonlocalParams,
    default_bank,
    downsample_lr,
    enhance_image,
    normalize_weights,
    psnr,
    resample,
    similarity,
)

print("== similarity curve (sigma = e, so ln sigma = 1) ==")
for d in (0.0, 0.25, 0.5, 1.0, 2.0):
    print(f"  distance {d:4.2f} -> similarity {similarity(d, math.e):.4f}")
print()

print("== weights for a candidate set ==")
dists = [0.0, 0.3, 0.3, 1.2, 2.5]
sims = [similarity(d, math.e) for d in dists]
weights = normalize_weights(sims)
for d, w in zip(dists, weights):
    print(f"  distance {d:4.2f} -> weight {w:.4f}")
print(f"  sum = {sum(weights):.15f}")
print()

try:
    from skimage.data import moon
except ImportError:
    raise SystemExit(0)

bank = default_bank()
hr = moon().astype(np.float64) / 255.0
hr = hr[100:228, 100:228]
lr = downsample_lr(hr, 2)
up = resample(lr, 2.0, CUBIC_BSPLINE)
base = psnr(up, hr, shave=2)
print(f"== enhancing a x2 B-spline upsample of 'moon' (input {base:.3f} dB) ==")
for blend in (0.0, 0.15, 0.3, 0.6, 1.0):
    out = enhance_image(up, bank, NonlocalParams(blend=blend))
    print(f"  blend {blend:4.2f}: {psnr(out, hr, shave=2):.3f} dB")
print()
print("Small blends denoise interpolation artifacts gently; blend = 1.0")
print("replaces every pixel by its non-local average and over-smooths, which")
print("is exactly the regime the refinement network is trained to correct.")
