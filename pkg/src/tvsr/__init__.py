"""Contour-stencil guided single-image super-resolution toolkit.

The pipeline upsamples the luma plane with a prefiltered cubic B-spline,
sharpens it with a non-local pass weighted by contour-stencil similarity, and
refines the result with a small three-layer convolutional network trained
from scratch. PSNR/SSIM metrics and a benchmark harness round out the kit.
"""

from .image import (
    center_crop_to_multiple,
    crop_border,
    load_image,
    luma_to_rgb,
    rgb_to_luma,
    save_image,
)
from .metrics import QualityScore, mse8, psnr, quality, ssim
from .nonlocal_tv import (
    Candidate,
    NonlocalParams,
    enhance_image,
    normalize_weights,
    restore_pixel,
    search_similar,
    similarity,
)
from .pipeline import (
    EvalReport,
    EvalRow,
    PipelineConfig,
    bench_dataset,
    degrade_rgb,
    evaluate_dataset,
    prepare_training_set,
    run_pipeline,
)
from .resample import (
    BICUBIC_KEYS,
    CUBIC_BSPLINE,
    ResampleKernel,
    bspline_prefilter,
    bspline_weight,
    downsample_lr,
    keys_weight,
    resample,
)
from .rng import SplitMix64
from .srnet import (
    ConvLayer,
    LayerSpec,
    SrNetwork,
    TrainConfig,
    arch_from_id,
    backward,
    forward,
    init_network,
    load_model,
    mse_loss,
    save_model,
    sgd_step,
    train,
)
from .stencils import (
    StencilBank,
    StencilSignature,
    StencilTemplate,
    build_default_bank,
    default_bank,
    load_bank,
    signature,
    signature_distance,
    stencil_response,
)

__version__ = "0.1.0"
