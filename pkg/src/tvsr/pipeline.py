"""End-to-end orchestration: upscale pipeline, training prep, evaluation.

The upscale pipeline runs up to three stages in fixed order on the luma
plane -- ``upsample`` (B-spline by default), ``enhance`` (non-local TV pass),
``refine`` (convolutional network, its valid-convolution output re-embedded
into the center of the enhanced plane) -- while chroma is upsampled with the
Keys bicubic kernel. After every stage the planes are materialized back into
an 8-bit RGB image, exactly what writing and re-reading an intermediate file
would produce; running stages one at a time through files is therefore
bit-identical to running them fused.

Evaluation degrades each ground-truth image with the canonical bicubic
protocol, runs the pipeline, and scores luma-plane PSNR/SSIM against the
ground truth. Reports carry their full configuration so that numbers are
reproducible; a tab-separated sidecar mirrors every row for scripting.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import image as img_mod
from . import metrics, srnet
from .errors import ConfigError, DatasetError, StageError
from .image import center_crop_to_multiple, load_image, rgb_to_luma, luma_to_rgb
from .nonlocal_tv import NonlocalParams, enhance_image
from .resample import BICUBIC_KEYS, KERNEL_NAMES, downsample_lr, resample
from .stencils import StencilBank, default_bank, load_bank

log = logging.getLogger(__name__)

STAGES = ("upsample", "enhance", "refine")
IMAGE_EXTENSIONS = (".png", ".ppm", ".pgm")


@dataclass(frozen=True)
class PipelineConfig:
    scale: int = 2
    upsample_kernel: str = "cubic-bspline"
    nonlocal_params: NonlocalParams = field(default_factory=NonlocalParams)
    stencil_bank_path: str | None = None  # None -> packaged default bank
    model_path: str | None = None
    stages: tuple = STAGES
    final_relu: bool = True
    shave: int | None = None  # None -> scale

    def __post_init__(self):
        if self.scale < 1:
            raise ConfigError("scale must be >= 1 (1 is the identity test mode)")
        if self.upsample_kernel not in KERNEL_NAMES:
            raise ConfigError(
                f"unknown kernel {self.upsample_kernel!r}; choose from {sorted(KERNEL_NAMES)}"
            )
        if not self.stages:
            raise ConfigError("at least one stage required")
        unknown = [s for s in self.stages if s not in STAGES]
        if unknown:
            raise ConfigError(f"unknown stages {unknown}; valid: {list(STAGES)}")
        ordered = tuple(s for s in STAGES if s in self.stages)
        if ordered != tuple(self.stages):
            raise ConfigError(f"stages must follow pipeline order {list(STAGES)}")
        # refine requiring model_path is checked when the net is loaded, so a
        # default config stays constructible before a model exists

    @property
    def eval_shave(self) -> int:
        return self.scale if self.shave is None else self.shave


@dataclass(frozen=True)
class EvalRow:
    image: str
    method: str
    score: metrics.QualityScore


@dataclass
class EvalReport:
    dataset: str
    scale: int
    shave: int
    rows: list
    mean_psnr: float
    mean_ssim: float
    mean_mse: float
    config_echo: dict


def _load_bank(cfg: PipelineConfig) -> StencilBank:
    if cfg.stencil_bank_path:
        return load_bank(cfg.stencil_bank_path)
    return default_bank()


def _load_net(cfg: PipelineConfig):
    if cfg.model_path is None:
        raise ConfigError("refine stage requires model_path")
    return srnet.load_model(cfg.model_path)


def run_pipeline(lr_rgb, cfg: PipelineConfig, bank=None, net=None):
    """Upscale an RGB image through the configured stages.

    Planes are re-materialized to 8-bit RGB after every stage (see module
    docstring); stage failures are re-raised as StageError naming the stage.
    """
    rgb = np.asarray(lr_rgb, dtype=np.uint8)
    if "enhance" in cfg.stages and bank is None:
        bank = _load_bank(cfg)
    if "refine" in cfg.stages and net is None:
        net = _load_net(cfg)

    if "upsample" in cfg.stages:
        try:
            y, cb, cr = rgb_to_luma(rgb)
            kernel = KERNEL_NAMES[cfg.upsample_kernel]
            y = resample(y, cfg.scale, kernel)
            cb = resample(cb, cfg.scale, BICUBIC_KEYS)
            cr = resample(cr, cfg.scale, BICUBIC_KEYS)
            rgb = luma_to_rgb(y, cb, cr)
        except Exception as exc:
            raise StageError("upsample", exc) from exc

    if "enhance" in cfg.stages:
        try:
            y, cb, cr = rgb_to_luma(rgb)
            y = enhance_image(y, bank, cfg.nonlocal_params)
            rgb = luma_to_rgb(y, cb, cr)
        except Exception as exc:
            raise StageError("enhance", exc) from exc

    if "refine" in cfg.stages:
        try:
            y, cb, cr = rgb_to_luma(rgb)
            core = srnet.forward(net, y, cfg.final_relu)
            margin = net.total_shrink // 2
            refined = y.copy()
            refined[margin : margin + core.shape[0], margin : margin + core.shape[1]] = core
            rgb = luma_to_rgb(np.clip(refined, 0.0, 1.0), cb, cr)
        except StageError:
            raise
        except Exception as exc:
            raise StageError("refine", exc) from exc

    return rgb


def degrade_rgb(hr_rgb, scale: int):
    """Make the 8-bit LR input: per-channel bicubic downsampling + rounding.

    The HR image must already be cropped to scale-divisible dimensions.
    scale = 1 returns the input unchanged.
    """
    rgb = np.asarray(hr_rgb, dtype=np.uint8)
    if scale == 1:
        return rgb.copy()
    planes = []
    for ch in range(3):
        lowres = downsample_lr(rgb[:, :, ch].astype(np.float64) / 255.0, scale)
        planes.append(np.floor(np.clip(lowres * 255.0, 0.0, 255.0) + 0.5))
    return np.stack(planes, axis=2).astype(np.uint8)


def _sorted_images(directory):
    try:
        names = sorted(os.listdir(directory))
    except FileNotFoundError:
        raise DatasetError(f"dataset directory not found: {directory}") from None
    names = [n for n in names if os.path.splitext(n)[1].lower() in IMAGE_EXTENSIONS]
    if not names:
        raise DatasetError(f"no images (png/ppm/pgm) in {directory}")
    return names


def prepare_training_set(hr_dir, scale: int, cfg: PipelineConfig, train_cfg=None):
    """Aligned (input, target) luma crops from every readable HR image.

    Each HR image is center-cropped to scale-divisible size, degraded,
    processed through the configured non-refine stages, and tiled into
    sub_image crops at the configured stride (targets come from the HR luma
    at the same coordinates). Unreadable images are skipped with a warning.
    """
    train_cfg = train_cfg or srnet.TrainConfig()
    prep_cfg = replace(
        cfg, stages=tuple(s for s in cfg.stages if s != "refine") or ("upsample",)
    )
    bank = _load_bank(prep_cfg) if "enhance" in prep_cfg.stages else None
    sub, stride = train_cfg.sub_image, train_cfg.stride
    pairs = []
    skipped = 0
    for name in _sorted_images(hr_dir):
        path = os.path.join(hr_dir, name)
        try:
            hr = load_image(path)
        except Exception as exc:
            log.warning("skipping unreadable image %s: %s", path, exc)
            skipped += 1
            continue
        hr = center_crop_to_multiple(hr, scale)
        lr = degrade_rgb(hr, scale)
        staged = run_pipeline(lr, prep_cfg, bank=bank)
        input_plane = rgb_to_luma(staged)[0]
        target_plane = rgb_to_luma(hr)[0]
        h, w = input_plane.shape
        for i in range(0, h - sub + 1, stride):
            for j in range(0, w - sub + 1, stride):
                pairs.append(
                    (
                        input_plane[i : i + sub, j : j + sub].copy(),
                        target_plane[i : i + sub, j : j + sub].copy(),
                    )
                )
    if skipped:
        log.warning("skipped %d unreadable image(s) in %s", skipped, hr_dir)
    if not pairs:
        raise DatasetError(f"no usable training crops found in {hr_dir}")
    return pairs


STUDIO_LUMA_NOTE = "bt601-studio"


def _eval_luma(rgb, convention: str):
    if convention == "full":
        return rgb_to_luma(rgb)[0]
    if convention == STUDIO_LUMA_NOTE:
        # ITU-R BT.601 studio swing (16..235), the convention most published
        # super-resolution tables use; offered for protocol parity.
        arr = rgb.astype(np.float64) / 255.0
        y = (
            16.0
            + 65.481 * arr[:, :, 0]
            + 128.553 * arr[:, :, 1]
            + 24.966 * arr[:, :, 2]
        ) / 255.0
        return np.clip(y, 0.0, 1.0)
    raise ConfigError(f"unknown eval luma convention {convention!r}")


def evaluate_dataset(
    test_dir,
    cfg: PipelineConfig,
    method: str = "tvsr",
    eval_luma: str = "full",
) -> EvalReport:
    """Degrade, upscale, and score every image of a ground-truth directory."""
    bank = _load_bank(cfg) if "enhance" in cfg.stages else None
    net = _load_net(cfg) if "refine" in cfg.stages else None
    shave = cfg.eval_shave
    rows = []
    for name in _sorted_images(test_dir):
        hr = load_image(os.path.join(test_dir, name))
        hr = center_crop_to_multiple(hr, cfg.scale)
        lr = degrade_rgb(hr, cfg.scale)
        sr = run_pipeline(lr, cfg, bank=bank, net=net)
        score = metrics.quality(
            _eval_luma(sr, eval_luma), _eval_luma(hr, eval_luma), shave
        )
        rows.append(EvalRow(image=name, method=method, score=score))

    echo = {
        "stages": ",".join(cfg.stages),
        "kernel": cfg.upsample_kernel,
        "bank": (bank.version if bank else "-"),
        "arch": (net.arch_id if net else "-"),
        "eval_luma": eval_luma,
        "nonlocal": (
            f"patch={cfg.nonlocal_params.patch_size},window={cfg.nonlocal_params.window},"
            f"mm={cfg.nonlocal_params.mm},sigma={cfg.nonlocal_params.sigma:.10g},"
            f"blend={cfg.nonlocal_params.blend:.10g}"
        ),
    }
    return EvalReport(
        dataset=os.path.basename(os.path.normpath(os.fspath(test_dir))),
        scale=cfg.scale,
        shave=shave,
        rows=rows,
        mean_psnr=_mean(r.score.psnr_db for r in rows),
        mean_ssim=_mean(r.score.ssim for r in rows),
        mean_mse=_mean(r.score.mse for r in rows),
        config_echo=echo,
    )


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values)


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.10g}"


def report_text(report: EvalReport) -> str:
    lines = [
        f"dataset: {report.dataset}   scale: x{report.scale}   shave: {report.shave}",
        "config: " + "  ".join(f"{k}={v}" for k, v in report.config_echo.items()),
        f"{'image':<28} {'method':<10} {'psnr_db':>10} {'ssim':>8} {'mse':>12}",
    ]
    for row in report.rows:
        s = row.score
        lines.append(
            f"{row.image:<28} {row.method:<10} "
            f"{_fmt(s.psnr_db):>10} {s.ssim:>8.4f} {_fmt(s.mse):>12}"
        )
    lines.append(
        f"{'mean':<28} {'':<10} "
        f"{_fmt(report.mean_psnr):>10} {report.mean_ssim:>8.4f} {_fmt(report.mean_mse):>12}"
    )
    return "\n".join(lines) + "\n"


def sidecar_lines(reports) -> str:
    """Tab-separated records mirroring one or more reports, plus aggregates."""
    reports = list(reports)
    head = reports[0]
    lines = [
        "# tvsr evaluation sidecar",
        f"# dataset={head.dataset}\tscale={head.scale}\tshave={head.shave}",
    ]
    for rep in reports:
        lines.append(
            "# config:" + "".join(f"\t{k}={v}" for k, v in rep.config_echo.items())
        )
    lines.append("image\tmethod\tscale\tpsnr_db\tssim\tmse")
    for rep in reports:
        for row in rep.rows:
            s = row.score
            lines.append(
                f"{row.image}\t{row.method}\t{rep.scale}\t"
                f"{_fmt(s.psnr_db)}\t{_fmt(s.ssim)}\t{_fmt(s.mse)}"
            )
        lines.append(
            f"mean\t{rep.rows[0].method}\t{rep.scale}\t"
            f"{_fmt(rep.mean_psnr)}\t{_fmt(rep.mean_ssim)}\t{_fmt(rep.mean_mse)}"
        )
    return "\n".join(lines) + "\n"


def write_sidecar(reports, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(sidecar_lines(reports))


def bench_dataset(test_dir, cfg: PipelineConfig, out_dir=None, eval_luma: str = "full"):
    """Bicubic-upsample baseline vs the configured pipeline, side by side.

    Returns (baseline_report, pipeline_report). With out_dir set, writes the
    upscaled images of both methods for visual comparison.
    """
    base_cfg = replace(
        cfg, stages=("upsample",), upsample_kernel="bicubic-keys", model_path=None
    )
    base = evaluate_dataset(test_dir, base_cfg, method="bicubic", eval_luma=eval_luma)
    full = evaluate_dataset(test_dir, cfg, method="tvsr", eval_luma=eval_luma)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        bank = _load_bank(cfg) if "enhance" in cfg.stages else None
        net = _load_net(cfg) if "refine" in cfg.stages else None
        for name in _sorted_images(test_dir):
            hr = load_image(os.path.join(test_dir, name))
            hr = center_crop_to_multiple(hr, cfg.scale)
            lr = degrade_rgb(hr, cfg.scale)
            stem = os.path.splitext(name)[0]
            img_mod.save_image(
                run_pipeline(lr, base_cfg), os.path.join(out_dir, f"{stem}_bicubic.png")
            )
            img_mod.save_image(
                run_pipeline(lr, cfg, bank=bank, net=net),
                os.path.join(out_dir, f"{stem}_tvsr.png"),
            )
    return base, full


def bench_text(base: EvalReport, full: EvalReport) -> str:
    lines = [
        f"dataset: {base.dataset}   scale: x{base.scale}   shave: {base.shave}",
        f"pipeline config: " + "  ".join(f"{k}={v}" for k, v in full.config_echo.items()),
        f"{'image':<28} {'bicubic psnr':>13} {'tvsr psnr':>13} {'bicubic ssim':>13} {'tvsr ssim':>11}",
    ]
    for b, f in zip(base.rows, full.rows):
        lines.append(
            f"{b.image:<28} {_fmt(b.score.psnr_db):>13} {_fmt(f.score.psnr_db):>13} "
            f"{b.score.ssim:>13.4f} {f.score.ssim:>11.4f}"
        )
    lines.append(
        f"{'mean':<28} {_fmt(base.mean_psnr):>13} {_fmt(full.mean_psnr):>13} "
        f"{base.mean_ssim:>13.4f} {full.mean_ssim:>11.4f}"
    )
    return "\n".join(lines) + "\n"
