"""Plain-text configuration files: ``key = value`` lines with dotted keys.

Example::

    # pipeline
    scale = 2
    upsample_kernel = cubic-bspline
    stages = upsample,enhance,refine
    model_path = model.tvsrnet
    nonlocal.sigma = 2.718281828459045
    nonlocal.blend = 1.0
    train.learning_rates = 1e-4,1e-4,1e-5
    train.epochs = 10
    train.seed = 7

Unknown keys are hard errors so typos surface immediately. ``#`` starts a
comment; blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import replace

from .errors import ConfigError
from .nonlocal_tv import NonlocalParams
from .pipeline import PipelineConfig
from .srnet import DEFAULT_ARCH, TrainConfig


def _as_bool(text):
    low = text.lower()
    if low in ("true", "1", "on", "yes"):
        return True
    if low in ("false", "0", "off", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _as_rates(text):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"expected 3 comma-separated rates, got {text!r}")
    return tuple(parts)


_PIPELINE_KEYS = {
    "scale": int,
    "upsample_kernel": str,
    "stencil_bank_path": str,
    "model_path": str,
    "stages": lambda t: tuple(s.strip() for s in t.split(",") if s.strip()),
    "shave": int,
    "final_relu": _as_bool,
}

_NONLOCAL_KEYS = {
    "patch_size": int,
    "window": int,
    "mm": int,
    "sigma": float,
    "blend": float,
}

_TRAIN_KEYS = {
    "learning_rates": _as_rates,
    "epochs": int,
    "batch_size": int,
    "sub_image": int,
    "stride": int,
    "seed": int,
    "init_std": float,
    "final_relu": _as_bool,
    "arch": str,
}

_EVAL_KEYS = {"luma": str}


def parse_config_text(text: str):
    """Parse config file contents into plain {key: parsed value} dicts."""
    pipeline, nl, train, ev = {}, {}, {}, {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            if key.startswith("nonlocal."):
                sub = key[len("nonlocal.") :]
                nl[sub] = _NONLOCAL_KEYS[sub](value)
            elif key.startswith("train."):
                sub = key[len("train.") :]
                train[sub] = _TRAIN_KEYS[sub](value)
            elif key.startswith("eval."):
                sub = key[len("eval.") :]
                ev[sub] = _EVAL_KEYS[sub](value)
            else:
                pipeline[key] = _PIPELINE_KEYS[key](value)
        except KeyError:
            raise ConfigError(f"line {line_no}: unknown configuration key {key!r}") from None
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {line_no}: bad value for {key!r}: {exc}") from None
    return pipeline, nl, train, ev


def load_config(path=None):
    """Build (PipelineConfig, TrainConfig, arch_id, eval options) from a file.

    With path None, everything is at its default.
    """
    if path is None:
        return PipelineConfig(), TrainConfig(), DEFAULT_ARCH, {"luma": "full"}
    with open(path, "r", encoding="utf-8") as fh:
        pipeline_kw, nl_kw, train_kw, eval_kw = parse_config_text(fh.read())
    nonlocal_params = NonlocalParams(**nl_kw) if nl_kw else NonlocalParams()
    arch = train_kw.pop("arch", DEFAULT_ARCH)
    pcfg = PipelineConfig(nonlocal_params=nonlocal_params, **pipeline_kw)
    tcfg = TrainConfig(**train_kw)
    ev = {"luma": "full"}
    ev.update(eval_kw)
    return pcfg, tcfg, arch, ev


def apply_cli_overrides(pcfg: PipelineConfig, scale=None, model=None, stages=None):
    """Overlay the common CLI flags on a pipeline config."""
    updates = {}
    if scale is not None:
        updates["scale"] = scale
    if model is not None:
        updates["model_path"] = model
    if stages is not None:
        updates["stages"] = tuple(s.strip() for s in stages.split(",") if s.strip())
    return replace(pcfg, **updates) if updates else pcfg
