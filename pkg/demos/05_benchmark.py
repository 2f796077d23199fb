"""Benchmark harness: bicubic baseline vs the full pipeline.

Creates a small ground-truth directory from real photos, trains a quick
refiner, and prints the side-by-side PSNR/SSIM table the `tvsr bench`
subcommand produces. Expect a few minutes of runtime.
"""

import os
import tempfile
from dataclasses import replace

import numpy as np

from tvsr import (
    NonlocalParams,
    PipelineConfig,
    TrainConfig,
    arch_from_id,
    init_network,
    prepare_training_set,
    save_image,
    save_model,
    train,
)
from tvsr.pipeline import bench_dataset, bench_text, write_sidecar

try:
    import skimage.data as skd
except ImportError:
    raise SystemExit("this demo needs scikit-image for its sample photos")


def to_rgb(a):
    if a.ndim == 2:
        a = np.repeat(a[:, :, None], 3, axis=2)
    return a[:, :, :3]


with tempfile.TemporaryDirectory() as work:
    train_dir = os.path.join(work, "train")
    test_dir = os.path.join(work, "test")
    os.makedirs(train_dir)
    os.makedirs(test_dir)
    for name, off in (("moon", 100), ("camera", 150), ("grass", 50)):
        img = to_rgb(getattr(skd, name)())
        save_image(img[off : off + 128, off : off + 128].astype(np.uint8),
                   os.path.join(train_dir, name + ".png"))
    for name, off in (("clock", 60), ("chelsea", 60), ("rocket", 100)):
        img = to_rgb(getattr(skd, name)())
        save_image(img[off : off + 128, off : off + 128].astype(np.uint8),
                   os.path.join(test_dir, name + ".png"))

    nl = NonlocalParams(blend=0.15)
    cfg = PipelineConfig(scale=2, stages=("upsample", "enhance"), nonlocal_params=nl)
    tcfg = TrainConfig(learning_rates=(0.1, 0.1, 0.01), epochs=60,
                       batch_size=16, seed=42, init_std=0.1)
    print("preparing crops and training a quick refiner (about 2 minutes)...")
    pairs = prepare_training_set(train_dir, 2, cfg, tcfg)
    net = init_network(arch_from_id("9-1-5/16-8"), tcfg.seed, tcfg.init_std)
    net, history = train(net, pairs, tcfg)
    print(f"loss {history[0]:.5f} -> {history[-1]:.6f} over {len(history)} epochs\n")

    model_path = os.path.join(work, "demo.tvsrnet")
    save_model(net, model_path)
    full_cfg = replace(cfg, stages=("upsample", "enhance", "refine"),
                       model_path=model_path)
    out_dir = os.path.join(work, "bench_out")
    base, full = bench_dataset(test_dir, full_cfg, out_dir=out_dir)
    print(bench_text(base, full))
    sidecar = os.path.join(work, "bench.tsv")
    write_sidecar([base, full], sidecar)
    print("sidecar records:")
    with open(sidecar) as fh:
        for line in fh:
            if not line.startswith("#"):
                print("  " + line.rstrip())
    print(f"\ncomparison images: {sorted(os.listdir(out_dir))[:4]} ...")
