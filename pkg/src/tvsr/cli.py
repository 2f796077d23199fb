"""Command-line interface.

Subcommands:
    upscale <in> <out>          upscale one image through the pipeline
    train <hr_dir> <model_out>  prepare crops from HR images and train a model
    eval <hr_dir>               degrade + upscale + score a ground-truth set
    bench <hr_dir>              bicubic baseline vs full pipeline, side by side

Usage errors exit with status 2 (argparse prints the synopsis); operational
failures print one machine-parsable line ``error: <Kind>: <message>`` on
stderr and exit 1.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import pipeline as pl
from . import srnet
from .config import apply_cli_overrides, load_config
from .errors import TvsrError
from .image import load_image, save_image


def _add_common(sub):
    sub.add_argument("--scale", type=int, default=None, help="magnification factor")
    sub.add_argument("--config", default=None, help="key = value configuration file")
    sub.add_argument("--model", default=None, help="model file for the refine stage")
    sub.add_argument(
        "--stages", default=None, help="comma list from upsample,enhance,refine"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvsr",
        description="Contour-stencil guided single-image super-resolution",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_up = sub.add_parser("upscale", help="upscale a single image")
    p_up.add_argument("input")
    p_up.add_argument("output")
    _add_common(p_up)

    p_tr = sub.add_parser("train", help="train the refinement network")
    p_tr.add_argument("hr_dir")
    p_tr.add_argument("model_out")
    _add_common(p_tr)
    p_tr.add_argument("--seed", type=int, default=None, help="training RNG seed")

    p_ev = sub.add_parser("eval", help="evaluate on a ground-truth directory")
    p_ev.add_argument("hr_dir")
    _add_common(p_ev)
    p_ev.add_argument("--report", default=None, help="write a tab-separated sidecar")
    p_ev.add_argument(
        "--eval-luma",
        choices=("full", pl.STUDIO_LUMA_NOTE),
        default=None,
        help="luma convention for scoring (default: full-range BT.601)",
    )

    p_be = sub.add_parser("bench", help="bicubic baseline vs full pipeline")
    p_be.add_argument("hr_dir")
    _add_common(p_be)
    p_be.add_argument("--report", default=None, help="write a tab-separated sidecar")
    p_be.add_argument("--outdir", default=None, help="write per-image comparison PNGs")
    p_be.add_argument(
        "--eval-luma", choices=("full", pl.STUDIO_LUMA_NOTE), default=None
    )
    return parser


def cli_main(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        pcfg, tcfg, arch, eval_opts = load_config(args.config)
        pcfg = apply_cli_overrides(
            pcfg, scale=args.scale, model=args.model, stages=args.stages
        )
        if getattr(args, "eval_luma", None):
            eval_opts["luma"] = args.eval_luma

        if args.command == "upscale":
            rgb = load_image(args.input)
            save_image(pl.run_pipeline(rgb, pcfg), args.output)
            print(f"wrote {args.output}")
        elif args.command == "train":
            if args.seed is not None:
                tcfg = replace(tcfg, seed=args.seed)
            pairs = pl.prepare_training_set(args.hr_dir, pcfg.scale, pcfg, tcfg)
            print(f"training on {len(pairs)} crops from {args.hr_dir}")
            net = srnet.init_network(srnet.arch_from_id(arch), tcfg.seed, tcfg.init_std)
            net, history = srnet.train(net, pairs, tcfg)
            srnet.save_model(net, args.model_out)
            for epoch, loss in enumerate(history, start=1):
                print(f"epoch {epoch}: mean loss {loss:.8g}")
            print(f"wrote {args.model_out}")
        elif args.command == "eval":
            report = pl.evaluate_dataset(
                args.hr_dir, pcfg, eval_luma=eval_opts["luma"]
            )
            sys.stdout.write(pl.report_text(report))
            if args.report:
                pl.write_sidecar([report], args.report)
                print(f"wrote {args.report}")
        elif args.command == "bench":
            base, full = pl.bench_dataset(
                args.hr_dir, pcfg, out_dir=args.outdir, eval_luma=eval_opts["luma"]
            )
            sys.stdout.write(pl.bench_text(base, full))
            if args.report:
                pl.write_sidecar([base, full], args.report)
                print(f"wrote {args.report}")
        return 0
    except (TvsrError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
