"""Command-line frontend: estimate, whitebalance, build-bank, bank-stats,
augment, tta-median, crop-bbox, metrics.

Every command is a deterministic function of its arguments and input bytes.
Randomized commands take an explicit --seed (default 0, never wall clock)
and derive per-output streams from it, so reruns and any --threads value
produce byte-identical output trees. Exit codes: 0 success, 1 domain error
(degenerate image, empty mask, single-class labels), 2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import imgio
from .augment import (
    AugmentationPlan,
    GammaSamplerConfig,
    GeometricConfig,
    apply_plan,
    apply_plan_to_mask,
    crop_bbox,
    make_plan,
    tta_median,
)
from .bank import IlluminantBank, bank_lab_projection, bank_summary, build_bank, load_bank, save_bank
from .color import ImageBuffer, von_kries_correct
from .constancy import EstimatorConfig, estimate_illuminant
from .errors import BankFormatError, DomainError, ScoreFormatError, UnsupportedImageError
from .metrics import auc, average_precision, read_score_csv, seg_metrics

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def _parse_p(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    return float(text)


def _add_estimator_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=int, default=0, choices=(0, 1, 2),
                     help="Gaussian derivative order (default 0)")
    sub.add_argument("--p", type=_parse_p, default=6.0,
                     help="Minkowski norm order, a float or 'inf' (default 6)")
    sub.add_argument("--sigma", type=float, default=0.0,
                     help="Gaussian smoothing sigma in pixels (default 0; required > 0 when --n > 0)")
    sub.add_argument("--sat-threshold", type=float, default=0.98,
                     help="exclude pixels with any channel at or above this value (default 0.98)")


def _estimator_from_args(args: argparse.Namespace) -> EstimatorConfig:
    return EstimatorConfig(
        deriv_order=args.n,
        minkowski_p=args.p,
        smoothing_sigma=args.sigma,
        saturation_threshold=args.sat_threshold,
    )


def _format_illuminant(tau) -> str:
    return f"{tau.r:.9f} {tau.g:.9f} {tau.b:.9f}"


def cmd_estimate(args: argparse.Namespace) -> int:
    img = imgio.load_image(args.image)
    tau = estimate_illuminant(img, _estimator_from_args(args))
    print(_format_illuminant(tau))
    return 0


def cmd_whitebalance(args: argparse.Namespace) -> int:
    img = imgio.load_image(args.input)
    tau = estimate_illuminant(img, _estimator_from_args(args))
    imgio.save_image(von_kries_correct(img, tau), args.output)
    print(_format_illuminant(tau))
    return 0


def _expand_image_paths(inputs: list[str]) -> list[str]:
    """Files pass through; directories contribute their image files. The
    final list is deduplicated and sorted so bank order never depends on
    argument or directory-listing order."""
    paths: set[str] = set()
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            for child in p.iterdir():
                if child.is_file() and child.suffix.lower() in _IMAGE_SUFFIXES:
                    paths.add(str(child))
        else:
            paths.add(str(p))
    return sorted(paths)


def cmd_build_bank(args: argparse.Namespace) -> int:
    paths = _expand_image_paths(args.inputs)
    if not paths:
        raise DomainError("no input images found")
    loaded: list[tuple[str, ImageBuffer]] = []
    load_failures = 0
    for path in paths:
        try:
            loaded.append((path, imgio.load_image(path)))
        except (OSError, UnsupportedImageError) as exc:
            print(f"warning: skipping {path}: {exc}", file=sys.stderr)
            load_failures += 1
    if not loaded:
        raise DomainError("every input image failed to load")
    bank = build_bank(loaded, _estimator_from_args(args))
    save_bank(bank, args.out)
    built = len(bank.entries)
    print(f"built={built} skipped={len(paths) - built}")
    return 0


def cmd_bank_stats(args: argparse.Namespace) -> int:
    bank = load_bank(args.bank)
    n, mean, spread = bank_summary(bank)
    print(f"n={n}")
    print(f"mean={_format_illuminant(mean)}")
    print(f"spread_deg={spread:.4f}")
    projection = None
    if args.lab_out:
        projection = bank_lab_projection(bank)
        with open(args.lab_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("id,L,a,b\n")
            for entry_id, lab in projection:
                fh.write(f"{entry_id},{lab.L:.9f},{lab.a:.9f},{lab.b:.9f}\n")
    if args.plot_out:
        from .plotting import save_lab_scatter

        projection = projection or bank_lab_projection(bank)
        colors = []
        for entry in bank.entries:
            v = entry.illuminant.as_array()
            colors.append(v / v.max())
        save_lab_scatter([lab for _, lab in projection], args.plot_out,
                         colors=np.array(colors))
    return 0


def _plan_record(index: int, output: str, mask_output, plan: AugmentationPlan) -> dict:
    tau = plan.illuminant
    return {
        "index": index,
        "output": output,
        "mask_output": mask_output,
        "illuminant": [tau.r, tau.g, tau.b],
        "gamma": plan.gamma,
        "rotation_deg": plan.rotation_deg,
        "flip_h": plan.flip_h,
        "flip_v": plan.flip_v,
        "translation": list(plan.translation),
        "scale": plan.scale,
        "elastic_alpha": plan.elastic_alpha,
        "elastic_sigma": plan.elastic_sigma,
        "elastic_field_seed": plan.elastic_field_seed,
    }


def _augment_one_input(
    input_index: int,
    image_path: str,
    mask_path,
    bank: IlluminantBank,
    gamma_cfg: GammaSamplerConfig,
    geo_cfg: GeometricConfig,
    args: argparse.Namespace,
) -> dict:
    """Worker for one input image; returns its manifest fragment.

    All randomness is derived from (seed, global output index), so any
    assignment of inputs to threads yields the same bytes.
    """
    img = imgio.load_image(image_path)
    mask = None
    if mask_path is not None:
        mask = imgio.load_mask(mask_path)
        if mask.shape != (img.height, img.width):
            raise ValueError(
                f"mask {mask_path} is {mask.shape}, image {image_path} is "
                f"{(img.height, img.width)}"
            )
    tau = estimate_illuminant(img, bank.estimator)
    wb = von_kries_correct(img, tau)

    out_dir = Path(args.out_dir)
    stem = Path(image_path).stem
    plans = []
    for k in range(args.count):
        index = input_index * args.count + k
        plan = make_plan(bank, gamma_cfg, geo_cfg, args.seed, index, (img.height, img.width))
        out_name = f"{input_index:04d}_{stem}_aug{k:03d}.png"
        imgio.save_image(apply_plan(wb, plan), out_dir / out_name)
        mask_name = None
        if mask is not None:
            mask_name = f"{input_index:04d}_{stem}_aug{k:03d}_mask.png"
            imgio.save_mask(apply_plan_to_mask(mask, plan), out_dir / mask_name)
        plans.append(_plan_record(index, out_name, mask_name, plan))
    return {
        "input": image_path,
        "mask": mask_path,
        "estimated_illuminant": [tau.r, tau.g, tau.b],
        "outputs": plans,
    }


def cmd_augment(args: argparse.Namespace) -> int:
    if args.count < 1:
        raise ValueError(f"--count must be >= 1, got {args.count}")
    if args.threads < 1:
        raise ValueError(f"--threads must be >= 1, got {args.threads}")
    masks = args.mask or []
    if masks and len(masks) != len(args.inputs):
        raise ValueError(
            f"got {len(masks)} --mask flags for {len(args.inputs)} inputs; "
            "pass either none or one per input, in order"
        )
    bank = load_bank(args.bank)
    gamma_cfg = GammaSamplerConfig(mean=args.gamma_mean, stddev=args.gamma_std)
    geo_cfg = GeometricConfig(
        rotation_range=args.rotation_range,
        flip_h=args.flip_h,
        flip_v=args.flip_v,
        translate_frac=args.translate_frac,
        scale_range=(args.scale_min, args.scale_max),
        elastic_alpha=args.elastic_alpha,
        elastic_sigma=args.elastic_sigma,
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = [
        (i, path, masks[i] if masks else None)
        for i, path in enumerate(args.inputs)
    ]
    if args.threads == 1:
        fragments = [
            _augment_one_input(i, path, mk, bank, gamma_cfg, geo_cfg, args)
            for i, path, mk in jobs
        ]
    else:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            futures = [
                pool.submit(_augment_one_input, i, path, mk, bank, gamma_cfg, geo_cfg, args)
                for i, path, mk in jobs
            ]
            fragments = [f.result() for f in futures]

    manifest = {
        "seed": args.seed,
        "count": args.count,
        "bank": args.bank,
        "estimator": {
            "deriv_order": bank.estimator.deriv_order,
            "minkowski_p": "inf" if math.isinf(bank.estimator.minkowski_p)
            else bank.estimator.minkowski_p,
            "smoothing_sigma": bank.estimator.smoothing_sigma,
            "saturation_threshold": bank.estimator.saturation_threshold,
        },
        "gamma": {"mean": gamma_cfg.mean, "stddev": gamma_cfg.stddev},
        "geometry": {
            "rotation_range": geo_cfg.rotation_range,
            "flip_h": geo_cfg.flip_h,
            "flip_v": geo_cfg.flip_v,
            "translate_frac": geo_cfg.translate_frac,
            "scale_range": list(geo_cfg.scale_range),
            "elastic_alpha": geo_cfg.elastic_alpha,
            "elastic_sigma": geo_cfg.elastic_sigma,
        },
        "inputs": fragments,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(jobs) * args.count} outputs to {out_dir}")
    return 0


def cmd_tta_median(args: argparse.Namespace) -> int:
    maps = [imgio.load_prob_map(p) for p in args.preds]
    imgio.save_prob_map(tta_median(maps), args.out)
    return 0


def cmd_crop_bbox(args: argparse.Namespace) -> int:
    img = imgio.load_image(args.image)
    mask = imgio.load_mask(args.mask)
    imgio.save_image(crop_bbox(img, mask, args.margin), args.out)
    return 0


def cmd_metrics_seg(args: argparse.Namespace) -> int:
    pred = imgio.load_mask(args.pred)
    gt = imgio.load_mask(args.gt)
    for name, value in seg_metrics(pred, gt).items():
        print(f"{name}={value:.4f}")
    return 0


def cmd_metrics_cls(args: argparse.Namespace) -> int:
    scores = read_score_csv(args.csv)
    print(f"auc={auc(scores):.4f}")
    print(f"ap={average_precision(scores):.4f}")
    if args.plot_out:
        from .plotting import save_classification_report

        save_classification_report(scores, args.plot_out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="illumaug",
        description="illuminant estimation, white balancing, and color-cast augmentation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="print an image's estimated illuminant")
    p_est.add_argument("image")
    _add_estimator_flags(p_est)
    p_est.set_defaults(func=cmd_estimate)

    p_wb = sub.add_parser("whitebalance", help="divide out the estimated illuminant")
    p_wb.add_argument("input")
    p_wb.add_argument("output")
    _add_estimator_flags(p_wb)
    p_wb.set_defaults(func=cmd_whitebalance)

    p_bb = sub.add_parser("build-bank", help="estimate illuminants over a corpus into a bank file")
    p_bb.add_argument("inputs", nargs="+", help="image files and/or directories")
    p_bb.add_argument("--out", required=True)
    _add_estimator_flags(p_bb)
    p_bb.set_defaults(func=cmd_build_bank)

    p_bs = sub.add_parser("bank-stats", help="summarize a bank; optionally export Lab data and a plot")
    p_bs.add_argument("bank")
    p_bs.add_argument("--lab-out", help="write per-entry L,a,b rows to this CSV")
    p_bs.add_argument("--plot-out", help="render the a*b* scatter to this image file")
    p_bs.set_defaults(func=cmd_bank_stats)

    p_aug = sub.add_parser("augment", help="white-balance inputs and emit augmented variants")
    p_aug.add_argument("inputs", nargs="+")
    p_aug.add_argument("--bank", required=True)
    p_aug.add_argument("--out-dir", required=True)
    p_aug.add_argument("--seed", type=int, default=0)
    p_aug.add_argument("--count", type=int, default=8, help="outputs per input (default 8)")
    p_aug.add_argument("--mask", action="append",
                       help="mask path, repeated; pairs with inputs in order")
    p_aug.add_argument("--threads", type=int, default=1)
    p_aug.add_argument("--gamma-mean", type=float, default=1.0)
    p_aug.add_argument("--gamma-std", type=float, default=0.1)
    p_aug.add_argument("--rotation-range", type=float, default=45.0)
    p_aug.add_argument("--flip-h", type=float, default=0.5)
    p_aug.add_argument("--flip-v", type=float, default=0.5)
    p_aug.add_argument("--translate-frac", type=float, default=0.1)
    p_aug.add_argument("--scale-min", type=float, default=0.8)
    p_aug.add_argument("--scale-max", type=float, default=1.25)
    p_aug.add_argument("--elastic-alpha", type=float, default=10.0)
    p_aug.add_argument("--elastic-sigma", type=float, default=4.0)
    p_aug.set_defaults(func=cmd_augment)

    p_tta = sub.add_parser("tta-median", help="per-pixel median of probability maps")
    p_tta.add_argument("preds", nargs="+")
    p_tta.add_argument("--out", required=True)
    p_tta.set_defaults(func=cmd_tta_median)

    p_crop = sub.add_parser("crop-bbox", help="crop an image to its mask bbox plus margin")
    p_crop.add_argument("image")
    p_crop.add_argument("mask")
    p_crop.add_argument("--out", required=True)
    p_crop.add_argument("--margin", type=float, default=0.15)
    p_crop.set_defaults(func=cmd_crop_bbox)

    p_met = sub.add_parser("metrics", help="evaluation metrics")
    met_sub = p_met.add_subparsers(dest="metrics_command", required=True)
    p_seg = met_sub.add_parser("seg", help="segmentation metrics from two mask files")
    p_seg.add_argument("pred")
    p_seg.add_argument("gt")
    p_seg.set_defaults(func=cmd_metrics_seg)
    p_cls = met_sub.add_parser("cls", help="classification metrics from a score CSV")
    p_cls.add_argument("csv")
    p_cls.add_argument("--plot-out", help="render ROC and PR curves to this image file")
    p_cls.set_defaults(func=cmd_metrics_cls)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BankFormatError, ScoreFormatError, UnsupportedImageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
