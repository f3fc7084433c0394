"""Command-line entry points: segment, render, eval, bench, serve."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import InputError, SplatcutError
from .graph import CutParams
from .lift import LiftParams
from .pipeline import segment_masks, segment_scribbles, summary_dict
from .render import render
from .scene import (Mask, load_cameras, load_mask, load_splat_model, read_image,
                    save_splat_model, write_image)
from .synthetic import ABLATION_AXES, SyntheticSpec, run_ablation


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    lift, cut = LiftParams(), CutParams()
    p.add_argument("--tau", type=float, default=lift.tau,
                   help="coarse threshold (0.9 front-facing, 0.3 inward orbits)")
    p.add_argument("--mode", choices=["soft", "hard"], default=lift.mode)
    p.add_argument("--zero-contribution-weight", type=float,
                   default=lift.zero_contribution_weight)
    p.add_argument("--k", type=int, default=cut.k, help="neighbors per node")
    p.add_argument("--gamma-pos", type=float, default=cut.gamma_pos)
    p.add_argument("--gamma-col", type=float, default=cut.gamma_col)
    p.add_argument("--lambda", dest="lam", type=float, default=cut.lam)
    p.add_argument("--lambda-n", type=float, default=cut.lambda_n)
    p.add_argument("--lambda-u", type=float, default=cut.lambda_u)
    p.add_argument("--clusters-src", type=int, default=cut.clusters_src)
    p.add_argument("--clusters-sink", type=int, default=cut.clusters_sink)
    p.add_argument("--conf-hi", type=float, default=cut.conf_hi)
    p.add_argument("--conf-lo", type=float, default=cut.conf_lo)
    p.add_argument("--normalize-extent", action="store_true")


def _params_from_args(args) -> tuple[LiftParams, CutParams]:
    lift = LiftParams(mode=args.mode, tau=args.tau,
                      zero_contribution_weight=args.zero_contribution_weight)
    cut = CutParams(
        k=args.k, gamma_pos=args.gamma_pos, gamma_col=args.gamma_col,
        lam=args.lam, lambda_n=args.lambda_n, lambda_u=args.lambda_u,
        conf_hi=args.conf_hi, conf_lo=args.conf_lo,
        clusters_src=args.clusters_src, clusters_sink=args.clusters_sink,
        normalize_extent=args.normalize_extent,
    )
    lift.validate()
    cut.validate()
    return lift, cut


def _params_echo(lift: LiftParams, cut: CutParams) -> dict:
    return {
        "tau": lift.tau, "mode": lift.mode,
        "zero_contribution_weight": lift.zero_contribution_weight,
        "k": cut.k, "gamma_pos": cut.gamma_pos, "gamma_col": cut.gamma_col,
        "lambda": cut.lam, "lambda_n": cut.lambda_n, "lambda_u": cut.lambda_u,
        "clusters_src": cut.clusters_src, "clusters_sink": cut.clusters_sink,
        "conf_hi": cut.conf_hi, "conf_lo": cut.conf_lo,
        "normalize_extent": cut.normalize_extent,
    }


def _match_masks(cameras, masks_dir: Path) -> list[Mask]:
    """Bind mask files to cameras by filename stem; all views must be covered."""
    by_stem = {p.stem: p for p in sorted(masks_dir.iterdir()) if p.is_file()}
    missing = [Path(cam.image_name).stem for cam in cameras
               if Path(cam.image_name).stem not in by_stem]
    if missing:
        raise InputError(f"masks missing for views: {', '.join(missing)}")
    return [
        load_mask(by_stem[Path(cam.image_name).stem], cam.width, cam.height)
        for cam in cameras
    ]


def _load_scribble_file(path: Path, cameras) -> dict[int, tuple[list, list]]:
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    entries = payload if isinstance(payload, list) else [payload]
    scribbles: dict[int, tuple[list, list]] = {}
    for entry in entries:
        if "view_index" not in entry:
            raise InputError(f"{path}: scribble entry missing 'view_index'")
        idx = int(entry["view_index"])
        if not 0 <= idx < len(cameras):
            raise InputError(f"{path}: view_index {idx} out of range")
        fg = [tuple(map(int, p)) for p in entry.get("fg", [])]
        bg = [tuple(map(int, p)) for p in entry.get("bg", [])]
        scribbles[idx] = (fg, bg)
    return scribbles


def _write_labels(path, labels: np.ndarray) -> None:
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels))


def _read_labels(path) -> np.ndarray:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    try:
        return np.array([int(ln) for ln in lines], dtype=bool)
    except ValueError as exc:
        raise InputError(f"{path}: labels file must hold one 0/1 per line") from exc


def cmd_segment(args) -> int:
    lift, cut = _params_from_args(args)
    scene = load_splat_model(args.scene)
    cameras = load_cameras(args.cameras)
    if not cameras:
        raise InputError(f"{args.cameras}: no cameras")
    if args.masks:
        masks = _match_masks(cameras, Path(args.masks))
        result = segment_masks(scene, cameras, masks, lift, cut,
                               coarse_only=args.coarse_only)
    else:
        scribbles = _load_scribble_file(Path(args.scribbles), cameras)
        result = segment_scribbles(scene, cameras, scribbles, lift, cut,
                                   coarse_only=args.coarse_only)
    part = result.partition
    save_splat_model(scene, part, "fg", args.out_fg)
    if args.out_bg:
        save_splat_model(scene, part, "bg", args.out_bg)
    if args.labels:
        _write_labels(args.labels, part.labels)
    print(json.dumps(summary_dict(result, _params_echo(lift, cut))))
    return 0


def cmd_render(args) -> int:
    scene = load_splat_model(args.scene)
    cameras = load_cameras(args.cameras)
    if not 0 <= args.view < len(cameras):
        raise InputError(f"view index {args.view} out of range (have {len(cameras)})")
    subset = None
    if args.labels:
        labels = _read_labels(args.labels)
        if labels.shape[0] != scene.count:
            raise InputError("labels length does not match the scene")
        subset = labels if args.side == "fg" else ~labels
    try:
        background = tuple(float(v) for v in args.background.split(","))
        if len(background) != 3:
            raise ValueError
    except ValueError:
        raise InputError(f"--background must be r,g,b, got {args.background!r}")
    img = render(scene, cameras[args.view], subset=subset, background=background)
    write_image(args.out, img)
    return 0


def _native_mask(path: Path) -> Mask:
    from PIL import Image as PILImage
    with PILImage.open(path) as im:
        w, h = im.size
    return load_mask(path, w, h)


def _pairs_from(pred, gt) -> list[tuple[str, Path, Path]]:
    pred, gt = Path(pred), Path(gt)
    if pred.is_dir() != gt.is_dir():
        raise InputError("--pred-mask and --gt-mask must both be files or both dirs")
    if not pred.is_dir():
        return [(pred.stem, pred, gt)]
    pred_by_stem = {p.stem: p for p in sorted(pred.iterdir()) if p.is_file()}
    gt_by_stem = {p.stem: p for p in sorted(gt.iterdir()) if p.is_file()}
    unmatched = sorted(set(pred_by_stem) ^ set(gt_by_stem))
    if unmatched:
        raise InputError(f"unmatched mask stems: {', '.join(unmatched)}")
    return [(stem, pred_by_stem[stem], gt_by_stem[stem])
            for stem in sorted(pred_by_stem)]


def cmd_eval(args) -> int:
    from .metrics import mask_metrics, photometric

    if args.pred_img or args.gt_img:
        if not (args.pred_img and args.gt_img and args.gt_mask):
            raise InputError("photometric eval needs --pred-img, --gt-img, --gt-mask")
        pred = read_image(args.pred_img)
        gt = read_image(args.gt_img)
        gt_mask = _native_mask(Path(args.gt_mask))
        res = photometric(pred, gt, gt_mask)
        psnr = "+inf" if res["psnr_db"] == float("inf") else res["psnr_db"]
        print(json.dumps({"pair": Path(args.pred_img).stem,
                          "psnr_db": psnr, "ssim": res["ssim"]}))
        return 0

    if not (args.pred_mask and args.gt_mask):
        raise InputError("mask eval needs --pred-mask and --gt-mask")
    rows = []
    for stem, pred_path, gt_path in _pairs_from(args.pred_mask, args.gt_mask):
        gt_mask = _native_mask(gt_path)
        pred_mask = load_mask(pred_path, gt_mask.width, gt_mask.height)
        m = mask_metrics(pred_mask, gt_mask)
        row = {"pair": stem, "iou": m.iou, "acc": m.accuracy,
               "tp": m.tp, "fp": m.fp, "fn": m.fn, "tn": m.tn}
        rows.append(row)
        print(json.dumps(row))
    print(json.dumps({
        "pair": "mean",
        "iou": float(np.mean([r["iou"] for r in rows])),
        "acc": float(np.mean([r["acc"] for r in rows])),
    }))
    return 0


def cmd_bench(args) -> int:
    if args.axis not in ABLATION_AXES:
        raise InputError(f"unknown axis {args.axis!r}; "
                         f"choose from {', '.join(ABLATION_AXES)}")
    spec = SyntheticSpec(
        n_per_cluster=args.n_per_cluster,
        separation=args.separation,
        scale_range=(args.scale_lo, args.scale_hi),
        mask_noise=args.mask_noise,
        n_views=args.n_views,
        seed=args.seed,
    )
    lift, cut = _params_from_args(args)
    rows = run_ablation(args.axis, spec, lift, cut,
                        width=args.width, height=args.height, focal=args.focal)
    out = args.out or f"ablation_{args.axis}.csv"
    fields = ["axis", "value", "variant", "gaussian_iou", "mask_iou", "acc",
              "energy", "runtime_ms"]
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in fields})
    print(out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.scene, args.cameras, masks_dir=args.masks,
                     static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splatcut",
        description="Foreground/background segmentation of splat scenes via graph cut",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="lift masks/scribbles and cut the scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--cameras", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--masks", help="directory of per-view PNG masks")
    group.add_argument("--scribbles", help="JSON scribble file")
    p.add_argument("--out-fg", required=True)
    p.add_argument("--out-bg")
    p.add_argument("--labels")
    p.add_argument("--coarse-only", action="store_true")
    _add_param_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("render", help="render a view to PNG")
    p.add_argument("--scene", required=True)
    p.add_argument("--cameras", required=True)
    p.add_argument("--view", type=int, required=True)
    p.add_argument("--labels")
    p.add_argument("--side", choices=["fg", "bg"], default="fg")
    p.add_argument("--background", default="0,0,0")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("eval", help="mask and photometric metrics")
    p.add_argument("--pred-mask")
    p.add_argument("--gt-mask")
    p.add_argument("--pred-img")
    p.add_argument("--gt-img")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="synthetic ablation sweeps")
    p.add_argument("--axis", required=True)
    p.add_argument("--out")
    p.add_argument("--n-per-cluster", type=int, default=400)
    p.add_argument("--separation", type=float, default=2.0)
    p.add_argument("--scale-lo", type=float, default=0.1)
    p.add_argument("--scale-hi", type=float, default=0.2)
    p.add_argument("--mask-noise", type=float, default=0.05)
    p.add_argument("--n-views", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--height", type=int, default=128)
    p.add_argument("--focal", type=float, default=128.0)
    _add_param_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the interactive HTTP server")
    p.add_argument("--scene", required=True)
    p.add_argument("--cameras", required=True)
    p.add_argument("--masks")
    p.add_argument("--static")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SplatcutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
