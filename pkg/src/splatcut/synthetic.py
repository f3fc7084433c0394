"""Procedural two-cluster scenes with ground truth; ablation sweep driver."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from . import backend
from .errors import InputError
from .graph import CutParams
from .lift import LiftParams
from .metrics import mask_metrics, render_fg_mask
from .pipeline import segment_masks
from .scene import Camera, GaussianScene, Mask
from .sh import SH_C0

# Cluster positions fill a ball of this radius relative to the separation.
BLOB_RADIUS_FACTOR = 0.2
ORBIT_RADIUS_FACTOR = 3.0


@dataclass
class SyntheticSpec:
    n_per_cluster: int = 400
    separation: float = 2.0
    scale_range: tuple[float, float] = (0.1, 0.2)
    colors: tuple = ((0.85, 0.25, 0.2), (0.2, 0.35, 0.85))
    mask_noise: float = 0.0
    n_views: int = 8
    seed: int = 0

    def validate(self) -> None:
        if self.separation <= 0:
            raise InputError("separation must be positive")
        if not 0.0 <= self.mask_noise < 0.5:
            raise InputError("mask_noise must lie in [0, 0.5)")
        if self.n_per_cluster < 1 or self.n_views < 1:
            raise InputError("counts must be >= 1")
        lo, hi = self.scale_range
        if not 0 < lo <= hi:
            raise InputError("scale_range must be positive and ordered")


def _ball_offsets(rng: np.random.RandomState, n: int, radius: float) -> np.ndarray:
    """n offsets in a ball; the first is the exact center."""
    out = np.zeros((n, 3))
    if n > 1:
        dirs = rng.normal(size=(n - 1, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = radius * rng.uniform(0.0, 1.0, n - 1) ** (1.0 / 3.0)
        out[1:] = dirs * radii[:, None]
    return out


def make_two_cluster_scene(spec: SyntheticSpec) -> tuple[GaussianScene, np.ndarray]:
    """Two blobs of splats on the x axis; ground truth marks the +x blob."""
    spec.validate()
    rng = np.random.RandomState(spec.seed)
    half = spec.separation / 2.0
    blob_r = BLOB_RADIUS_FACTOR * spec.separation
    lo, hi = spec.scale_range

    positions, sh, scales, rots, opac = [], [], [], [], []
    for center_x, base_color in ((half, spec.colors[0]), (-half, spec.colors[1])):
        n = spec.n_per_cluster
        pos = np.array([center_x, 0.0, 0.0]) + _ball_offsets(rng, n, blob_r)
        color = np.clip(
            np.asarray(base_color) + rng.uniform(-0.05, 0.05, (n, 3)), 0.02, 0.98
        )
        coeffs = np.zeros((n, 48))
        coeffs[:, :3] = (color - 0.5) / SH_C0
        positions.append(pos)
        sh.append(coeffs)
        scales.append(rng.uniform(lo, hi, (n, 3)))
        rots.append(rng.normal(size=(n, 4)))
        opac.append(rng.uniform(0.7, 1.0, n))

    scene = GaussianScene.from_arrays(
        np.concatenate(positions),
        np.concatenate(sh),
        np.concatenate(scales),
        np.concatenate(rots),
        np.concatenate(opac),
    )
    gt = np.zeros(scene.count, dtype=bool)
    gt[: spec.n_per_cluster] = True
    return scene, gt


def make_orbit_cameras(center, radius: float, n_views: int, width: int,
                       height: int, f: float) -> list[Camera]:
    """Evenly spaced cameras on a horizontal circle, all aimed at `center`."""
    if n_views < 1:
        raise InputError("n_views must be >= 1")
    center = np.asarray(center, dtype=np.float64).reshape(3)
    cams = []
    for i in range(n_views):
        azimuth = 2.0 * np.pi * i / n_views
        pos = center + radius * np.array([np.sin(azimuth), 0.0, np.cos(azimuth)])
        forward = center - pos
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, np.array([0.0, 1.0, 0.0]))
        right /= np.linalg.norm(right)
        down = np.cross(forward, right)
        rot = np.stack([right, down, forward])  # world-to-camera, z forward
        cams.append(
            Camera(
                id=i, image_name=f"view_{i:03d}", width=width, height=height,
                fx=f, fy=f, cx=width / 2.0, cy=height / 2.0,
                rotation=rot, translation=-rot @ pos,
            )
        )
    return cams


_BAND_STRUCTURE = (
    np.hypot(*np.mgrid[-2:3, -2:3]) <= 2.0
)  # Euclidean disk of radius 2


def make_gt_masks(scene: GaussianScene, gt_labels, cams: list[Camera],
                  noise: float, seed: int) -> list[Mask]:
    """Per-view silhouette masks, optionally corrupted near the boundary.

    Exactly round(noise * band) pixels are flipped, where the band is all
    pixels within 2 px of the silhouette boundary.
    """
    def one(item):
        view_idx, cam = item
        mask = render_fg_mask(scene, gt_labels, cam)
        if noise <= 0:
            return mask
        bits = mask.bits.copy()
        band = ndimage.binary_dilation(bits, _BAND_STRUCTURE) & ~ndimage.binary_erosion(
            bits, _BAND_STRUCTURE
        )
        band_idx = np.flatnonzero(band.ravel())
        n_flip = int(np.round(noise * band_idx.size))
        if n_flip:
            rng = np.random.RandomState(seed + view_idx)
            chosen = rng.choice(band_idx, size=n_flip, replace=False)
            flat = bits.ravel()
            flat[chosen] = ~flat[chosen]
            bits = flat.reshape(bits.shape)
        return Mask(mask.width, mask.height, bits)

    if len(cams) == 1:
        return [one((0, cams[0]))]
    with ThreadPoolExecutor(max_workers=backend.n_threads()) as pool:
        return list(pool.map(one, enumerate(cams)))


def gaussian_iou(pred_labels, gt_labels) -> float:
    """Set IoU between predicted and true foreground splat sets."""
    pred = np.asarray(getattr(pred_labels, "labels", pred_labels), dtype=bool)
    gt = np.asarray(gt_labels, dtype=bool)
    union = np.count_nonzero(pred | gt)
    if union == 0:
        return 1.0
    return np.count_nonzero(pred & gt) / union


ABLATION_AXES = {
    "views": (1, 2, 4, 8),
    "energy": ("full", "no_color", "no_cluster", "single"),
    "neighbors": (1, 10, 50, 100),
    "clusters": (1, 5, 10, 20),
    "lambda": (0.5, 1.0, 2.0, 4.0),
    "gamma": (0.5, 1.0, 2.0, 4.0),
    "tau": (0.1, 0.3, 0.5, 0.7, 0.9),
}

EVAL_VIEWS = 8


@dataclass
class BenchScene:
    """A synthetic scene plus its cameras and masks, built once per config."""

    scene: GaussianScene
    gt: np.ndarray
    input_cams: list[Camera]
    input_masks: list[Mask]
    eval_cams: list[Camera]
    eval_masks: list[Mask]


def build_bench_scene(spec: SyntheticSpec, width: int, height: int,
                      focal: float, with_eval: bool = True) -> BenchScene:
    """Scene, input views, and (optionally) a clean 8-view evaluation orbit.

    Runs that only score splat-level IoU can skip the evaluation renders.
    """
    scene, gt = make_two_cluster_scene(spec)
    radius = ORBIT_RADIUS_FACTOR * spec.separation
    input_cams = make_orbit_cameras((0, 0, 0), radius, spec.n_views, width, height, focal)
    input_masks = make_gt_masks(scene, gt, input_cams, spec.mask_noise, spec.seed)
    if with_eval:
        eval_cams = make_orbit_cameras((0, 0, 0), radius, EVAL_VIEWS, width, height, focal)
        eval_masks = make_gt_masks(scene, gt, eval_cams, 0.0, spec.seed)
    else:
        eval_cams, eval_masks = [], []
    return BenchScene(scene, gt, input_cams, input_masks, eval_cams, eval_masks)


def evaluate_partition(bench: BenchScene, labels) -> dict:
    """Splat-level IoU plus 2D mask IoU/accuracy over the evaluation orbit."""
    ious, accs = [], []
    for cam, gt_mask in zip(bench.eval_cams, bench.eval_masks):
        pred_mask = render_fg_mask(bench.scene, labels, cam)
        m = mask_metrics(pred_mask, gt_mask)
        ious.append(m.iou)
        accs.append(m.accuracy)
    return {
        "gaussian_iou": gaussian_iou(labels, bench.gt),
        "mask_iou": float(np.mean(ious)),
        "acc": float(np.mean(accs)),
    }


def _run_config(bench: BenchScene, lift_params: LiftParams,
                cut_params: CutParams) -> tuple[dict, dict, float]:
    t0 = time.perf_counter()
    result = segment_masks(bench.scene, bench.input_cams, bench.input_masks,
                           lift_params, cut_params)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    coarse_row = evaluate_partition(bench, result.coarse.labels)
    coarse_row["energy"] = result.energy_coarse
    cut_row = evaluate_partition(bench, result.cut.labels)
    cut_row["energy"] = result.energy_cut
    return coarse_row, cut_row, runtime_ms


def run_ablation(axis: str, spec: SyntheticSpec,
                 lift_params: LiftParams | None = None,
                 cut_params: CutParams | None = None,
                 width: int = 128, height: int = 128,
                 focal: float = 128.0) -> list[dict]:
    """Sweep one ablation axis; returns one row per (value, variant)."""
    if axis not in ABLATION_AXES:
        raise InputError(f"unknown ablation axis: {axis}")
    lift_params = lift_params or LiftParams()
    cut_params = cut_params or CutParams()
    rows = []

    def add(value, variant, metrics, runtime_ms):
        rows.append({
            "axis": axis, "value": value, "variant": variant,
            **metrics, "runtime_ms": round(runtime_ms, 3),
        })

    if axis == "tau":
        bench = build_bench_scene(spec, width, height, focal)
        t0 = time.perf_counter()
        result = segment_masks(bench.scene, bench.input_cams, bench.input_masks,
                               lift_params, cut_params)
        runtime_ms = (time.perf_counter() - t0) * 1000.0
        from .graph import energy as graph_energy
        from .lift import coarse_splat
        for tau in ABLATION_AXES["tau"]:
            part = coarse_splat(result.weights, tau)
            metrics = evaluate_partition(bench, part.labels)
            metrics["energy"] = graph_energy(part.labels, result.graph)
            add(tau, "coarse", metrics, runtime_ms)
        metrics = evaluate_partition(bench, result.cut.labels)
        metrics["energy"] = result.energy_cut
        add("-", "cut", metrics, runtime_ms)
        return rows

    for value in ABLATION_AXES[axis]:
        cfg_spec, cfg_cut = spec, cut_params
        if axis == "views":
            cfg_spec = replace(spec, n_views=int(value))
        elif axis == "energy":
            if value == "no_color":
                cfg_cut = replace(cut_params, lambda_n=0.0)
            elif value == "no_cluster":
                cfg_cut = replace(cut_params, lambda_u=0.0)
            elif value == "single":
                cfg_spec = replace(spec, n_views=1)
        elif axis == "neighbors":
            cfg_cut = replace(cut_params, k=int(value))
        elif axis == "clusters":
            cfg_cut = replace(cut_params, clusters_src=int(value),
                              clusters_sink=int(value))
        elif axis == "lambda":
            cfg_cut = replace(cut_params, lam=float(value))
        elif axis == "gamma":
            cfg_cut = replace(cut_params, gamma_col=float(value))
        bench = build_bench_scene(cfg_spec, width, height, focal)
        coarse_row, cut_row, runtime_ms = _run_config(bench, lift_params, cfg_cut)
        add(value, "coarse", coarse_row, runtime_ms)
        add(value, "cut", cut_row, runtime_ms)
    return rows
