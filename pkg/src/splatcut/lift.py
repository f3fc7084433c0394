"""Lift 2D masks or scribbles across views into per-splat foreground weights."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import InputError
from .mincut import Partition
from .render import render_with_contributions
from .scene import Camera, GaussianScene, Mask


@dataclass
class LiftParams:
    """Weight accumulation settings.

    tau defaults to 0.9, which suits front-facing captures; inward-orbit
    scenes usually want 0.3 because objects are unseen from many views.
    """

    mode: str = "soft"
    tau: float = 0.9
    zero_contribution_weight: float = 0.0
    neutral_scribble_weight: float = 0.5

    def validate(self) -> None:
        if self.mode not in ("soft", "hard"):
            raise InputError(f"unknown lift mode: {self.mode}")
        if not 0.0 <= self.tau <= 1.0:
            raise InputError("tau must lie in [0, 1]")
        for name in ("zero_contribution_weight", "neutral_scribble_weight"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InputError(f"{name} must lie in [0, 1]")


def _sum_contributions(scene, cameras, masks, mode):
    """Per-view contribution passes in parallel, combined in view order."""
    def one(pair):
        cam, mask = pair
        return render_with_contributions(scene, cam, mask, mode=mode)

    if len(cameras) == 1:
        results = [one((cameras[0], masks[0]))]
    else:
        with ThreadPoolExecutor(max_workers=backend.n_threads()) as pool:
            results = list(pool.map(one, zip(cameras, masks)))
    masked = np.zeros(scene.count)
    total = np.zeros(scene.count)
    for res in results:
        masked += res.masked
        total += res.total
    return masked, total


def accumulate_weights(
    scene: GaussianScene,
    cameras: list[Camera],
    masks: list[Mask],
    params: LiftParams | None = None,
) -> np.ndarray:
    """Foreground weight per splat from n (camera, mask) pairs.

    Soft mode divides the summed masked-pixel contribution by the summed
    all-pixel contribution; hard mode uses blended-pixel counts instead.
    Splats that contribute nowhere get `zero_contribution_weight`. The
    result replaces scene.weights and is returned.
    """
    params = params or LiftParams()
    params.validate()
    if len(cameras) != len(masks):
        raise InputError(
            f"{len(cameras)} cameras but {len(masks)} masks"
        )
    if not cameras:
        raise InputError("need at least one view")
    masked, total = _sum_contributions(scene, cameras, masks, params.mode)
    w = np.full(scene.count, params.zero_contribution_weight)
    seen = total > 0
    w[seen] = masked[seen] / total[seen]
    scene.weights = w
    return w


def coarse_splat(w: np.ndarray, tau: float) -> Partition:
    """Baseline partition: foreground iff the weight strictly exceeds tau."""
    w = np.asarray(w, dtype=np.float64)
    return Partition(labels=w > tau)


def scribble_seeds(
    scene: GaussianScene,
    cam: Camera,
    fg_pixels,
    bg_pixels,
    params: LiftParams | None = None,
) -> np.ndarray:
    """Foreground weights from single-view scribbles.

    Weights are the ratio of contribution under foreground strokes to
    contribution under any stroke; splats untouched by either stroke set
    stay neutral (0.5 by default).
    """
    params = params or LiftParams()
    params.validate()
    fg_pixels = [tuple(map(int, p)) for p in fg_pixels]
    bg_pixels = [tuple(map(int, p)) for p in bg_pixels]
    if not fg_pixels and not bg_pixels:
        raise InputError("scribbles are empty")
    overlap = set(fg_pixels) & set(bg_pixels)
    if overlap:
        raise InputError(f"pixels marked both fg and bg: {sorted(overlap)[:5]}")
    masked_fg, masked_ann = scribble_contributions(scene, cam, fg_pixels, bg_pixels)
    w = np.full(scene.count, params.neutral_scribble_weight)
    seen = masked_ann > 0
    w[seen] = masked_fg[seen] / masked_ann[seen]
    scene.weights = w
    return w


def scribble_contributions(scene, cam, fg_pixels, bg_pixels):
    """Per-splat contribution under fg strokes and under all strokes."""
    fg_mask = Mask.from_pixels(cam.width, cam.height, fg_pixels)
    ann_mask = Mask.from_pixels(cam.width, cam.height,
                                list(fg_pixels) + list(bg_pixels))
    contrib_fg = render_with_contributions(scene, cam, fg_mask)
    contrib_ann = render_with_contributions(scene, cam, ann_mask)
    return contrib_fg.masked, contrib_ann.masked


def accumulate_scribble_weights(
    scene: GaussianScene,
    cameras: list[Camera],
    scribbles: dict[int, tuple[list, list]],
    params: LiftParams | None = None,
) -> np.ndarray:
    """Multi-view generalization of scribble_seeds.

    `scribbles` maps a camera list index to its (fg_pixels, bg_pixels);
    contributions are summed over the annotated views before the ratio.
    """
    params = params or LiftParams()
    params.validate()
    annotated = {
        idx: (fg, bg) for idx, (fg, bg) in scribbles.items() if fg or bg
    }
    if not annotated:
        raise InputError("scribbles are empty")
    masked_fg = np.zeros(scene.count)
    masked_ann = np.zeros(scene.count)
    for idx in sorted(annotated):
        if not 0 <= idx < len(cameras):
            raise InputError(f"scribble view index {idx} out of range")
        fg, bg = annotated[idx]
        overlap = set(map(tuple, fg)) & set(map(tuple, bg))
        if overlap:
            raise InputError(
                f"view {idx}: pixels marked both fg and bg: {sorted(overlap)[:5]}"
            )
        part_fg, part_ann = scribble_contributions(scene, cameras[idx], fg, bg)
        masked_fg += part_fg
        masked_ann += part_ann
    w = np.full(scene.count, params.neutral_scribble_weight)
    seen = masked_ann > 0
    w[seen] = masked_fg[seen] / masked_ann[seen]
    scene.weights = w
    return w
