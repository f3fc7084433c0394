"""Tile-based forward splatting with optional per-splat contribution tracking."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import InputError
from .projection import ProjectedSplats, project_splats, tile_grid
from .scene import Camera, GaussianScene, Mask


def bin_splats(proj: ProjectedSplats) -> tuple[np.ndarray, np.ndarray]:
    """Duplicate splats into every tile their radius box overlaps.

    Returns (order, tile_starts): `order[tile_starts[t]:tile_starts[t+1]]`
    lists splat slots for tile t, sorted by ascending depth with ties broken
    by original splat index.
    """
    n_tiles = proj.tiles_x * proj.tiles_y
    if proj.count == 0:
        return (np.empty(0, dtype=np.int32),
                np.zeros(n_tiles + 1, dtype=np.int32))
    rect = proj.rect
    widths = (rect[:, 2] - rect[:, 0]).astype(np.int64)
    heights = (rect[:, 3] - rect[:, 1]).astype(np.int64)
    counts = widths * heights
    slot = np.repeat(np.arange(proj.count, dtype=np.int64), counts)
    first = np.repeat(np.concatenate([[0], np.cumsum(counts)[:-1]]), counts)
    local = np.arange(slot.shape[0], dtype=np.int64) - first
    tx = rect[slot, 0] + local % widths[slot]
    ty = rect[slot, 1] + local // widths[slot]
    tile = ty * proj.tiles_x + tx
    sort = np.lexsort((slot, proj.depth[slot], tile))
    order = slot[sort].astype(np.int32)
    tile_counts = np.bincount(tile, minlength=n_tiles)
    tile_starts = np.concatenate([[0], np.cumsum(tile_counts)]).astype(np.int32)
    return order, tile_starts


def render(
    scene: GaussianScene,
    cam: Camera,
    subset: np.ndarray | None = None,
    background=(0.0, 0.0, 0.0),
    override_colors: np.ndarray | None = None,
) -> np.ndarray:
    """Render a view to a float RGB image in [0, 1].

    `subset` is an optional per-splat boolean filter; an empty selection
    yields a pure background image. `override_colors` substitutes per-splat
    RGB for the SH-evaluated colors.
    """
    bg = np.asarray(background, dtype=np.float64).reshape(3)
    out = np.empty((cam.height, cam.width, 3))
    proj = project_splats(scene, cam, keep=subset, override_colors=override_colors)
    if proj.count == 0:
        out[:] = bg
        return out
    order, tile_starts = bin_splats(proj)
    backend.kernels().blend_image(
        cam.width, cam.height, proj.tiles_x, tile_starts, order,
        proj.mean2d, proj.conic, proj.color, proj.opacity, bg, out,
    )
    return out


@dataclass
class ContributionTotals:
    """Per-splat blended-weight sums over masked pixels and over all pixels."""

    masked: np.ndarray  # (N,)
    total: np.ndarray  # (N,)


def render_with_contributions(
    scene: GaussianScene,
    cam: Camera,
    mask: Mask,
    mode: str = "soft",
) -> ContributionTotals:
    """Traverse a view exactly like `render`, accumulating per-splat sums.

    In soft mode each blended splat adds its alpha-times-transmittance term;
    in hard mode it adds 1 per pixel it was blended into. Sums over masked
    pixels land in `masked`, sums over all pixels in `total`.
    """
    if mode not in ("soft", "hard"):
        raise InputError(f"unknown contribution mode: {mode}")
    if (mask.width, mask.height) != (cam.width, cam.height):
        raise InputError(
            f"mask size {mask.width}x{mask.height} does not match "
            f"camera size {cam.width}x{cam.height}"
        )
    masked = np.zeros(scene.count)
    total = np.zeros(scene.count)
    proj = project_splats(scene, cam)
    if proj.count == 0:
        return ContributionTotals(masked, total)
    order, tile_starts = bin_splats(proj)
    mask_u8 = np.ascontiguousarray(mask.bits.astype(np.uint8))
    backend.kernels().blend_accumulate(
        cam.width, cam.height, proj.tiles_x, tile_starts, order,
        proj.mean2d, proj.conic, proj.opacity, proj.index, mask_u8,
        1 if mode == "hard" else 0, masked, total,
    )
    return ContributionTotals(masked, total)
