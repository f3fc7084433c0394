"""Perspective projection of 3D splats to screen-space ellipses."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scene import Camera, GaussianScene
from .sh import eval_sh_many

TILE = 16
NEAR_CLIP = 0.2
COV2D_DILATION = 0.3
RADIUS_SIGMAS = 3.0


def quat_to_rotmat(quats: np.ndarray) -> np.ndarray:
    """(N, 4) unit quaternions (w, x, y, z) -> (N, 3, 3) rotation matrices."""
    q = np.asarray(quats, dtype=np.float64).reshape(-1, 4)
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    n = q.shape[0]
    rot = np.empty((n, 3, 3))
    rot[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    rot[:, 0, 1] = 2.0 * (x * y - w * z)
    rot[:, 0, 2] = 2.0 * (x * z + w * y)
    rot[:, 1, 0] = 2.0 * (x * y + w * z)
    rot[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    rot[:, 1, 2] = 2.0 * (y * z - w * x)
    rot[:, 2, 0] = 2.0 * (x * z - w * y)
    rot[:, 2, 1] = 2.0 * (y * z + w * x)
    rot[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return rot


def compute_cov3d_many(scales: np.ndarray, rotations: np.ndarray) -> np.ndarray:
    """World-space covariances R diag(s)^2 R^T for a batch of splats."""
    rot = quat_to_rotmat(rotations)
    s2 = np.asarray(scales, dtype=np.float64).reshape(-1, 3) ** 2
    return np.einsum("nij,nj,nkj->nik", rot, s2, rot)


def compute_cov3d(s, r) -> np.ndarray:
    """Covariance of one splat from its scale vector and unit quaternion."""
    return compute_cov3d_many(np.reshape(s, (1, 3)), np.reshape(r, (1, 4)))[0]


@dataclass
class ProjectedSplats:
    """Screen-space splats surviving culling, in original index order.

    `conic` holds the upper triangle (a, b, c) of the inverted 2D covariance.
    `rect` holds per-splat tile bounds (x0, y0, x1, y1), half-open.
    """

    index: np.ndarray  # (M,) int32, index into the source scene
    mean2d: np.ndarray  # (M, 2)
    conic: np.ndarray  # (M, 3)
    depth: np.ndarray  # (M,)
    color: np.ndarray  # (M, 3) in [0, 1]
    opacity: np.ndarray  # (M,)
    radius: np.ndarray  # (M,)
    cov2d: np.ndarray  # (M, 3) pre-inversion (a, b, c), kept for checks
    rect: np.ndarray  # (M, 4) int32 tile bounds
    tiles_x: int
    tiles_y: int

    @property
    def count(self) -> int:
        return self.index.shape[0]


def tile_grid(width: int, height: int) -> tuple[int, int]:
    return (width + TILE - 1) // TILE, (height + TILE - 1) // TILE


def project_splats(
    scene: GaussianScene,
    cam: Camera,
    keep: np.ndarray | None = None,
    override_colors: np.ndarray | None = None,
) -> ProjectedSplats:
    """Project (a subset of) the scene through `cam`, culling as we go.

    Culls splats behind the near plane, with degenerate screen covariance,
    or whose radius box overlaps no image tile.
    """
    if keep is None:
        idx = np.arange(scene.count, dtype=np.int32)
    else:
        idx = np.flatnonzero(np.asarray(keep, dtype=bool)).astype(np.int32)
    tiles_x, tiles_y = tile_grid(cam.width, cam.height)

    pos = scene.positions[idx]
    t = pos @ cam.rotation.T + cam.translation
    front = t[:, 2] > NEAR_CLIP
    idx, pos, t = idx[front], pos[front], t[front]

    if idx.size == 0:
        return _empty_projection(tiles_x, tiles_y)

    cov3d = compute_cov3d_many(scene.scales[idx], scene.rotations[idx])
    tx, ty, tz = t[:, 0], t[:, 1], t[:, 2]
    inv_z = 1.0 / tz
    # Rows of the perspective Jacobian times the view rotation.
    j0 = (cam.fx * inv_z)[:, None] * cam.rotation[0] \
        - (cam.fx * tx * inv_z**2)[:, None] * cam.rotation[2]
    j1 = (cam.fy * inv_z)[:, None] * cam.rotation[1] \
        - (cam.fy * ty * inv_z**2)[:, None] * cam.rotation[2]
    a = np.einsum("ni,nij,nj->n", j0, cov3d, j0) + COV2D_DILATION
    b = np.einsum("ni,nij,nj->n", j0, cov3d, j1)
    c = np.einsum("ni,nij,nj->n", j1, cov3d, j1) + COV2D_DILATION

    det = a * c - b * b
    ok = det > 0
    idx, pos, t = idx[ok], pos[ok], t[ok]
    a, b, c, det = a[ok], b[ok], c[ok], det[ok]
    tx, ty, tz = tx[ok], ty[ok], tz[ok]
    if idx.size == 0:
        return _empty_projection(tiles_x, tiles_y)

    conic = np.stack([c / det, -b / det, a / det], axis=1)
    mid = 0.5 * (a + c)
    lam_max = mid + np.sqrt(np.maximum(mid * mid - det, 0.0))
    radius = RADIUS_SIGMAS * np.sqrt(lam_max)
    mean2d = np.stack([cam.fx * tx / tz + cam.cx, cam.fy * ty / tz + cam.cy], axis=1)

    rx0 = np.clip(np.floor((mean2d[:, 0] - radius) / TILE), 0, tiles_x).astype(np.int32)
    ry0 = np.clip(np.floor((mean2d[:, 1] - radius) / TILE), 0, tiles_y).astype(np.int32)
    rx1 = np.clip(np.floor((mean2d[:, 0] + radius) / TILE) + 1, 0, tiles_x).astype(np.int32)
    ry1 = np.clip(np.floor((mean2d[:, 1] + radius) / TILE) + 1, 0, tiles_y).astype(np.int32)
    visible = (rx1 > rx0) & (ry1 > ry0)

    idx, pos, t = idx[visible], pos[visible], t[visible]
    if idx.size == 0:
        return _empty_projection(tiles_x, tiles_y)
    conic, mean2d, radius = conic[visible], mean2d[visible], radius[visible]
    cov2d = np.stack([a[visible], b[visible], c[visible]], axis=1)
    rect = np.stack([rx0[visible], ry0[visible], rx1[visible], ry1[visible]], axis=1)

    if override_colors is not None:
        color = np.clip(np.asarray(override_colors, dtype=np.float64)[idx], 0.0, 1.0)
    else:
        dirs = pos - cam.center
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        color = eval_sh_many(scene.sh[idx], dirs)

    return ProjectedSplats(
        index=idx,
        mean2d=np.ascontiguousarray(mean2d),
        conic=np.ascontiguousarray(conic),
        depth=np.ascontiguousarray(t[:, 2]),
        color=np.ascontiguousarray(color),
        opacity=np.ascontiguousarray(scene.opacities[idx]),
        radius=np.ascontiguousarray(radius),
        cov2d=np.ascontiguousarray(cov2d),
        rect=np.ascontiguousarray(rect),
        tiles_x=tiles_x,
        tiles_y=tiles_y,
    )


def _empty_projection(tiles_x: int, tiles_y: int) -> ProjectedSplats:
    return ProjectedSplats(
        index=np.empty(0, dtype=np.int32),
        mean2d=np.empty((0, 2)),
        conic=np.empty((0, 3)),
        depth=np.empty(0),
        color=np.empty((0, 3)),
        opacity=np.empty(0),
        radius=np.empty(0),
        cov2d=np.empty((0, 3)),
        rect=np.empty((0, 4), dtype=np.int32),
        tiles_x=tiles_x,
        tiles_y=tiles_y,
    )


@dataclass
class Splat2D:
    """Screen-space footprint of a single splat."""

    gaussian_index: int
    mean2d: np.ndarray
    conic: np.ndarray
    radius: float
    depth: float
    color: np.ndarray
    opacity: float


def project_gaussian(g: int, scene: GaussianScene, cam: Camera) -> Splat2D | None:
    """Project one splat; returns None when it is culled."""
    keep = np.zeros(scene.count, dtype=bool)
    keep[g] = True
    proj = project_splats(scene, cam, keep=keep)
    if proj.count == 0:
        return None
    return Splat2D(
        gaussian_index=int(proj.index[0]),
        mean2d=proj.mean2d[0],
        conic=proj.conic[0],
        radius=float(proj.radius[0]),
        depth=float(proj.depth[0]),
        color=proj.color[0],
        opacity=float(proj.opacity[0]),
    )
