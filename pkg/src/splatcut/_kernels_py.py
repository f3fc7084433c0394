"""Pure-Python (numpy) tile blending kernels; fallback for splatcut._kernels.

Both backends implement the same per-pixel rule: splats arrive per tile in
ascending depth order; alpha is the opacity times the 2D falloff, clamped at
0.99; alphas below 1/255 are skipped; a splat that would push transmittance
below 1e-4 terminates the pixel without being blended.
"""
from __future__ import annotations

import numpy as np

TILE = 16
ALPHA_CLAMP = 0.99
ALPHA_MIN = 1.0 / 255.0
T_MIN = 1e-4

_BASE_YS, _BASE_XS = np.mgrid[0:TILE, 0:TILE]
_BASE_YS = _BASE_YS.astype(np.float64)
_BASE_XS = _BASE_XS.astype(np.float64)


def _tile_pixels(tx: int, ty: int, width: int, height: int):
    x0, x1 = tx * TILE, min(tx * TILE + TILE, width)
    y0, y1 = ty * TILE, min(ty * TILE + TILE, height)
    h, w = y1 - y0, x1 - x0
    px = (x0 + _BASE_XS[:h, :w]).ravel()
    py = (y0 + _BASE_YS[:h, :w]).ravel()
    return x0, x1, y0, y1, px, py


def blend_image(width, height, tiles_x, tile_starts, order,
                mean2d, conic, color, opacity, background, out):
    tiles_y = (height + TILE - 1) // TILE
    for ty in range(tiles_y):
        for tx in range(tiles_x):
            tid = ty * tiles_x + tx
            s0, s1 = int(tile_starts[tid]), int(tile_starts[tid + 1])
            x0, x1, y0, y1, px, py = _tile_pixels(tx, ty, width, height)
            npx = px.shape[0]
            trans = np.ones(npx)
            acc = np.zeros((npx, 3))
            alive = np.ones(npx, dtype=bool)
            for e in range(s0, s1):
                s = int(order[e])
                dx = px - mean2d[s, 0]
                dy = py - mean2d[s, 1]
                power = -0.5 * (conic[s, 0] * dx * dx + conic[s, 2] * dy * dy) \
                    - conic[s, 1] * dx * dy
                alpha = np.minimum(opacity[s] * np.exp(power), ALPHA_CLAMP)
                can = alive & (power <= 0.0) & (alpha >= ALPHA_MIN)
                if not can.any():
                    continue
                t_new = trans * (1.0 - alpha)
                blend = can & (t_new >= T_MIN)
                died = can & ~blend
                w = alpha[blend] * trans[blend]
                acc[blend] += w[:, None] * color[s]
                trans[blend] = t_new[blend]
                alive[died] = False
                if not alive.any():
                    break
            out[y0:y1, x0:x1, :] = (acc + trans[:, None] * background).reshape(
                y1 - y0, x1 - x0, 3
            )


def blend_accumulate(width, height, tiles_x, tile_starts, order,
                     mean2d, conic, opacity, gauss_index, mask, hard,
                     masked_out, total_out):
    tiles_y = (height + TILE - 1) // TILE
    for ty in range(tiles_y):
        for tx in range(tiles_x):
            tid = ty * tiles_x + tx
            s0, s1 = int(tile_starts[tid]), int(tile_starts[tid + 1])
            if s1 == s0:
                continue
            x0, x1, y0, y1, px, py = _tile_pixels(tx, ty, width, height)
            npx = px.shape[0]
            fg = mask[y0:y1, x0:x1].ravel() != 0
            trans = np.ones(npx)
            alive = np.ones(npx, dtype=bool)
            for e in range(s0, s1):
                s = int(order[e])
                dx = px - mean2d[s, 0]
                dy = py - mean2d[s, 1]
                power = -0.5 * (conic[s, 0] * dx * dx + conic[s, 2] * dy * dy) \
                    - conic[s, 1] * dx * dy
                alpha = np.minimum(opacity[s] * np.exp(power), ALPHA_CLAMP)
                can = alive & (power <= 0.0) & (alpha >= ALPHA_MIN)
                if not can.any():
                    continue
                t_new = trans * (1.0 - alpha)
                blend = can & (t_new >= T_MIN)
                died = can & ~blend
                g = int(gauss_index[s])
                # Summing the masked subset first keeps masked <= total exact.
                if hard:
                    inside = float(np.count_nonzero(blend & fg))
                    outside = float(np.count_nonzero(blend & ~fg))
                else:
                    w = alpha * trans
                    inside = float(w[blend & fg].sum())
                    outside = float(w[blend & ~fg].sum())
                masked_out[g] += inside
                total_out[g] += inside + outside
                trans[blend] = t_new[blend]
                alive[died] = False
                if not alive.any():
                    break
