# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tile blending kernels; semantics match splatcut._kernels_py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cdef double ALPHA_CLAMP = 0.99
cdef double ALPHA_MIN = 1.0 / 255.0
cdef double T_MIN = 1e-4
cdef int TILE = 16


def blend_image(int width, int height, int tiles_x,
                cnp.int32_t[::1] tile_starts, cnp.int32_t[::1] order,
                double[:, ::1] mean2d, double[:, ::1] conic,
                double[:, ::1] color, double[::1] opacity,
                double[::1] background, double[:, :, ::1] out):
    cdef int tiles_y = (height + TILE - 1) // TILE
    cdef int tx, ty, x0, x1, y0, y1, x, y, tid, e, s, s0, s1
    cdef double trans, dx, dy, power, alpha, w, t_new, c0, c1, c2
    cdef double bg0 = background[0], bg1 = background[1], bg2 = background[2]
    with nogil:
        for ty in range(tiles_y):
            y0 = ty * TILE
            y1 = y0 + TILE
            if y1 > height:
                y1 = height
            for tx in range(tiles_x):
                tid = ty * tiles_x + tx
                s0 = tile_starts[tid]
                s1 = tile_starts[tid + 1]
                x0 = tx * TILE
                x1 = x0 + TILE
                if x1 > width:
                    x1 = width
                for y in range(y0, y1):
                    for x in range(x0, x1):
                        trans = 1.0
                        c0 = 0.0
                        c1 = 0.0
                        c2 = 0.0
                        for e in range(s0, s1):
                            s = order[e]
                            dx = x - mean2d[s, 0]
                            dy = y - mean2d[s, 1]
                            power = -0.5 * (conic[s, 0] * dx * dx
                                            + conic[s, 2] * dy * dy) \
                                - conic[s, 1] * dx * dy
                            if power > 0.0:
                                continue
                            alpha = opacity[s] * exp(power)
                            if alpha > ALPHA_CLAMP:
                                alpha = ALPHA_CLAMP
                            if alpha < ALPHA_MIN:
                                continue
                            t_new = trans * (1.0 - alpha)
                            if t_new < T_MIN:
                                break
                            w = alpha * trans
                            c0 += w * color[s, 0]
                            c1 += w * color[s, 1]
                            c2 += w * color[s, 2]
                            trans = t_new
                        out[y, x, 0] = c0 + trans * bg0
                        out[y, x, 1] = c1 + trans * bg1
                        out[y, x, 2] = c2 + trans * bg2


def blend_accumulate(int width, int height, int tiles_x,
                     cnp.int32_t[::1] tile_starts, cnp.int32_t[::1] order,
                     double[:, ::1] mean2d, double[:, ::1] conic,
                     double[::1] opacity, cnp.int32_t[::1] gauss_index,
                     cnp.uint8_t[:, ::1] mask, int hard,
                     double[::1] masked_out, double[::1] total_out):
    cdef int tiles_y = (height + TILE - 1) // TILE
    cdef int tx, ty, x0, x1, y0, y1, x, y, tid, e, s, s0, s1, g
    cdef double trans, dx, dy, power, alpha, w, t_new
    with nogil:
        for ty in range(tiles_y):
            y0 = ty * TILE
            y1 = y0 + TILE
            if y1 > height:
                y1 = height
            for tx in range(tiles_x):
                tid = ty * tiles_x + tx
                s0 = tile_starts[tid]
                s1 = tile_starts[tid + 1]
                if s1 == s0:
                    continue
                x0 = tx * TILE
                x1 = x0 + TILE
                if x1 > width:
                    x1 = width
                for y in range(y0, y1):
                    for x in range(x0, x1):
                        trans = 1.0
                        for e in range(s0, s1):
                            s = order[e]
                            dx = x - mean2d[s, 0]
                            dy = y - mean2d[s, 1]
                            power = -0.5 * (conic[s, 0] * dx * dx
                                            + conic[s, 2] * dy * dy) \
                                - conic[s, 1] * dx * dy
                            if power > 0.0:
                                continue
                            alpha = opacity[s] * exp(power)
                            if alpha > ALPHA_CLAMP:
                                alpha = ALPHA_CLAMP
                            if alpha < ALPHA_MIN:
                                continue
                            t_new = trans * (1.0 - alpha)
                            if t_new < T_MIN:
                                break
                            g = gauss_index[s]
                            w = 1.0 if hard else alpha * trans
                            total_out[g] += w
                            if mask[y, x]:
                                masked_out[g] += w
                            trans = t_new
