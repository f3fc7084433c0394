#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python fallbacks.

Times the tile blending kernel (render + contribution pass) and the
max-flow solver on matched inputs and prints one table row per case.

Usage: python benchmarks/compare_backends.py [--splats 5000] [--size 128]
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from splatcut import _kernels_py, _maxflow_py
from splatcut.graph import CutParams, assemble
from splatcut.projection import project_splats
from splatcut.render import bin_splats
from splatcut.synthetic import SyntheticSpec, make_orbit_cameras, make_two_cluster_scene

try:
    from splatcut import _kernels, _maxflow
except ImportError:
    print("compiled extensions are not built; nothing to compare", file=sys.stderr)
    sys.exit(1)


def timed(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_blend(scene, cam, repeats):
    proj = project_splats(scene, cam)
    order, starts = bin_splats(proj)
    bg = np.zeros(3)
    mask = np.zeros((cam.height, cam.width), dtype=np.uint8)
    mask[:, : cam.width // 2] = 1
    rows = []
    for name, mod in (("compiled", _kernels), ("python", _kernels_py)):
        out = np.empty((cam.height, cam.width, 3))
        t_img = timed(lambda: mod.blend_image(
            cam.width, cam.height, proj.tiles_x, starts, order,
            proj.mean2d, proj.conic, proj.color, proj.opacity, bg, out),
            repeats)
        masked = np.zeros(scene.count)
        total = np.zeros(scene.count)
        t_acc = timed(lambda: mod.blend_accumulate(
            cam.width, cam.height, proj.tiles_x, starts, order,
            proj.mean2d, proj.conic, proj.opacity, proj.index, mask, 0,
            masked, total), repeats)
        rows.append((name, t_img, t_acc))
    return rows


def bench_maxflow(scene, repeats):
    cut = CutParams()
    rng = np.random.RandomState(0)
    w = np.clip(rng.normal(0.5, 0.35, scene.count), 0.0, 1.0)
    w[: scene.count // 4] = 1.0
    w[-scene.count // 4:] = 0.0
    graph = assemble(scene, w, cut)
    args = (graph.n, graph.src_cap, graph.sink_cap,
            np.ascontiguousarray(graph.edges[:, 0], np.int32),
            np.ascontiguousarray(graph.edges[:, 1], np.int32),
            graph.edge_cap)
    rows = []
    for name, mod in (("compiled", _maxflow), ("python", _maxflow_py)):
        t = timed(lambda: mod.solve(*args), repeats)
        rows.append((name, t))
    return graph, rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--splats", type=int, default=5000,
                        help="splats per cluster")
    parser.add_argument("--size", type=int, default=128)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    spec = SyntheticSpec(n_per_cluster=args.splats, seed=0)
    scene, _gt = make_two_cluster_scene(spec)
    cam = make_orbit_cameras((0, 0, 0), 3.0 * spec.separation, 1,
                             args.size, args.size, float(args.size))[0]

    print(f"scene: {scene.count} splats, image {args.size}x{args.size}")
    print(f"{'kernel':<22}{'backend':<10}{'seconds':>10}{'speedup':>9}")

    blend_rows = bench_blend(scene, cam, args.repeats)
    base_img = dict((n, t) for n, t, _ in blend_rows)["python"]
    base_acc = dict((n, t) for n, _, t in blend_rows)["python"]
    for name, t_img, t_acc in blend_rows:
        print(f"{'blend_image':<22}{name:<10}{t_img:>10.4f}"
              f"{base_img / t_img:>8.1f}x")
    for name, _t_img, t_acc in blend_rows:
        print(f"{'blend_accumulate':<22}{name:<10}{t_acc:>10.4f}"
              f"{base_acc / t_acc:>8.1f}x")

    graph, flow_rows = bench_maxflow(scene, args.repeats)
    base = dict(flow_rows)["python"]
    for name, t in flow_rows:
        print(f"{'max_flow (' + str(graph.edges.shape[0]) + ' edges)':<22}"
              f"{name:<10}{t:>10.4f}{base / t:>8.1f}x")


if __name__ == "__main__":
    main()
