import importlib

import numpy as np
import pytest

from conftest import make_camera, make_random_scene
from oracles import random_flowgraph
from splatcut import _kernels_py, _maxflow_py, backend
from splatcut.projection import project_splats
from splatcut.render import bin_splats

_kernels_ext = None
_maxflow_ext = None
try:
    _kernels_ext = importlib.import_module("splatcut._kernels")
    _maxflow_ext = importlib.import_module("splatcut._maxflow")
except ImportError:
    pass

needs_ext = pytest.mark.skipif(_kernels_ext is None or _maxflow_ext is None,
                               reason="compiled extensions not built")


class TestSelection:
    def test_env_forces_pure(self, monkeypatch):
        monkeypatch.setenv("SPLATCUT_PURE", "1")
        assert backend.kernels() is _kernels_py
        assert backend.maxflow_impl() is _maxflow_py
        assert backend.backend_name() == "python"

    @needs_ext
    def test_default_prefers_compiled(self, monkeypatch):
        monkeypatch.delenv("SPLATCUT_PURE", raising=False)
        assert backend.kernels() is _kernels_ext
        assert backend.backend_name() == "compiled"

    def test_thread_count_env(self, monkeypatch):
        monkeypatch.setenv("SPLATCUT_THREADS", "3")
        assert backend.n_threads() == 3


@needs_ext
class TestKernelEquivalence:
    def _setup(self, seed, width=56, height=40):
        scene = make_random_scene(n=80, seed=seed)
        cam = make_camera(width=width, height=height)
        proj = project_splats(scene, cam)
        order, starts = bin_splats(proj)
        return scene, cam, proj, order, starts

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_blend_image(self, seed):
        scene, cam, proj, order, starts = self._setup(seed)
        bg = np.array([0.1, 0.5, 0.9])
        out_c = np.empty((cam.height, cam.width, 3))
        out_p = np.empty((cam.height, cam.width, 3))
        for mod, out in ((_kernels_ext, out_c), (_kernels_py, out_p)):
            mod.blend_image(cam.width, cam.height, proj.tiles_x, starts, order,
                            proj.mean2d, proj.conic, proj.color, proj.opacity,
                            bg, out)
        assert np.abs(out_c - out_p).max() <= 1e-12

    @pytest.mark.parametrize("hard", [0, 1])
    def test_blend_accumulate(self, hard):
        scene, cam, proj, order, starts = self._setup(7)
        rng = np.random.RandomState(5)
        mask = (rng.rand(cam.height, cam.width) < 0.5).astype(np.uint8)
        results = []
        for mod in (_kernels_ext, _kernels_py):
            masked = np.zeros(scene.count)
            total = np.zeros(scene.count)
            mod.blend_accumulate(cam.width, cam.height, proj.tiles_x, starts,
                                 order, proj.mean2d, proj.conic, proj.opacity,
                                 proj.index, mask, hard, masked, total)
            results.append((masked, total))
        assert np.allclose(results[0][0], results[1][0], rtol=1e-10, atol=1e-12)
        assert np.allclose(results[0][1], results[1][1], rtol=1e-10, atol=1e-12)


@needs_ext
class TestMaxflowEquivalence:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_small_graphs(self, seed):
        rng = np.random.RandomState(seed)
        for _ in range(50):
            g = random_flowgraph(rng)
            args = (g.n, g.src_cap, g.sink_cap,
                    np.ascontiguousarray(g.edges[:, 0], np.int32),
                    np.ascontiguousarray(g.edges[:, 1], np.int32), g.edge_cap)
            l_c, f_c, _ = _maxflow_ext.solve(*args)
            l_p, f_p, _ = _maxflow_py.solve(*args)
            assert np.array_equal(np.asarray(l_c), np.asarray(l_p))
            assert abs(f_c - f_p) <= 1e-9 * max(1.0, f_c)

    def test_medium_graph(self):
        rng = np.random.RandomState(9)
        n = 300
        src = rng.uniform(0, 3, n)
        sink = rng.uniform(0, 3, n)
        u = rng.randint(0, n, 5 * n)
        v = rng.randint(0, n, 5 * n)
        ok = u != v
        pairs = np.unique(
            np.stack([np.minimum(u, v)[ok], np.maximum(u, v)[ok]], axis=1),
            axis=0).astype(np.int32)
        caps = rng.uniform(0, 2, len(pairs))
        args = (n, src, sink, np.ascontiguousarray(pairs[:, 0]),
                np.ascontiguousarray(pairs[:, 1]), caps)
        l_c, f_c, _ = _maxflow_ext.solve(*args)
        l_p, f_p, _ = _maxflow_py.solve(*args)
        assert np.array_equal(np.asarray(l_c), np.asarray(l_p))
        assert abs(f_c - f_p) <= 1e-9 * max(1.0, f_c)


class TestPipelineUnderPureBackend:
    def test_small_segmentation(self, monkeypatch):
        monkeypatch.setenv("SPLATCUT_PURE", "1")
        from splatcut.graph import CutParams
        from splatcut.lift import LiftParams
        from splatcut.pipeline import segment_masks
        from splatcut.synthetic import (SyntheticSpec, build_bench_scene,
                                        gaussian_iou)
        spec = SyntheticSpec(n_per_cluster=60, seed=41, n_views=2)
        bench = build_bench_scene(spec, 48, 48, 48.0)
        result = segment_masks(bench.scene, bench.input_cams,
                               bench.input_masks, LiftParams(), CutParams())
        assert gaussian_iou(result.cut.labels, bench.gt) == 1.0
