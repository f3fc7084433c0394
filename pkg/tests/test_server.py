import io
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from splatcut.errors import InputError
from splatcut.metrics import render_fg_mask
from splatcut.scene import save_cameras, save_mask, save_splat_model
from splatcut.server import create_app
from splatcut.synthetic import (SyntheticSpec, make_gt_masks,
                                make_orbit_cameras, make_two_cluster_scene)


@pytest.fixture(scope="module")
def setup(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("server")
    spec = SyntheticSpec(n_per_cluster=120, seed=31)
    scene, gt = make_two_cluster_scene(spec)
    cams = make_orbit_cameras((0, 0, 0), 6.0, 3, 80, 80, 80.0)
    masks = make_gt_masks(scene, gt, cams, 0.0, 0)
    save_splat_model(scene, None, "all", tmp / "scene.ply")
    save_cameras(cams, tmp / "cameras.json")
    (tmp / "masks").mkdir()
    for cam, mask in zip(cams, masks):
        save_mask(mask, tmp / "masks" / f"{cam.image_name}.png")
    return {"tmp": tmp, "scene": scene, "gt": gt, "cams": cams}


@pytest.fixture()
def client(setup):
    app = create_app(setup["tmp"] / "scene.ply", setup["tmp"] / "cameras.json",
                     masks_dir=setup["tmp"] / "masks")
    return TestClient(app)


def scribble_pixels(setup, view=0, step=12, count=50):
    scene, gt, cams = setup["scene"], setup["gt"], setup["cams"]
    fg_sil = render_fg_mask(scene, gt, cams[view])
    bg_sil = render_fg_mask(scene, ~gt, cams[view])
    ys, xs = np.nonzero(fg_sil.bits)
    fg = [[int(x), int(y)] for x, y in zip(xs, ys)][::step][:count]
    ys, xs = np.nonzero(bg_sil.bits & ~fg_sil.bits)
    bg = [[int(x), int(y)] for x, y in zip(xs, ys)][::step][:count]
    return fg, bg


def run_cut(client, setup, source="scribbles", params=None):
    if source == "scribbles":
        fg, bg = scribble_pixels(setup)
        client.post("/api/scribbles",
                    json={"view": 0, "fg": fg, "bg": bg, "replace": True})
    resp = client.post("/api/cut", json={"source": source,
                                         "params": params or {}})
    assert resp.status_code == 200, resp.text
    return resp.json()


class TestViews:
    def test_listing(self, client):
        views = client.get("/api/views").json()
        assert len(views) == 3
        assert [v["id"] for v in views] == sorted(v["id"] for v in views)
        assert all(v["width"] == 80 and v["height"] == 80 for v in views)

    def test_empty_camera_file_refused(self, setup, tmp_path):
        (tmp_path / "cams.json").write_text("[]")
        with pytest.raises(InputError, match="empty camera"):
            create_app(setup["tmp"] / "scene.ply", tmp_path / "cams.json")


class TestRenderEndpoint:
    def test_full_render_png(self, client):
        resp = client.get("/api/render", params={"view": 0})
        assert resp.status_code == 200
        img = Image.open(io.BytesIO(resp.content))
        assert img.size == (80, 80)

    def test_unknown_view_404(self, client):
        assert client.get("/api/render", params={"view": 9}).status_code == 404

    def test_fg_before_cut_409(self, client):
        assert client.get("/api/render",
                          params={"view": 0, "mode": "fg"}).status_code == 409

    def test_overlay_before_cut_409(self, client):
        assert client.get("/api/render",
                          params={"view": 0, "overlay": 1}).status_code == 409

    def test_fg_of_empty_side_is_black(self, client, setup):
        run_cut(client, setup)
        # Background render where the bg side exists: not asserted black.
        # Force an all-background partition by thresholding impossible weights.
        session = client.app.state.session
        from splatcut.mincut import Partition
        from splatcut.pipeline import SegmentResult
        labels = np.zeros(setup["scene"].count, dtype=bool)
        session.result = SegmentResult(
            weights=np.zeros(setup["scene"].count),
            coarse=Partition(labels=labels), cut=Partition(labels=labels),
            graph=None, energy_coarse=0.0, energy_cut=0.0,
            timings_ms={})
        session.generation += 1
        resp = client.get("/api/render", params={"view": 0, "mode": "fg"})
        img = np.asarray(Image.open(io.BytesIO(resp.content)))
        assert img.max() == 0

    def test_fg_bg_cover_full_nonblack_pixels(self, client, setup):
        run_cut(client, setup)

        def nonblack(params):
            resp = client.get("/api/render", params=params)
            arr = np.asarray(Image.open(io.BytesIO(resp.content)))
            return (arr.sum(axis=2) > 12).sum()

        full = nonblack({"view": 0})
        fg = nonblack({"view": 0, "mode": "fg"})
        bg = nonblack({"view": 0, "mode": "bg"})
        assert abs((fg + bg) - full) <= 0.02 * full

    def test_render_cache_stable_across_generations(self, client, setup):
        run_cut(client, setup)
        a = client.get("/api/render", params={"view": 1, "mode": "fg"}).content
        run_cut(client, setup)
        b = client.get("/api/render", params={"view": 1, "mode": "fg"}).content
        assert a == b  # same inputs, new generation, identical output

    def test_render_cache_drops_stale_generations(self, client, setup):
        run_cut(client, setup)
        client.get("/api/render", params={"view": 0, "mode": "fg"})
        stale_gen = client.app.state.session.generation
        run_cut(client, setup)
        cache = client.app.state.session.render_cache
        assert all(key[3] in (-1, stale_gen + 1) for key in cache)


class TestScribbleEndpoint:
    def test_replace_clears(self, client):
        client.post("/api/scribbles",
                    json={"view": 0, "fg": [[1, 1]], "bg": [[2, 2]]})
        resp = client.post("/api/scribbles",
                           json={"view": 0, "fg": [], "bg": [],
                                 "replace": True})
        assert resp.json()["counts"] == {}

    def test_appends_accumulate(self, client):
        client.post("/api/scribbles",
                    json={"view": 1, "fg": [[1, 1]], "replace": True})
        resp = client.post("/api/scribbles", json={"view": 1, "fg": [[2, 2]]})
        assert resp.json()["counts"]["1"]["fg"] == 2

    def test_duplicates_deduplicated(self, client):
        resp = client.post("/api/scribbles",
                           json={"view": 2, "fg": [[3, 3], [3, 3]],
                                 "replace": True})
        assert resp.json()["counts"]["2"]["fg"] == 1

    def test_later_set_wins(self, client):
        client.post("/api/scribbles",
                    json={"view": 0, "fg": [[5, 5]], "replace": True})
        resp = client.post("/api/scribbles", json={"view": 0, "bg": [[5, 5]]})
        counts = resp.json()["counts"]["0"]
        assert counts["fg"] == 0 and counts["bg"] == 1

    def test_out_of_bounds_named(self, client):
        resp = client.post("/api/scribbles", json={"view": 0, "fg": [[99, 5]]})
        assert resp.status_code == 400
        assert "(99, 5)" in resp.json()["detail"]


class TestCutEndpoint:
    def test_cut_with_no_input_422(self, client):
        client.post("/api/scribbles",
                    json={"view": 0, "fg": [], "bg": [], "replace": True})
        resp = client.post("/api/cut", json={"source": "scribbles"})
        assert resp.status_code == 422

    def test_scribble_cut_summary(self, client, setup):
        summary = run_cut(client, setup)
        assert summary["n_fg"] > 0
        assert summary["energy_cut"] <= summary["energy_coarse"]
        assert summary["params"]["k"] == 10
        assert {"lift", "graph", "cut"} <= set(summary["runtime_ms"])

    def test_repeated_cut_identical(self, client, setup):
        a = run_cut(client, setup)
        b = run_cut(client, setup)
        for key in ("n_fg", "n_bg", "energy_cut", "energy_coarse", "flow_value"):
            assert a[key] == b[key]

    def test_masks_source(self, client, setup):
        summary = run_cut(client, setup, source="masks")
        assert summary["n_fg"] > 0

    def test_param_overrides_echoed(self, client, setup):
        summary = run_cut(client, setup,
                          params={"k": 5, "lambda": 1.5, "tau": 0.3})
        assert summary["params"]["k"] == 5
        assert summary["params"]["lambda"] == 1.5
        assert summary["params"]["tau"] == 0.3

    def test_boolean_param_strictness(self, client, setup):
        summary = run_cut(client, setup, params={"normalize_extent": True})
        assert summary["params"]["normalize_extent"] is True
        fg, bg = scribble_pixels(setup)
        client.post("/api/scribbles",
                    json={"view": 0, "fg": fg, "bg": bg, "replace": True})
        resp = client.post("/api/cut", json={
            "source": "scribbles", "params": {"normalize_extent": "yes"}})
        assert resp.status_code == 400

    def test_unknown_param_400(self, client, setup):
        fg, bg = scribble_pixels(setup)
        client.post("/api/scribbles",
                    json={"view": 0, "fg": fg, "bg": bg, "replace": True})
        resp = client.post("/api/cut", json={"source": "scribbles",
                                             "params": {"bogus": 1}})
        assert resp.status_code == 400

    def test_unhelpful_scribbles_422(self, client):
        # A single mid-gray pixel cannot produce confident seeds on both sides.
        client.post("/api/scribbles",
                    json={"view": 0, "fg": [[0, 0]], "bg": [], "replace": True})
        resp = client.post("/api/cut", json={"source": "scribbles"})
        assert resp.status_code == 422


class TestCliHttpEquivalence:
    def test_masks_cut_matches_cli_segment(self, client, setup, tmp_path,
                                           capsys):
        summary_http = run_cut(client, setup, source="masks")
        from splatcut.cli import main as cli_main
        rc = cli_main([
            "segment", "--scene", str(setup["tmp"] / "scene.ply"),
            "--cameras", str(setup["tmp"] / "cameras.json"),
            "--masks", str(setup["tmp"] / "masks"),
            "--out-fg", str(tmp_path / "fg.ply"),
            "--labels", str(tmp_path / "labels.txt"),
        ])
        assert rc == 0
        summary_cli = json.loads(capsys.readouterr().out.strip())
        for key in ("n_fg", "n_bg", "energy_cut", "energy_coarse", "flow_value"):
            assert summary_cli[key] == summary_http[key]
        labels = np.array(
            [int(v) for v in (tmp_path / "labels.txt").read_text().split()],
            dtype=bool)
        resp = client.get("/api/export", params={"side": "fg"})
        assert int(resp.headers["x-splat-count"]) == int(labels.sum())


class TestExportEndpoint:
    def test_export_before_cut_409(self, client):
        assert client.get("/api/export", params={"side": "fg"}).status_code == 409

    def test_export_round_trip(self, client, setup, tmp_path):
        summary = run_cut(client, setup)
        resp = client.get("/api/export", params={"side": "fg"})
        assert resp.status_code == 200
        path = tmp_path / "fg.ply"
        path.write_bytes(resp.content)
        from splatcut.scene import load_splat_model
        reloaded = load_splat_model(path)
        assert reloaded.count == summary["n_fg"]

    def test_empty_side_422(self, client, setup):
        run_cut(client, setup)
        session = client.app.state.session
        from splatcut.mincut import Partition
        from splatcut.pipeline import SegmentResult
        labels = np.ones(setup["scene"].count, dtype=bool)
        session.result = SegmentResult(
            weights=np.ones(setup["scene"].count),
            coarse=Partition(labels=labels), cut=Partition(labels=labels),
            graph=None, energy_coarse=0.0, energy_cut=0.0, timings_ms={})
        resp = client.get("/api/export", params={"side": "bg"})
        assert resp.status_code == 422
