"""HTTP API for the interactive loop: render views, scribble, cut, export."""
from __future__ import annotations

import io
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image
from pydantic import BaseModel

from .errors import InputError, NoSeedsError
from .graph import CutParams
from .lift import LiftParams
from .mincut import Partition
from .pipeline import (SegmentResult, segment_masks, segment_scribbles,
                       summary_dict)
from .render import render
from .scene import (Camera, GaussianScene, Mask, load_cameras, load_mask,
                    load_splat_model, splat_model_bytes)

OVERLAY_TINT = np.array([1.0, 0.0, 0.0])
OVERLAY_ALPHA = 0.5


@dataclass
class Session:
    """Single-scene server state; partition swaps are atomic."""

    scene: GaussianScene
    cameras: list[Camera]
    masks: list[Mask] | None = None
    scribbles: dict[int, tuple[set, set]] = field(default_factory=dict)
    result: SegmentResult | None = None
    generation: int = 0
    cut_lock: threading.Lock = field(default_factory=threading.Lock)
    render_cache: dict = field(default_factory=dict)


class ScribblePost(BaseModel):
    view: int
    fg: list[tuple[int, int]] = []
    bg: list[tuple[int, int]] = []
    replace: bool = False


class CutPost(BaseModel):
    source: str = "scribbles"
    params: dict = {}


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    if value in ("true", "false"):
        return value == "true"
    raise InputError(f"expected a boolean, got {value!r}")


_PARAM_KEYS = {
    "tau": ("lift", "tau", float),
    "mode": ("lift", "mode", str),
    "zero_contribution_weight": ("lift", "zero_contribution_weight", float),
    "k": ("cut", "k", int),
    "gamma_pos": ("cut", "gamma_pos", float),
    "gamma_col": ("cut", "gamma_col", float),
    "lambda": ("cut", "lam", float),
    "lambda_n": ("cut", "lambda_n", float),
    "lambda_u": ("cut", "lambda_u", float),
    "clusters_src": ("cut", "clusters_src", int),
    "clusters_sink": ("cut", "clusters_sink", int),
    "conf_hi": ("cut", "conf_hi", float),
    "conf_lo": ("cut", "conf_lo", float),
    "normalize_extent": ("cut", "normalize_extent", _as_bool),
}


def _apply_overrides(overrides: dict) -> tuple[LiftParams, CutParams]:
    lift, cut = LiftParams(), CutParams()
    for key, value in overrides.items():
        if key not in _PARAM_KEYS:
            raise InputError(f"unknown parameter: {key}")
        target, attr, cast = _PARAM_KEYS[key]
        if target == "lift":
            lift = replace(lift, **{attr: cast(value)})
        else:
            cut = replace(cut, **{attr: cast(value)})
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


def _png_bytes(img: np.ndarray) -> bytes:
    arr = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def _load_masks_dir(cameras, masks_dir) -> list[Mask]:
    masks_dir = Path(masks_dir)
    by_stem = {p.stem: p for p in sorted(masks_dir.iterdir()) if p.is_file()}
    missing = [Path(c.image_name).stem for c in cameras
               if Path(c.image_name).stem not in by_stem]
    if missing:
        raise InputError(f"masks missing for views: {', '.join(missing)}")
    return [load_mask(by_stem[Path(c.image_name).stem], c.width, c.height)
            for c in cameras]


def create_app(scene_path, cameras_path, masks_dir=None, static_dir=None) -> FastAPI:
    scene = load_splat_model(scene_path)
    cameras = load_cameras(cameras_path)
    if not cameras:
        raise InputError(f"{cameras_path}: refusing to serve an empty camera list")
    masks = _load_masks_dir(cameras, masks_dir) if masks_dir else None
    return build_app(Session(scene=scene, cameras=cameras, masks=masks),
                     static_dir=static_dir)


def build_app(session: Session, static_dir=None) -> FastAPI:
    app = FastAPI(title="splatcut")
    app.state.session = session

    def current() -> tuple[SegmentResult | None, int]:
        # Single attribute read keeps renders consistent during a cut.
        return session.result, session.generation

    @app.get("/api/views")
    def views():
        return [
            {"id": c.id, "img_name": c.image_name,
             "width": c.width, "height": c.height}
            for c in session.cameras
        ]

    @app.get("/api/render")
    def render_view(view: int, mode: str = "full",
                    overlay: int = Query(default=0)):
        if not 0 <= view < len(session.cameras):
            raise HTTPException(404, f"unknown view {view}")
        if mode not in ("full", "fg", "bg"):
            raise HTTPException(400, f"unknown mode {mode!r}")
        result, generation = current()
        needs_cut = mode in ("fg", "bg") or overlay
        if needs_cut and result is None:
            raise HTTPException(409, "no cut has been run yet")
        key = (view, mode, int(bool(overlay)), generation if needs_cut else -1)
        cached = session.render_cache.get(key)
        if cached is None:
            cam = session.cameras[view]
            if mode == "full":
                img = render(session.scene, cam)
            else:
                labels = result.partition.labels
                subset = labels if mode == "fg" else ~labels
                img = render(session.scene, cam, subset=subset)
            if overlay:
                from .metrics import render_fg_mask
                fg_mask = render_fg_mask(session.scene, result.partition.labels, cam)
                tint = fg_mask.bits[..., None] * OVERLAY_ALPHA
                img = img * (1.0 - tint) + OVERLAY_TINT * tint
            cached = _png_bytes(img)
            session.render_cache[key] = cached
        return Response(content=cached, media_type="image/png")

    @app.post("/api/scribbles")
    def post_scribbles(body: ScribblePost):
        if not 0 <= body.view < len(session.cameras):
            raise HTTPException(404, f"unknown view {body.view}")
        cam = session.cameras[body.view]
        for x, y in list(body.fg) + list(body.bg):
            if not (0 <= x < cam.width and 0 <= y < cam.height):
                raise HTTPException(
                    400, f"pixel ({x}, {y}) out of bounds for view {body.view}"
                )
        fg_set, bg_set = session.scribbles.get(body.view, (set(), set()))
        if body.replace:
            fg_set, bg_set = set(), set()
        # Later annotations win: a pixel belongs to the set that marked it last.
        fg_new = {tuple(p) for p in body.fg}
        fg_set |= fg_new
        bg_set -= fg_new
        bg_new = {tuple(p) for p in body.bg}
        bg_set |= bg_new
        fg_set -= bg_new
        session.scribbles[body.view] = (fg_set, bg_set)
        counts = {
            str(view): {"fg": len(f), "bg": len(b)}
            for view, (f, b) in sorted(session.scribbles.items())
            if f or b
        }
        return {"counts": counts}

    @app.post("/api/cut")
    def post_cut(body: CutPost):
        if body.source not in ("scribbles", "masks"):
            raise HTTPException(400, f"unknown source {body.source!r}")
        if not session.cut_lock.acquire(blocking=False):
            raise HTTPException(409, "a cut is already running")
        try:
            try:
                lift, cut_params = _apply_overrides(body.params)
            except InputError as exc:
                raise HTTPException(400, str(exc))
            try:
                if body.source == "scribbles":
                    scribbles = {
                        v: (sorted(f), sorted(b))
                        for v, (f, b) in session.scribbles.items()
                    }
                    if not any(f or b for f, b in scribbles.values()):
                        raise HTTPException(422, "no scribbles submitted")
                    result = segment_scribbles(session.scene, session.cameras,
                                               scribbles, lift, cut_params)
                else:
                    if not session.masks:
                        raise HTTPException(422, "no masks loaded")
                    result = segment_masks(session.scene, session.cameras,
                                           session.masks, lift, cut_params)
            except NoSeedsError as exc:
                raise HTTPException(422, str(exc))
            except InputError as exc:
                raise HTTPException(422, str(exc))
            session.result = result
            session.generation += 1
            # Partition-dependent frames from older generations are stale.
            session.render_cache = {
                key: png for key, png in session.render_cache.items()
                if key[3] in (-1, session.generation)
            }
            return summary_dict(result, _params_echo(lift, cut_params))
        finally:
            session.cut_lock.release()

    @app.get("/api/export")
    def export(side: str):
        if side not in ("fg", "bg"):
            raise HTTPException(400, f"unknown side {side!r}")
        result, _generation = current()
        if result is None:
            raise HTTPException(409, "no cut has been run yet")
        try:
            payload, count = splat_model_bytes(session.scene,
                                               result.partition, side)
        except InputError as exc:
            raise HTTPException(422, str(exc))
        return Response(
            content=payload,
            media_type="application/octet-stream",
            headers={
                "Content-Disposition": f'attachment; filename="{side}.ply"',
                "X-Splat-Count": str(count),
            },
        )

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
