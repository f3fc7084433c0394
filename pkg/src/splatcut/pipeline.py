"""End-to-end segmentation runs shared by the CLI and the HTTP server."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .graph import CutParams, FlowGraph, assemble, energy
from .lift import (LiftParams, accumulate_scribble_weights, accumulate_weights,
                   coarse_splat)
from .mincut import Partition, max_flow
from .scene import Camera, GaussianScene, Mask


@dataclass
class SegmentResult:
    weights: np.ndarray
    coarse: Partition
    cut: Partition | None
    graph: FlowGraph | None
    energy_coarse: float | None
    energy_cut: float | None
    timings_ms: dict

    @property
    def partition(self) -> Partition:
        """The partition this run is asked to ship: cut when present."""
        return self.cut if self.cut is not None else self.coarse


def segment_with_weights(
    scene: GaussianScene,
    w: np.ndarray,
    lift_params: LiftParams,
    cut_params: CutParams,
    coarse_only: bool = False,
    lift_ms: float = 0.0,
) -> SegmentResult:
    """Partition a scene whose weights are already accumulated."""
    coarse = coarse_splat(w, lift_params.tau)
    if coarse_only:
        return SegmentResult(
            weights=w, coarse=coarse, cut=None, graph=None,
            energy_coarse=None, energy_cut=None,
            timings_ms={"lift": lift_ms, "graph": 0.0, "cut": 0.0},
        )
    t0 = time.perf_counter()
    graph = assemble(scene, w, cut_params)
    t1 = time.perf_counter()
    cut = max_flow(graph)
    t2 = time.perf_counter()
    return SegmentResult(
        weights=w,
        coarse=coarse,
        cut=cut,
        graph=graph,
        energy_coarse=energy(coarse.labels, graph),
        energy_cut=cut.energy,
        timings_ms={
            "lift": lift_ms,
            "graph": (t1 - t0) * 1000.0,
            "cut": (t2 - t1) * 1000.0,
        },
    )


def segment_masks(
    scene: GaussianScene,
    cameras: list[Camera],
    masks: list[Mask],
    lift_params: LiftParams | None = None,
    cut_params: CutParams | None = None,
    coarse_only: bool = False,
) -> SegmentResult:
    lift_params = lift_params or LiftParams()
    cut_params = cut_params or CutParams()
    t0 = time.perf_counter()
    w = accumulate_weights(scene, cameras, masks, lift_params)
    lift_ms = (time.perf_counter() - t0) * 1000.0
    return segment_with_weights(scene, w, lift_params, cut_params,
                                coarse_only, lift_ms)


def segment_scribbles(
    scene: GaussianScene,
    cameras: list[Camera],
    scribbles: dict[int, tuple[list, list]],
    lift_params: LiftParams | None = None,
    cut_params: CutParams | None = None,
    coarse_only: bool = False,
) -> SegmentResult:
    lift_params = lift_params or LiftParams()
    cut_params = cut_params or CutParams()
    t0 = time.perf_counter()
    w = accumulate_scribble_weights(scene, cameras, scribbles, lift_params)
    lift_ms = (time.perf_counter() - t0) * 1000.0
    return segment_with_weights(scene, w, lift_params, cut_params,
                                coarse_only, lift_ms)


def summary_dict(result: SegmentResult, params_echo: dict | None = None) -> dict:
    part = result.partition
    out = {
        "n_fg": part.n_fg,
        "n_bg": part.n_bg,
        "energy_cut": result.energy_cut,
        "energy_coarse": result.energy_coarse,
        "flow_value": None if result.cut is None else result.cut.flow_value,
        "runtime_ms": {k: round(v, 3) for k, v in result.timings_ms.items()},
    }
    if params_echo is not None:
        out["params"] = params_echo
    return out
