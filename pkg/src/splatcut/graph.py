"""k-nearest-neighbor splat graph with similarity capacities and cut energy."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InputError, NoSeedsError
from .scene import GaussianScene

KMEANS_SEED = 0
KMEANS_MAX_ITER = 50
KMEANS_TOL = 1e-6


@dataclass
class CutParams:
    """Knobs for graph construction and the cut energy."""

    k: int = 10
    gamma_pos: float = 0.1
    gamma_col: float = 1.0
    lam: float = 0.5  # weight of the pairwise term
    lambda_n: float = 1.0  # color-vs-position balance inside edge similarity
    lambda_u: float = 1.0  # weight of the cluster-similarity term in t-links
    conf_hi: float = 0.95
    conf_lo: float = 0.05
    clusters_src: int = 1
    clusters_sink: int = 4
    normalize_extent: bool = False

    def validate(self) -> None:
        if self.k < 1:
            raise InputError("k must be >= 1")
        for name in ("gamma_pos", "gamma_col", "lam", "lambda_n", "lambda_u"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be >= 0")
        if not (0 <= self.conf_lo < self.conf_hi <= 1):
            raise InputError("need 0 <= conf_lo < conf_hi <= 1")
        if self.clusters_src < 1 or self.clusters_sink < 1:
            raise InputError("cluster counts must be >= 1")


@dataclass
class FlowGraph:
    """s-t graph over splats: terminal capacities plus undirected n-links."""

    n: int
    src_cap: np.ndarray  # (N,)
    sink_cap: np.ndarray  # (N,)
    edges: np.ndarray  # (E, 2) int32 with u < v, deduplicated
    edge_cap: np.ndarray  # (E,)

    def validate(self) -> None:
        if np.any(self.src_cap < 0) or np.any(self.sink_cap < 0):
            raise InputError("terminal capacities must be nonnegative")
        if not (np.all(np.isfinite(self.src_cap)) and np.all(np.isfinite(self.sink_cap))
                and np.all(np.isfinite(self.edge_cap))):
            raise InputError("capacities must be finite")
        if self.edges.shape[0]:
            if np.any(self.edges[:, 0] >= self.edges[:, 1]):
                raise InputError("edges must satisfy u < v")
            if np.any(self.edge_cap < 0):
                raise InputError("edge capacities must be nonnegative")
            uniq = np.unique(self.edges, axis=0)
            if uniq.shape[0] != self.edges.shape[0]:
                raise InputError("duplicate edges")


@dataclass
class ClusterSet:
    """Centroids of high-confidence nodes: positions, mean DC colors, sizes."""

    positions: np.ndarray  # (M, 3)
    colors: np.ndarray  # (M, 3)
    counts: np.ndarray  # (M,)

    @property
    def size(self) -> int:
        return self.positions.shape[0]


def similarity(x, y, gamma: float) -> float:
    """exp(-gamma * ||x - y||^2), in (0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise InputError("similarity arguments must have equal dimensions")
    return float(np.exp(-gamma * np.sum((x - y) ** 2)))


def _pair_similarity(pos_a, pos_b, col_a, col_b, params: CutParams) -> np.ndarray:
    """Vectorized edge similarity: position term plus weighted color term."""
    d2_pos = np.sum((pos_a - pos_b) ** 2, axis=-1)
    d2_col = np.sum((col_a - col_b) ** 2, axis=-1)
    return np.exp(-params.gamma_pos * d2_pos) \
        + params.lambda_n * np.exp(-params.gamma_col * d2_col)


def knn_neighbor_sets(positions: np.ndarray, k: int) -> np.ndarray:
    """Per-node k nearest others by Euclidean distance, ties by lower index.

    k is clamped to N-1. Returns an (N, k_eff) int64 array; the order of
    entries within a row is unspecified, only membership is defined.
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    n = positions.shape[0]
    if n < 2:
        raise InputError("kNN graph needs at least 2 points")
    k_eff = min(k, n - 1)
    if k_eff == n - 1:
        grid = np.tile(np.arange(n, dtype=np.int64), (n, 1))
        return grid[~np.eye(n, dtype=bool)].reshape(n, k_eff)

    # Query one extra neighbor beyond self+k so that a distance tie straddling
    # the cut boundary is visible and can be resolved by the index rule.
    tree = cKDTree(positions)
    dists, idxs = tree.query(positions, k=k_eff + 2)
    masked_d = np.where(idxs == np.arange(n)[:, None], np.inf, dists)
    cols = np.argsort(masked_d, axis=1, kind="stable")
    sorted_d = np.take_along_axis(masked_d, cols, axis=1)
    sorted_i = np.take_along_axis(idxs, cols, axis=1)
    neighbors = sorted_i[:, :k_eff].astype(np.int64)

    tie_rows = np.flatnonzero(sorted_d[:, k_eff - 1] == sorted_d[:, k_eff])
    for i in tie_rows:
        d2 = np.sum((positions - positions[i]) ** 2, axis=1)
        order = np.lexsort((np.arange(n), d2))
        order = order[order != i]
        neighbors[i] = order[:k_eff]
    return neighbors


def build_knn(positions: np.ndarray, k: int) -> np.ndarray:
    """Undirected, deduplicated kNN edge set over 3D positions.

    Symmetrizes the directed neighbor relations of knn_neighbor_sets.
    Returns (E, 2) int32 with u < v.
    """
    neighbors = knn_neighbor_sets(positions, k)
    n, k_eff = neighbors.shape
    u = np.repeat(np.arange(n, dtype=np.int64), k_eff)
    v = neighbors.reshape(-1)
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    edges = np.unique(np.stack([lo, hi], axis=1), axis=0)
    return edges.astype(np.int32)


def nlink_weight(g: int, g2: int, scene: GaussianScene, params: CutParams) -> float:
    """Similarity capacity between two splats (before the lambda scaling)."""
    if g == g2:
        raise InputError("n-links connect distinct splats")
    return float(
        _pair_similarity(
            scene.positions[g], scene.positions[g2],
            scene.dc_colors[g], scene.dc_colors[g2], params,
        )
    )


def _lloyd(points: np.ndarray, k: int, seed: int = KMEANS_SEED):
    """Deterministic k-means++ seeded Lloyd iteration; drops empty clusters."""
    n = points.shape[0]
    k = min(k, n)
    rng = np.random.RandomState(seed)

    centers = [points[rng.randint(n)]]
    while len(centers) < k:
        d2 = np.min(
            [np.sum((points - c) ** 2, axis=1) for c in centers], axis=0
        )
        total = d2.sum()
        if total <= 0:
            break  # every remaining point coincides with a center
        centers.append(points[rng.choice(n, p=d2 / total)])
    centers = np.array(centers)

    for _ in range(KMEANS_MAX_ITER):
        d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        assign = np.argmin(d2, axis=1)
        new_centers = []
        for c in range(centers.shape[0]):
            members = assign == c
            if members.any():
                new_centers.append(points[members].mean(axis=0))
        new_centers = np.array(new_centers)
        if new_centers.shape == centers.shape:
            moved = np.max(np.linalg.norm(new_centers - centers, axis=1))
            centers = new_centers
            if moved < KMEANS_TOL:
                break
        else:
            centers = new_centers
    d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    assign = np.argmin(d2, axis=1)
    return centers, assign


def effective_positions(scene: GaussianScene, params: CutParams) -> np.ndarray:
    """Scene positions, optionally rescaled into a unit bounding cube."""
    pos = scene.positions
    if not params.normalize_extent:
        return pos
    lo = pos.min(axis=0)
    extent = (pos.max(axis=0) - lo).max()
    if extent <= 0:
        return pos - lo
    return (pos - lo) / extent


def _cluster(positions, dc_colors, confident: np.ndarray, n_clusters: int,
             side: str) -> ClusterSet:
    if not confident.any():
        raise NoSeedsError(side)
    pts = positions[confident]
    centers, assign = _lloyd(pts, n_clusters)
    counts = np.bincount(assign, minlength=centers.shape[0])
    occupied = counts > 0  # the final reassignment can orphan a centroid
    cols = dc_colors[confident]
    colors = np.array([cols[assign == c].mean(axis=0)
                       for c in np.flatnonzero(occupied)])
    return ClusterSet(centers[occupied], colors, counts[occupied])


def cluster_confident(scene: GaussianScene, w: np.ndarray, params: CutParams,
                      side: str) -> ClusterSet:
    """k-means clusters over the positions of high-confidence nodes.

    Source side clusters nodes with w >= conf_hi, sink side those with
    w <= conf_lo. Raises NoSeedsError when the side has no confident node.
    """
    if side not in ("source", "sink"):
        raise InputError(f"unknown side: {side}")
    w = np.asarray(w, dtype=np.float64)
    pos = effective_positions(scene, params)
    if side == "source":
        return _cluster(pos, scene.dc_colors, w >= params.conf_hi,
                        params.clusters_src, side)
    return _cluster(pos, scene.dc_colors, w <= params.conf_lo,
                    params.clusters_sink, side)


def _tlinks_all(positions, dc_colors, w, src_clusters: ClusterSet,
                sink_clusters: ClusterSet, params: CutParams):
    def psi_to_nearest(clusters: ClusterSet):
        d2 = np.sum(
            (positions[:, None, :] - clusters.positions[None, :, :]) ** 2, axis=2
        )
        nearest = np.argmin(d2, axis=1)  # ties resolve to the lowest index
        return _pair_similarity(
            positions, clusters.positions[nearest],
            dc_colors, clusters.colors[nearest], params,
        )

    src = w + params.lambda_u * psi_to_nearest(src_clusters)
    sink = (1.0 - w) + params.lambda_u * psi_to_nearest(sink_clusters)
    return src, sink


def tlink_weights(g: int, scene: GaussianScene, w, src_clusters: ClusterSet,
                  sink_clusters: ClusterSet, params: CutParams):
    """Terminal capacities for one splat: (source side, sink side)."""
    if src_clusters.size == 0 or sink_clusters.size == 0:
        raise InputError("cluster sets must be nonempty")
    pos = effective_positions(scene, params)
    w = np.asarray(w, dtype=np.float64)
    src, sink = _tlinks_all(
        pos[g:g + 1], scene.dc_colors[g:g + 1], w[g:g + 1],
        src_clusters, sink_clusters, params,
    )
    return float(src[0]), float(sink[0])


def assemble(scene: GaussianScene, w, params: CutParams) -> FlowGraph:
    """Build the full s-t graph for a weighted scene.

    The source capacity of a node is paid when it is labeled background and
    the sink capacity when labeled foreground, so a high foreground weight
    pulls the node to the source side. n-link capacities carry the pairwise
    trade-off factor.
    """
    params.validate()
    w = np.asarray(w, dtype=np.float64).reshape(scene.count)
    pos = effective_positions(scene, params)
    dc = scene.dc_colors

    if scene.count >= 2:
        edges = build_knn(pos, params.k)
        psi = _pair_similarity(pos[edges[:, 0]], pos[edges[:, 1]],
                               dc[edges[:, 0]], dc[edges[:, 1]], params)
        edge_cap = params.lam * psi
    else:
        edges = np.empty((0, 2), dtype=np.int32)
        edge_cap = np.empty(0)

    src_clusters = _cluster(pos, dc, w >= params.conf_hi, params.clusters_src, "source")
    sink_clusters = _cluster(pos, dc, w <= params.conf_lo, params.clusters_sink, "sink")
    src_cap, sink_cap = _tlinks_all(pos, dc, w, src_clusters, sink_clusters, params)

    graph = FlowGraph(scene.count, src_cap, sink_cap, edges, edge_cap)
    graph.validate()
    return graph


def energy(labels, graph: FlowGraph) -> float:
    """Cut value of a labeling: terminal costs plus severed n-links."""
    labels = np.asarray(getattr(labels, "labels", labels), dtype=bool).reshape(-1)
    if labels.shape[0] != graph.n:
        raise InputError(f"labels length {labels.shape[0]} != graph size {graph.n}")
    total = float(graph.src_cap[~labels].sum() + graph.sink_cap[labels].sum())
    if graph.edges.shape[0]:
        cut = labels[graph.edges[:, 0]] != labels[graph.edges[:, 1]]
        total += float(graph.edge_cap[cut].sum())
    return total
