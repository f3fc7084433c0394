import numpy as np
import pytest

from oracles import random_flowgraph
from splatcut.errors import InputError
from splatcut.graph import FlowGraph, energy
from splatcut.mincut import brute_force_mincut, max_flow


def make_graph(src, sink, edges=(), caps=()):
    src = np.asarray(src, dtype=np.float64)
    e = (np.asarray(edges, dtype=np.int32).reshape(-1, 2)
         if len(edges) else np.empty((0, 2), np.int32))
    return FlowGraph(len(src), src, np.asarray(sink, dtype=np.float64),
                     e, np.asarray(caps, dtype=np.float64))


class TestMaxFlow:
    def test_two_node_bottleneck(self):
        graph = make_graph([10, 0], [0, 10], [[0, 1]], [1.0])
        part = max_flow(graph)
        assert part.labels.tolist() == [True, False]
        assert part.flow_value == pytest.approx(1.0)
        brute = brute_force_mincut(graph)
        assert brute.flow_value == pytest.approx(part.flow_value)

    def test_no_links_all_foreground(self):
        part = max_flow(make_graph([1, 1], [0, 0]))
        assert part.labels.all()
        assert part.flow_value == 0.0

    def test_flow_equals_label_energy(self, backend_mode):
        rng = np.random.RandomState(0)
        for _ in range(100):
            graph = random_flowgraph(rng)
            part = max_flow(graph)
            e = energy(part.labels, graph)
            assert abs(part.flow_value - e) <= 1e-9 * max(1.0, abs(e))
            assert part.energy == pytest.approx(e)

    def test_matches_brute_force(self, backend_mode):
        rng = np.random.RandomState(1)
        for _ in range(150):
            graph = random_flowgraph(rng)
            part = max_flow(graph)
            brute = brute_force_mincut(graph)
            assert abs(part.flow_value - brute.flow_value) <= \
                1e-9 * max(1.0, brute.flow_value)

    def test_global_optimality(self):
        rng = np.random.RandomState(2)
        for _ in range(20):
            graph = random_flowgraph(rng, max_n=10)
            part = max_flow(graph)
            for _ in range(100):
                labels = rng.rand(graph.n) < 0.5
                assert part.flow_value <= energy(labels, graph) + 1e-9

    def test_trivial_cut_bound(self):
        rng = np.random.RandomState(3)
        for _ in range(50):
            graph = random_flowgraph(rng)
            part = max_flow(graph)
            bound = min(graph.src_cap.sum(), graph.sink_cap.sum())
            assert part.flow_value <= bound + 1e-9

    def test_capacity_scaling(self):
        rng = np.random.RandomState(4)
        for _ in range(30):
            graph = random_flowgraph(rng, max_n=10)
            part = max_flow(graph)
            c = rng.uniform(0.5, 4.0)
            scaled = FlowGraph(graph.n, c * graph.src_cap, c * graph.sink_cap,
                               graph.edges, c * graph.edge_cap)
            part_scaled = max_flow(scaled)
            assert part_scaled.flow_value == pytest.approx(
                c * part.flow_value, rel=1e-9)
            assert energy(part_scaled.labels, scaled) == pytest.approx(
                part_scaled.flow_value, rel=1e-9)

    def test_src_cap_monotonicity(self):
        # Raising one source capacity never flips that node out of the
        # foreground when the optimum is unique.
        rng = np.random.RandomState(5)
        checked = 0
        while checked < 30:
            graph = random_flowgraph(rng, max_n=8)
            if not _unique_minimum(graph):
                continue
            part = max_flow(graph)
            v = int(rng.randint(graph.n))
            src2 = graph.src_cap.copy()
            src2[v] += rng.uniform(0.1, 5.0)
            bumped = FlowGraph(graph.n, src2, graph.sink_cap, graph.edges,
                               graph.edge_cap)
            part2 = max_flow(bumped)
            if part.labels[v]:
                assert part2.labels[v]
            checked += 1

    def test_deterministic(self):
        rng = np.random.RandomState(6)
        graph = random_flowgraph(rng)
        a = max_flow(graph)
        b = max_flow(graph)
        assert np.array_equal(a.labels, b.labels)
        assert a.flow_value == b.flow_value

    def test_stats_present(self):
        part = max_flow(make_graph([2, 1], [1, 3], [[0, 1]], [0.5]))
        assert part.stats["augmentations"] >= 0
        assert part.stats["runtime_ms"] >= 0.0

    def test_long_chain(self):
        # Source feeds node 0, sink drains node n-1; the chain bottleneck
        # decides the flow and the cut falls at the weakest link.
        n = 60
        src = np.zeros(n)
        sink = np.zeros(n)
        src[0] = 5.0
        sink[-1] = 5.0
        rng = np.random.RandomState(8)
        caps = rng.uniform(0.5, 4.0, n - 1)
        edges = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)
        part = max_flow(make_graph(src, sink, edges, caps))
        assert part.flow_value == pytest.approx(min(5.0, caps.min()))
        weakest = int(np.argmin(caps))
        if caps.min() < 5.0:
            assert part.labels[: weakest + 1].all()
            assert not part.labels[weakest + 1:].any()

    def test_star_graph(self):
        # Hub wants foreground; leaves want background with weak spokes.
        n = 9
        src = np.zeros(n)
        sink = np.full(n, 1.0)
        src[0] = 10.0
        sink[0] = 0.0
        edges = np.stack([np.zeros(n - 1, int), np.arange(1, n)], axis=1)
        caps = np.full(n - 1, 0.25)
        part = max_flow(make_graph(src, sink, edges, caps))
        brute = brute_force_mincut(make_graph(src, sink, edges, caps))
        assert part.flow_value == pytest.approx(brute.flow_value)
        assert part.labels[0] and not part.labels[1:].any()

    def test_zero_capacity_edges(self):
        # Zero n-links decouple the nodes; node 2 still pays its smaller
        # terminal capacity.
        graph = make_graph([3, 0, 2], [0, 3, 1],
                           [[0, 1], [1, 2]], [0.0, 0.0])
        part = max_flow(graph)
        assert part.flow_value == pytest.approx(1.0)
        assert part.flow_value == pytest.approx(
            brute_force_mincut(graph).flow_value)
        assert part.labels.tolist() == [True, False, True]

    def test_all_zero_graph(self):
        part = max_flow(make_graph([0, 0], [0, 0], [[0, 1]], [1.0]))
        assert part.flow_value == 0.0
        assert not part.labels.any()

    def test_grid_topology_matches_brute_force(self):
        # 4x4 lattice with vision-style 4-connectivity.
        rng = np.random.RandomState(9)
        n = 16
        edges = []
        for y in range(4):
            for x in range(4):
                i = y * 4 + x
                if x < 3:
                    edges.append((i, i + 1))
                if y < 3:
                    edges.append((i, i + 4))
        for _ in range(10):
            graph = make_graph(rng.uniform(0, 4, n), rng.uniform(0, 4, n),
                               edges, rng.uniform(0, 2, len(edges)))
            part = max_flow(graph)
            brute = brute_force_mincut(graph)
            assert part.flow_value == pytest.approx(brute.flow_value, rel=1e-9)
            assert np.array_equal(part.labels, brute.labels) or \
                energy(part.labels, graph) == pytest.approx(brute.flow_value,
                                                            rel=1e-9)


def _unique_minimum(graph) -> bool:
    n = graph.n
    codes = np.arange(2 ** n)
    labelings = ((codes[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    energies = np.array([energy(l, graph) for l in labelings])
    best = energies.min()
    return int((energies <= best + 1e-12).sum()) == 1


class TestBruteForce:
    def test_single_node_prefers_cheaper_cut(self):
        part = brute_force_mincut(make_graph([2.0], [1.0]))
        assert part.labels.tolist() == [True]
        assert part.flow_value == pytest.approx(1.0)

    def test_tie_breaks_to_background(self):
        part = brute_force_mincut(make_graph([1.0], [1.0]))
        assert part.labels.tolist() == [False]

    def test_tie_break_lexicographic_vector(self):
        # Two symmetric nodes: all four labelings tie; pick (bg, bg).
        part = brute_force_mincut(make_graph([1, 1], [1, 1]))
        assert part.labels.tolist() == [False, False]

    def test_refuses_large_graphs(self):
        with pytest.raises(InputError, match="20"):
            brute_force_mincut(make_graph(np.ones(21), np.ones(21)))

    def test_energy_matches_module_energy(self):
        rng = np.random.RandomState(7)
        for _ in range(50):
            graph = random_flowgraph(rng, max_n=8)
            part = brute_force_mincut(graph)
            assert part.energy == pytest.approx(energy(part.labels, graph))
