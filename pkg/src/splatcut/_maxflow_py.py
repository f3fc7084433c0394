"""Pure-Python max-flow via augmenting paths with search-tree reuse.

Fallback twin of splatcut._maxflow. Terminal links are collapsed into a
per-node residual (positive: leftover source capacity, negative: leftover
sink capacity); every undirected edge becomes a pair of antiparallel arcs
stored at indices 2e and 2e+1 so that an arc's sister is its xor with 1.
Growth uses a FIFO active queue, adoption a FIFO orphan queue, and adjacency
is scanned in ascending arc order, which makes runs reproducible.
"""
from __future__ import annotations

from collections import deque

import numpy as np

_NONE = -1
_TERMINAL = -2
_ORPHAN = -3
_FREE, _SRC, _SINK = 0, 1, 2


def solve(n, src_cap, sink_cap, edge_u, edge_v, edge_cap):
    """Returns (labels, flow, augmentations).

    labels[v] is True iff v stays reachable from the source in the final
    residual graph.
    """
    src_cap = np.asarray(src_cap, dtype=np.float64)
    sink_cap = np.asarray(sink_cap, dtype=np.float64)
    m = len(edge_cap)
    rcap = np.empty(2 * m)
    rcap[0::2] = edge_cap
    rcap[1::2] = edge_cap
    head = np.empty(2 * m, dtype=np.int64)
    head[0::2] = edge_v
    head[1::2] = edge_u
    tail = np.empty(2 * m, dtype=np.int64)
    tail[0::2] = edge_u
    tail[1::2] = edge_v

    # CSR adjacency over arcs, ascending arc id within each node.
    adj_order = np.argsort(tail, kind="stable")
    adj_start = np.zeros(n + 1, dtype=np.int64)
    np.add.at(adj_start, tail + 1, 1)
    adj_start = np.cumsum(adj_start)

    tr_cap = src_cap - sink_cap
    flow = float(np.minimum(src_cap, sink_cap).sum())

    tree = np.zeros(n, dtype=np.int8)
    parent = np.full(n, _NONE, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    ts = np.zeros(n, dtype=np.int64)
    time = 0

    active = deque()
    in_active = np.zeros(n, dtype=bool)

    def push_active(v):
        if not in_active[v]:
            in_active[v] = True
            active.append(v)

    for v in range(n):
        if tr_cap[v] > 0:
            tree[v] = _SRC
            parent[v] = _TERMINAL
            dist[v] = 1
            push_active(v)
        elif tr_cap[v] < 0:
            tree[v] = _SINK
            parent[v] = _TERMINAL
            dist[v] = 1
            push_active(v)

    orphans = deque()

    def grow():
        while active:
            v = active.popleft()
            in_active[v] = False
            vtree = tree[v]
            if vtree == _FREE:
                continue
            for p in range(adj_start[v], adj_start[v + 1]):
                a = adj_order[p]
                res = rcap[a] if vtree == _SRC else rcap[a ^ 1]
                if res <= 0.0:
                    continue
                u = head[a]
                utree = tree[u]
                if utree == _FREE:
                    tree[u] = vtree
                    parent[u] = a ^ 1
                    dist[u] = dist[v] + 1
                    ts[u] = ts[v]
                    push_active(u)
                elif utree == vtree:
                    if ts[u] <= ts[v] and dist[u] > dist[v] + 1:
                        parent[u] = a ^ 1
                        dist[u] = dist[v] + 1
                        ts[u] = ts[v]
                else:
                    # Trees met: the connecting arc runs source-side -> sink-side.
                    push_active(v)
                    return a if vtree == _SRC else a ^ 1
        return -1

    def augment(conn):
        nonlocal flow
        u, v = tail[conn], head[conn]
        bottleneck = rcap[conn]
        i = u
        while parent[i] != _TERMINAL:
            pa = parent[i]
            bottleneck = min(bottleneck, rcap[pa ^ 1])
            i = head[pa]
        bottleneck = min(bottleneck, tr_cap[i])
        i = v
        while parent[i] != _TERMINAL:
            pa = parent[i]
            bottleneck = min(bottleneck, rcap[pa])
            i = head[pa]
        bottleneck = min(bottleneck, -tr_cap[i])

        rcap[conn] -= bottleneck
        rcap[conn ^ 1] += bottleneck
        i = u
        while parent[i] != _TERMINAL:
            pa = parent[i]
            rcap[pa ^ 1] -= bottleneck
            rcap[pa] += bottleneck
            nxt = head[pa]
            if rcap[pa ^ 1] <= 0.0:
                parent[i] = _ORPHAN
                orphans.append(i)
            i = nxt
        tr_cap[i] -= bottleneck
        if tr_cap[i] <= 0.0:
            parent[i] = _ORPHAN
            orphans.append(i)
        i = v
        while parent[i] != _TERMINAL:
            pa = parent[i]
            rcap[pa] -= bottleneck
            rcap[pa ^ 1] += bottleneck
            nxt = head[pa]
            if rcap[pa] <= 0.0:
                parent[i] = _ORPHAN
                orphans.append(i)
            i = nxt
        tr_cap[i] += bottleneck
        if tr_cap[i] >= 0.0:
            parent[i] = _ORPHAN
            orphans.append(i)
        flow += bottleneck

    def origin_distance(u):
        """Steps from u to a valid root, or -1 when u hangs off an orphan."""
        d = 0
        i = u
        while True:
            if ts[i] == time:
                return d + dist[i], i
            pa = parent[i]
            d += 1
            if pa == _TERMINAL:
                ts[i] = time
                dist[i] = 1
                return d, i
            if pa == _ORPHAN or pa == _NONE:
                return -1, i
            i = head[pa]

    def adopt():
        while orphans:
            v = orphans.popleft()
            vtree = tree[v]
            best_d = None
            best_arc = -1
            for p in range(adj_start[v], adj_start[v + 1]):
                a = adj_order[p]
                u = head[a]
                if tree[u] != vtree:
                    continue
                res = rcap[a ^ 1] if vtree == _SRC else rcap[a]
                if res <= 0.0:
                    continue
                d, _root = origin_distance(u)
                if d < 0:
                    continue
                if best_d is None or d < best_d:
                    best_d = d
                    best_arc = a
                # Mark distances along the inspected path.
                dd = d
                i = u
                while ts[i] != time:
                    ts[i] = time
                    dist[i] = dd
                    dd -= 1
                    i = head[parent[i]]
            if best_arc >= 0:
                parent[v] = best_arc
                ts[v] = time
                dist[v] = best_d + 1
            else:
                for p in range(adj_start[v], adj_start[v + 1]):
                    a = adj_order[p]
                    u = head[a]
                    if tree[u] != vtree:
                        continue
                    res = rcap[a ^ 1] if vtree == _SRC else rcap[a]
                    if res > 0.0:
                        push_active(u)
                    pu = parent[u]
                    if pu >= 0 and head[pu] == v:
                        parent[u] = _ORPHAN
                        orphans.append(u)
                tree[v] = _FREE
                parent[v] = _NONE

    augmentations = 0
    while True:
        conn = grow()
        if conn < 0:
            break
        time += 1
        augment(conn)
        augmentations += 1
        adopt()

    # Source-side residual reachability.
    labels = tr_cap > 0
    queue = deque(np.flatnonzero(labels))
    while queue:
        v = queue.popleft()
        for p in range(adj_start[v], adj_start[v + 1]):
            a = adj_order[p]
            if rcap[a] > 0.0 and not labels[head[a]]:
                labels[head[a]] = True
                queue.append(head[a])
    return labels, flow, augmentations
