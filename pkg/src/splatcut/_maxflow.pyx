# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled max-flow solver; algorithm and tie-breaking match splatcut._maxflow_py."""

import numpy as np

cimport numpy as cnp

cdef long _NONE = -1
cdef long _TERMINAL = -2
cdef long _ORPHAN = -3
cdef signed char _FREE = 0
cdef signed char _SRC = 1
cdef signed char _SINK = 2


def solve(long n, double[::1] src_cap, double[::1] sink_cap,
          cnp.int32_t[::1] edge_u, cnp.int32_t[::1] edge_v,
          double[::1] edge_cap):
    cdef long m = edge_cap.shape[0]

    rcap_arr = np.empty(2 * m)
    head_arr = np.empty(2 * m, dtype=np.int64)
    tail_arr = np.empty(2 * m, dtype=np.int64)
    eu = np.asarray(edge_u, dtype=np.int64)
    ev = np.asarray(edge_v, dtype=np.int64)
    ec = np.asarray(edge_cap)
    rcap_arr[0::2] = ec
    rcap_arr[1::2] = ec
    head_arr[0::2] = ev
    head_arr[1::2] = eu
    tail_arr[0::2] = eu
    tail_arr[1::2] = ev

    adj_order_arr = np.argsort(tail_arr, kind="stable")
    adj_start_arr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(adj_start_arr, tail_arr + 1, 1)
    adj_start_arr = np.cumsum(adj_start_arr)

    tr_cap_arr = np.asarray(src_cap) - np.asarray(sink_cap)
    cdef double flow = float(np.minimum(src_cap, sink_cap).sum())

    tree_arr = np.zeros(n, dtype=np.int8)
    parent_arr = np.full(n, _NONE, dtype=np.int64)
    dist_arr = np.zeros(n, dtype=np.int64)
    ts_arr = np.zeros(n, dtype=np.int64)
    active_arr = np.zeros(n + 1, dtype=np.int64)
    in_active_arr = np.zeros(n, dtype=np.int8)
    orphan_arr = np.zeros(n + 1, dtype=np.int64)

    cdef double[::1] rcap = rcap_arr
    cdef long[::1] head = head_arr
    cdef long[::1] adj_order = adj_order_arr
    cdef long[::1] adj_start = adj_start_arr
    cdef double[::1] tr_cap = tr_cap_arr
    cdef signed char[::1] tree = tree_arr
    cdef long[::1] parent = parent_arr
    cdef long[::1] dist = dist_arr
    cdef long[::1] ts = ts_arr
    cdef long[::1] active = active_arr
    cdef signed char[::1] in_active = in_active_arr
    cdef long[::1] orphans = orphan_arr

    cdef long qcap = n + 1
    cdef long q_head = 0, q_tail = 0  # FIFO active ring buffer
    cdef long o_head = 0, o_tail = 0  # FIFO orphan ring buffer

    cdef long v, u, p, a, pa, conn, i, nxt, time = 0
    cdef long d, dd, best_d, best_arc
    cdef signed char vtree
    cdef double res, bottleneck
    cdef long augmentations = 0
    cdef bint found, ok

    with nogil:
        for v in range(n):
            if tr_cap[v] > 0:
                tree[v] = _SRC
                parent[v] = _TERMINAL
                dist[v] = 1
                in_active[v] = 1
                active[q_tail] = v
                q_tail = (q_tail + 1) % qcap
            elif tr_cap[v] < 0:
                tree[v] = _SINK
                parent[v] = _TERMINAL
                dist[v] = 1
                in_active[v] = 1
                active[q_tail] = v
                q_tail = (q_tail + 1) % qcap

        while True:
            # -- growth --
            conn = -1
            while q_head != q_tail:
                v = active[q_head]
                q_head = (q_head + 1) % qcap
                in_active[v] = 0
                vtree = tree[v]
                if vtree == _FREE:
                    continue
                found = False
                for p in range(adj_start[v], adj_start[v + 1]):
                    a = adj_order[p]
                    res = rcap[a] if vtree == _SRC else rcap[a ^ 1]
                    if res <= 0.0:
                        continue
                    u = head[a]
                    if tree[u] == _FREE:
                        tree[u] = vtree
                        parent[u] = a ^ 1
                        dist[u] = dist[v] + 1
                        ts[u] = ts[v]
                        if not in_active[u]:
                            in_active[u] = 1
                            active[q_tail] = u
                            q_tail = (q_tail + 1) % qcap
                    elif tree[u] == vtree:
                        if ts[u] <= ts[v] and dist[u] > dist[v] + 1:
                            parent[u] = a ^ 1
                            dist[u] = dist[v] + 1
                            ts[u] = ts[v]
                    else:
                        if not in_active[v]:
                            in_active[v] = 1
                            active[q_tail] = v
                            q_tail = (q_tail + 1) % qcap
                        conn = a if vtree == _SRC else a ^ 1
                        found = True
                        break
                if found:
                    break
            if conn < 0:
                break
            time += 1

            # -- augmentation --
            u = head[conn ^ 1]  # tail of the connecting arc
            v = head[conn]
            bottleneck = rcap[conn]
            i = u
            while parent[i] != _TERMINAL:
                pa = parent[i]
                if rcap[pa ^ 1] < bottleneck:
                    bottleneck = rcap[pa ^ 1]
                i = head[pa]
            if tr_cap[i] < bottleneck:
                bottleneck = tr_cap[i]
            i = v
            while parent[i] != _TERMINAL:
                pa = parent[i]
                if rcap[pa] < bottleneck:
                    bottleneck = rcap[pa]
                i = head[pa]
            if -tr_cap[i] < bottleneck:
                bottleneck = -tr_cap[i]

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
                    orphans[o_tail] = i
                    o_tail = (o_tail + 1) % qcap
                i = nxt
            tr_cap[i] -= bottleneck
            if tr_cap[i] <= 0.0:
                parent[i] = _ORPHAN
                orphans[o_tail] = i
                o_tail = (o_tail + 1) % qcap
            i = v
            while parent[i] != _TERMINAL:
                pa = parent[i]
                rcap[pa] -= bottleneck
                rcap[pa ^ 1] += bottleneck
                nxt = head[pa]
                if rcap[pa] <= 0.0:
                    parent[i] = _ORPHAN
                    orphans[o_tail] = i
                    o_tail = (o_tail + 1) % qcap
                i = nxt
            tr_cap[i] += bottleneck
            if tr_cap[i] >= 0.0:
                parent[i] = _ORPHAN
                orphans[o_tail] = i
                o_tail = (o_tail + 1) % qcap
            flow += bottleneck
            augmentations += 1

            # -- adoption --
            while o_head != o_tail:
                v = orphans[o_head]
                o_head = (o_head + 1) % qcap
                vtree = tree[v]
                best_d = -1
                best_arc = -1
                for p in range(adj_start[v], adj_start[v + 1]):
                    a = adj_order[p]
                    u = head[a]
                    if tree[u] != vtree:
                        continue
                    res = rcap[a ^ 1] if vtree == _SRC else rcap[a]
                    if res <= 0.0:
                        continue
                    # walk to the root to check the candidate's origin
                    d = 0
                    i = u
                    ok = False
                    while True:
                        if ts[i] == time:
                            d += dist[i]
                            ok = True
                            break
                        pa = parent[i]
                        d += 1
                        if pa == _TERMINAL:
                            ts[i] = time
                            dist[i] = 1
                            ok = True
                            break
                        if pa == _ORPHAN or pa == _NONE:
                            break
                        i = head[pa]
                    if not ok:
                        continue
                    if best_d < 0 or d < best_d:
                        best_d = d
                        best_arc = a
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
                        if res > 0.0 and not in_active[u]:
                            in_active[u] = 1
                            active[q_tail] = u
                            q_tail = (q_tail + 1) % qcap
                        pa = parent[u]
                        if pa >= 0 and head[pa] == v:
                            parent[u] = _ORPHAN
                            orphans[o_tail] = u
                            o_tail = (o_tail + 1) % qcap
                    tree[v] = _FREE
                    parent[v] = _NONE

    # Source-side residual reachability -> labels.
    labels = tr_cap_arr > 0
    stack = list(np.flatnonzero(labels))
    while stack:
        vv = stack.pop()
        for pp in range(adj_start_arr[vv], adj_start_arr[vv + 1]):
            aa = adj_order_arr[pp]
            hh = head_arr[aa]
            if rcap_arr[aa] > 0.0 and not labels[hh]:
                labels[hh] = True
                stack.append(hh)
    return labels, flow, augmentations
