"""Compiled inner loops for connectivity decisions and graph construction.

Everything here works on plain int64 arrays: a graph is the CSR pair
``(indptr, indices)`` with each neighbor slice sorted ascending.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def component_count(n, us, vs):
    """Number of connected components of the graph on ``n`` nodes with edges ``(us, vs)``."""
    parent = np.arange(n)
    rank = np.zeros(n, dtype=np.int8)
    comps = n
    for e in range(us.shape[0]):
        a = _find(parent, us[e])
        b = _find(parent, vs[e])
        if a == b:
            continue
        if rank[a] < rank[b]:
            a, b = b, a
        parent[b] = a
        if rank[a] == rank[b]:
            rank[a] += 1
        comps -= 1
        if comps == 1:
            break
    return comps


@njit(cache=True)
def reverse_arcs(indptr, indices):
    """For arc e = (v -> w) return the index of (w -> v)."""
    n = indptr.shape[0] - 1
    rev = np.empty(indices.shape[0], dtype=np.int64)
    for v in range(n):
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            lo = indptr[w]
            hi = indptr[w + 1]
            pos = lo + np.searchsorted(indices[lo:hi], v)
            rev[e] = pos
    return rev


@njit(cache=True)
def _apply_step(x, y, arc, flow_e, flow_v, touched, touched_stamp, n_touched, fstamp):
    # One residual step x -> y on the split graph (node 2v = v_in, 2v+1 = v_out).
    # The owner of every changed arc is the vertex of the out-side endpoint.
    if arc < 0:
        v = x >> 1
        if (x & 1) == 0:
            flow_v[v] = 1
        else:
            flow_v[v] = 0
    else:
        if (x & 1) == 1:
            flow_e[arc] = 1
            v = x >> 1
        else:
            flow_e[arc] = 0
            v = y >> 1
    if touched_stamp[v] != fstamp:
        touched_stamp[v] = fstamp
        touched[n_touched] = v
        n_touched += 1
    return n_touched


@njit(cache=True)
def _local_flow(indptr, indices, rev, s, t, limit, ws_flow_e, ws_flow_v,
                visF, visB, parF, parB, arcF, arcB, qF, qB,
                touched, touched_stamp, counters):
    """Unit-capacity vertex-disjoint path count from ``s`` to ``t``, capped at ``limit``.

    Augmenting paths are found with a bidirectional level-synchronous BFS on
    the residual node-split graph. Flow state is reset before returning.
    ``counters`` holds [search stamp, flow stamp].
    """
    counters[1] += 1
    fstamp = counters[1]
    n_touched = 0
    flow = 0
    S = 2 * s + 1
    T = 2 * t
    while flow < limit:
        counters[0] += 1
        stamp = counters[0]
        visF[S] = stamp
        parF[S] = -1
        visB[T] = stamp
        parB[T] = -1
        fh = 0
        ft = 1
        qF[0] = S
        bh = 0
        bt = 1
        qB[0] = T
        meet = -1
        while meet < 0 and fh < ft and bh < bt:
            if ft - fh <= bt - bh:
                end = ft
                i = fh
                while i < end and meet < 0:
                    x = qF[i]
                    i += 1
                    v = x >> 1
                    if (x & 1) == 1:
                        for e in range(indptr[v], indptr[v + 1]):
                            w = indices[e]
                            if w == s or ws_flow_e[e] != 0:
                                continue
                            y = 2 * w
                            if visF[y] == stamp:
                                continue
                            visF[y] = stamp
                            parF[y] = x
                            arcF[y] = e
                            if visB[y] == stamp:
                                meet = y
                                break
                            qF[ft] = y
                            ft += 1
                        if meet < 0 and ws_flow_v[v] == 1 and v != s:
                            y = 2 * v
                            if visF[y] != stamp:
                                visF[y] = stamp
                                parF[y] = x
                                arcF[y] = -1
                                if visB[y] == stamp:
                                    meet = y
                                else:
                                    qF[ft] = y
                                    ft += 1
                    else:
                        if ws_flow_v[v] == 0:
                            y = 2 * v + 1
                            if visF[y] != stamp:
                                visF[y] = stamp
                                parF[y] = x
                                arcF[y] = -1
                                if visB[y] == stamp:
                                    meet = y
                                else:
                                    qF[ft] = y
                                    ft += 1
                        if meet < 0:
                            for e in range(indptr[v], indptr[v + 1]):
                                r = rev[e]
                                if ws_flow_e[r] != 1:
                                    continue
                                w = indices[e]
                                y = 2 * w + 1
                                if visF[y] == stamp:
                                    continue
                                visF[y] = stamp
                                parF[y] = x
                                arcF[y] = r
                                if visB[y] == stamp:
                                    meet = y
                                    break
                                qF[ft] = y
                                ft += 1
                fh = end
            else:
                end = bt
                i = bh
                while i < end and meet < 0:
                    x = qB[i]
                    i += 1
                    v = x >> 1
                    if (x & 1) == 1:
                        # predecessors of v_out
                        if ws_flow_v[v] == 0 and v != s and v != t:
                            y = 2 * v
                            if visB[y] != stamp:
                                visB[y] = stamp
                                parB[y] = x
                                arcB[y] = -1
                                if visF[y] == stamp:
                                    meet = y
                                else:
                                    qB[bt] = y
                                    bt += 1
                        if meet < 0:
                            for e in range(indptr[v], indptr[v + 1]):
                                if ws_flow_e[e] != 1:
                                    continue
                                w = indices[e]
                                if w == s:
                                    continue
                                y = 2 * w
                                if visB[y] == stamp:
                                    continue
                                visB[y] = stamp
                                parB[y] = x
                                arcB[y] = e
                                if visF[y] == stamp:
                                    meet = y
                                    break
                                qB[bt] = y
                                bt += 1
                    else:
                        # predecessors of v_in
                        for e in range(indptr[v], indptr[v + 1]):
                            r = rev[e]
                            if ws_flow_e[r] != 0:
                                continue
                            w = indices[e]
                            if w == t:
                                continue
                            y = 2 * w + 1
                            if visB[y] == stamp:
                                continue
                            visB[y] = stamp
                            parB[y] = x
                            arcB[y] = r
                            if visF[y] == stamp:
                                meet = y
                                break
                            qB[bt] = y
                            bt += 1
                        if meet < 0 and ws_flow_v[v] == 1:
                            y = 2 * v + 1
                            if visB[y] != stamp:
                                visB[y] = stamp
                                parB[y] = x
                                arcB[y] = -1
                                if visF[y] == stamp:
                                    meet = y
                                else:
                                    qB[bt] = y
                                    bt += 1
                bh = end
        if meet < 0:
            break
        # forward half: S -> meet
        y = meet
        while y != S:
            x = parF[y]
            n_touched = _apply_step(x, y, arcF[y], ws_flow_e, ws_flow_v,
                                    touched, touched_stamp, n_touched, fstamp)
            y = x
        # backward half: meet -> T
        x = meet
        while x != T:
            y = parB[x]
            n_touched = _apply_step(x, y, arcB[x], ws_flow_e, ws_flow_v,
                                    touched, touched_stamp, n_touched, fstamp)
            x = y
        flow += 1
    for i in range(n_touched):
        v = touched[i]
        ws_flow_v[v] = 0
        for e in range(indptr[v], indptr[v + 1]):
            ws_flow_e[e] = 0
    return flow


@njit(cache=True)
def _workspace(n, nnz):
    flow_e = np.zeros(nnz, dtype=np.int8)
    flow_v = np.zeros(n, dtype=np.int8)
    visF = np.zeros(2 * n, dtype=np.int64)
    visB = np.zeros(2 * n, dtype=np.int64)
    parF = np.empty(2 * n, dtype=np.int64)
    parB = np.empty(2 * n, dtype=np.int64)
    arcF = np.empty(2 * n, dtype=np.int64)
    arcB = np.empty(2 * n, dtype=np.int64)
    qF = np.empty(2 * n, dtype=np.int64)
    qB = np.empty(2 * n, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    touched_stamp = np.zeros(n, dtype=np.int64)
    counters = np.zeros(2, dtype=np.int64)
    return flow_e, flow_v, visF, visB, parF, parB, arcF, arcB, qF, qB, touched, touched_stamp, counters


@njit(cache=True)
def local_connectivity(indptr, indices, s, t, limit):
    n = indptr.shape[0] - 1
    rev = reverse_arcs(indptr, indices)
    (flow_e, flow_v, visF, visB, parF, parB, arcF, arcB, qF, qB,
     touched, touched_stamp, counters) = _workspace(n, indices.shape[0])
    return _local_flow(indptr, indices, rev, s, t, limit, flow_e, flow_v,
                       visF, visB, parF, parB, arcF, arcB, qF, qB,
                       touched, touched_stamp, counters)


@njit(cache=True)
def _is_connected_csr(indptr, indices):
    n = indptr.shape[0] - 1
    if n <= 1:
        return True
    seen = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    stack[0] = 0
    seen[0] = True
    top = 1
    count = 1
    while top > 0:
        top -= 1
        v = stack[top]
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if not seen[w]:
                seen[w] = True
                stack[top] = w
                top += 1
                count += 1
    return count == n


@njit(cache=True)
def has_min_vertex_connectivity(indptr, indices, k):
    """True iff the graph (assumed to have at least k+1 nodes) has vertex connectivity >= k.

    Min-degree pre-check, then the fixed-pivot sweep: local connectivity from a
    minimum-degree pivot u to each non-neighbor, then between every
    non-adjacent pair of u's neighbors.
    """
    n = indptr.shape[0] - 1
    deg = indptr[1:] - indptr[:-1]
    u = 0
    for v in range(n):
        if deg[v] < deg[u]:
            u = v
    if deg[u] < k:
        return False
    if k == 1:
        return _is_connected_csr(indptr, indices)
    if deg[u] == n - 1:
        # every node has degree n-1: complete graph
        return True
    rev = reverse_arcs(indptr, indices)
    (flow_e, flow_v, visF, visB, parF, parB, arcF, arcB, qF, qB,
     touched, touched_stamp, counters) = _workspace(n, indices.shape[0])
    # ok[v]: no set of fewer than k nodes avoiding u and v separates them.
    # True for u's neighbors; a node with k such neighbors inherits it, since
    # a small cut misses one of them. Visiting in BFS order from u lets most
    # nodes qualify that way, and only the rest need a flow.
    ok = np.zeros(n, dtype=np.bool_)
    ok[u] = True
    for e in range(indptr[u], indptr[u + 1]):
        ok[indices[e]] = True
    seen = np.zeros(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int64)
    seen[u] = True
    order[0] = u
    head = 0
    tail = 1
    while head < tail:
        x = order[head]
        head += 1
        for e in range(indptr[x], indptr[x + 1]):
            y = indices[e]
            if not seen[y]:
                seen[y] = True
                order[tail] = y
                tail += 1
    if tail < n:
        return False  # disconnected
    for i in range(1, n):
        t = order[i]
        if ok[t]:
            continue
        good = 0
        for e in range(indptr[t], indptr[t + 1]):
            if ok[indices[e]]:
                good += 1
                if good >= k:
                    break
        if good >= k:
            ok[t] = True
            continue
        f = _local_flow(indptr, indices, rev, u, t, k, flow_e, flow_v,
                        visF, visB, parF, parB, arcF, arcB, qF, qB,
                        touched, touched_stamp, counters)
        if f < k:
            return False
        ok[t] = True
    lo = indptr[u]
    hi = indptr[u + 1]
    for a in range(lo, hi):
        x = indices[a]
        for b in range(a + 1, hi):
            y = indices[b]
            xlo = indptr[x]
            xhi = indptr[x + 1]
            pos = xlo + np.searchsorted(indices[xlo:xhi], y)
            if pos < xhi and indices[pos] == y:
                continue
            f = _local_flow(indptr, indices, rev, x, y, k, flow_e, flow_v,
                            visF, visB, parF, parB, arcF, arcB, qF, qB,
                            touched, touched_stamp, counters)
            if f < k:
                return False
    return True


@njit(cache=True)
def rgg_edges(xs, ys, r):
    """Pairs (i < j) with Euclidean distance <= r, via a uniform grid of cell width >= r."""
    n = xs.shape[0]
    r2 = r * r
    # cells at least r wide; no more cells than about n, so tiny r stays cheap
    cap = int(np.sqrt(n)) + 1
    if r >= 1.0:
        ncell = 1
    else:
        ncell = max(1, min(int(np.floor(1.0 / r)), cap))
    cell = np.empty(n, dtype=np.int64)
    for i in range(n):
        cx = min(int(xs[i] * ncell), ncell - 1)
        cy = min(int(ys[i] * ncell), ncell - 1)
        cell[i] = cx * ncell + cy
    order = np.argsort(cell, kind="mergesort")
    start = np.zeros(ncell * ncell + 1, dtype=np.int64)
    for i in range(n):
        start[cell[i] + 1] += 1
    for c in range(ncell * ncell):
        start[c + 1] += start[c]
    count = 0
    for sweep in range(2):
        if sweep == 1:
            us = np.empty(count, dtype=np.int64)
            vs = np.empty(count, dtype=np.int64)
            count = 0
        for i in range(n):
            cx = cell[i] // ncell
            cy = cell[i] % ncell
            for dx in range(-1, 2):
                gx = cx + dx
                if gx < 0 or gx >= ncell:
                    continue
                for dy in range(-1, 2):
                    gy = cy + dy
                    if gy < 0 or gy >= ncell:
                        continue
                    c = gx * ncell + gy
                    for q in range(start[c], start[c + 1]):
                        j = order[q]
                        if j <= i:
                            continue
                        ddx = xs[i] - xs[j]
                        ddy = ys[i] - ys[j]
                        if ddx * ddx + ddy * ddy <= r2:
                            if sweep == 1:
                                us[count] = i
                                vs[count] = j
                            count += 1
    return us, vs


@njit(cache=True)
def key_rings(pool_size, sizes, uniforms):
    """Uniform key subsets by partial Fisher-Yates over a virtual pool.

    Node i consumes ``sizes[i]`` uniforms; displaced pool entries are kept in
    a small per-node swap table so the pool is never materialised.
    """
    n = sizes.shape[0]
    total = 0
    for i in range(n):
        total += sizes[i]
    keys = np.empty(total, dtype=np.int64)
    owner = np.empty(total, dtype=np.int64)
    maxs = 0
    for i in range(n):
        maxs = max(maxs, sizes[i])
    swap_pos = np.empty(maxs + 1, dtype=np.int64)
    swap_val = np.empty(maxs + 1, dtype=np.int64)
    off = 0
    for i in range(n):
        m = 0
        for pos in range(sizes[i]):
            j = pos + int(uniforms[off] * (pool_size - pos))
            if j >= pool_size:
                j = pool_size - 1
            vj = j
            jslot = -1
            vp = pos
            for q in range(m):
                if swap_pos[q] == j:
                    vj = swap_val[q]
                    jslot = q
                if swap_pos[q] == pos:
                    vp = swap_val[q]
            keys[off] = vj
            owner[off] = i
            off += 1
            # slot pos is never read again; only slot j needs the swapped-in value
            if jslot >= 0:
                swap_val[jslot] = vp
            else:
                swap_pos[m] = j
                swap_val[m] = vp
                m += 1
    return keys, owner


@njit(cache=True)
def shared_key_pairs(keys, owner):
    """All node pairs (i < j) whose rings share at least one key; may contain duplicates."""
    order = np.argsort(keys, kind="mergesort")
    total = keys.shape[0]
    count = 0
    for sweep in range(2):
        if sweep == 1:
            us = np.empty(count, dtype=np.int64)
            vs = np.empty(count, dtype=np.int64)
            count = 0
        a = 0
        while a < total:
            b = a + 1
            while b < total and keys[order[b]] == keys[order[a]]:
                b += 1
            for x in range(a, b):
                for y in range(x + 1, b):
                    i = owner[order[x]]
                    j = owner[order[y]]
                    if sweep == 1:
                        if i < j:
                            us[count] = i
                            vs[count] = j
                        else:
                            us[count] = j
                            vs[count] = i
                    count += 1
            a = b
    return us, vs
