"""Hot inner loops over CSR / bitmask arrays.

All functions here are nopython-compatible: integer array work only, no
Python objects, no dict/set.  They are compiled with ``@njit`` unless
``MBGAMES_PURE=1``, in which case the identical source runs under
CPython (see :mod:`mbgames._accel`).  Randomized kernels consume
pre-drawn random arrays so both paths replay identically.
"""

import numpy as np

from ._accel import njit

INF = np.int64(1) << 60


@njit
def hopcroft_karp(n_left, n_right, indptr, indices, match_l, match_r):
    """Maximum bipartite matching; fills match_l/match_r (-1 = exposed).

    Returns the matching size.  indptr/indices: CSR from left vertices
    to right vertices.
    """
    dist = np.empty(n_left, np.int64)
    queue = np.empty(n_left, np.int64)
    stack = np.empty(n_left + 1, np.int64)
    iter_pos = np.empty(n_left + 1, np.int64)
    via = np.empty(n_left + 1, np.int64)
    for u in range(n_left):
        match_l[u] = -1
    for v in range(n_right):
        match_r[v] = -1
    size = 0
    while True:
        qt = 0
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue[qt] = u
                qt += 1
            else:
                dist[u] = INF
        qh = 0
        found = False
        while qh < qt:
            u = queue[qh]
            qh += 1
            for ii in range(indptr[u], indptr[u + 1]):
                w = match_r[indices[ii]]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue[qt] = w
                    qt += 1
        if not found:
            break
        for s in range(n_left):
            if match_l[s] != -1:
                continue
            top = 0
            stack[0] = s
            iter_pos[0] = indptr[s]
            while top >= 0:
                u = stack[top]
                ii = iter_pos[top]
                if ii >= indptr[u + 1]:
                    dist[u] = INF
                    top -= 1
                    continue
                iter_pos[top] = ii + 1
                v = indices[ii]
                w = match_r[v]
                if w == -1:
                    # augment along the stack
                    match_l[u] = v
                    match_r[v] = u
                    for t in range(top, 0, -1):
                        pv = via[t]
                        match_l[stack[t - 1]] = pv
                        match_r[pv] = stack[t - 1]
                    for t in range(top + 1):
                        dist[stack[t]] = INF
                    size += 1
                    top = -1
                elif dist[w] == dist[u] + 1:
                    top += 1
                    stack[top] = w
                    iter_pos[top] = indptr[w]
                    via[top] = v
    return size


@njit
def unit_maxflow(adj_indptr, adj_arc, arc_to, cap, source, sink, limit):
    """BFS-augmenting unit-capacity max flow, stopping at ``limit``.

    Arc ``a`` and ``a ^ 1`` are a residual pair.  ``cap`` is mutated.
    """
    n_nodes = adj_indptr.shape[0] - 1
    parent_arc = np.empty(n_nodes, np.int64)
    queue = np.empty(n_nodes, np.int64)
    flow = 0
    while flow < limit:
        for i in range(n_nodes):
            parent_arc[i] = -1
        parent_arc[source] = -2
        qh = 0
        qt = 0
        queue[qt] = source
        qt += 1
        reached = False
        while qh < qt and not reached:
            u = queue[qh]
            qh += 1
            for ii in range(adj_indptr[u], adj_indptr[u + 1]):
                a = adj_arc[ii]
                v = arc_to[a]
                if cap[a] > 0 and parent_arc[v] == -1:
                    parent_arc[v] = a
                    if v == sink:
                        reached = True
                        break
                    queue[qt] = v
                    qt += 1
        if not reached:
            break
        v = sink
        while v != source:
            a = parent_arc[v]
            cap[a] -= 1
            cap[a ^ 1] += 1
            v = arc_to[a ^ 1]
        flow += 1
    return flow


@njit
def dfs_longest_path(indptr, indices, n, best_path):
    """Max DFS-stack directed path; roots and neighbors in index order.

    Writes the best path's vertices into ``best_path`` and returns its
    vertex count.  The recursion stack of a digraph DFS is always a
    directed path; with restarts the best stack over the whole run is
    reported.
    """
    color = np.zeros(n, np.int64)  # 0 new, 1 active, 2 finished
    stack = np.empty(n, np.int64)
    iter_pos = np.empty(n, np.int64)
    best_len = 0
    for root in range(n):
        if color[root] != 0:
            continue
        top = 0
        stack[0] = root
        iter_pos[0] = indptr[root]
        color[root] = 1
        if best_len < 1:
            best_len = 1
            best_path[0] = root
        while top >= 0:
            u = stack[top]
            ii = iter_pos[top]
            if ii >= indptr[u + 1]:
                color[u] = 2
                top -= 1
                continue
            iter_pos[top] = ii + 1
            v = indices[ii]
            if color[v] == 0:
                top += 1
                stack[top] = v
                iter_pos[top] = indptr[v]
                color[v] = 1
                if top + 1 > best_len:
                    best_len = top + 1
                    for t in range(best_len):
                        best_path[t] = stack[t]
    return best_len


@njit
def dfs_no_forward_violation(indptr, indices, n):
    """Check the DFS argument invariant: no arc finished -> unvisited.

    Returns (u, v) of the first violating arc seen at finish time, or
    (-1, -1).  Separate from dfs_longest_path to keep the hot kernel
    lean.
    """
    color = np.zeros(n, np.int64)
    stack = np.empty(n, np.int64)
    iter_pos = np.empty(n, np.int64)
    for root in range(n):
        if color[root] != 0:
            continue
        top = 0
        stack[0] = root
        iter_pos[0] = indptr[root]
        color[root] = 1
        while top >= 0:
            u = stack[top]
            ii = iter_pos[top]
            if ii >= indptr[u + 1]:
                color[u] = 2
                for jj in range(indptr[u], indptr[u + 1]):
                    if color[indices[jj]] == 0:
                        return u, indices[jj]
                top -= 1
                continue
            iter_pos[top] = ii + 1
            v = indices[ii]
            if color[v] == 0:
                top += 1
                stack[top] = v
                iter_pos[top] = indptr[v]
                color[v] = 1
    return -1, -1


@njit
def posa_ham_path(indptr, indices, n, x, y, max_rotations, restarts, rand_vals, out_path):
    """Rotation-extension search for a Hamilton path from x to y.

    Grows a path from ``x`` over V minus {y}; when every other vertex is
    on the path, rotates (endpoint ``x`` fixed) until the moving end is
    adjacent to ``y``.  Returns the path length in vertices (== n on
    success, 0 on failure).  ``rand_vals`` is a pre-drawn int64 array;
    the cursor wraps, so determinism is preserved across both the
    compiled and pure paths.
    """
    pos = np.empty(n, np.int64)
    order = np.empty(n, np.int64)
    cand = np.empty(n, np.int64)
    rcur = 0
    nrand = rand_vals.shape[0]
    rotations = 0
    for _ in range(restarts):
        for i in range(n):
            pos[i] = -1
        order[0] = x
        pos[x] = 0
        plen = 1
        while rotations <= max_rotations:
            z = order[plen - 1]
            if plen == n - 1:
                # everything but y covered: close onto y if possible
                done = False
                for ii in range(indptr[z], indptr[z + 1]):
                    if indices[ii] == y:
                        order[plen] = y
                        pos[y] = plen
                        plen += 1
                        done = True
                        break
                if done:
                    for t in range(n):
                        out_path[t] = order[t]
                    return n
            # try to extend with an unvisited vertex other than y
            ncand = 0
            for ii in range(indptr[z], indptr[z + 1]):
                v = indices[ii]
                if v != y and pos[v] == -1:
                    cand[ncand] = v
                    ncand += 1
            if ncand > 0:
                pick = cand[rand_vals[rcur % nrand] % ncand]
                rcur += 1
                order[plen] = pick
                pos[pick] = plen
                plen += 1
                continue
            # rotate: edge (z, order[i]) with i <= plen-3 flips the tail
            ncand = 0
            for ii in range(indptr[z], indptr[z + 1]):
                v = indices[ii]
                pv = pos[v]
                if pv >= 0 and pv <= plen - 3:
                    cand[ncand] = pv
                    ncand += 1
            if ncand == 0:
                break  # dead end: restart
            i = cand[rand_vals[rcur % nrand] % ncand]
            rcur += 1
            lo = i + 1
            hi = plen - 1
            while lo < hi:
                a = order[lo]
                b = order[hi]
                order[lo] = b
                order[hi] = a
                pos[a] = hi
                pos[b] = lo
                lo += 1
                hi -= 1
            rotations += 1
        if rotations > max_rotations:
            break
    return 0


@njit
def popcount64(x):
    c = 0
    while x != 0:
        x &= x - 1
        c += 1
    return c


@njit
def expander_e1_scan(adj_mask, n, r_cap, c_num, c_den):
    """Exhaustive (E1) check over all X with |X| <= r_cap.

    Expansion test: |N(X) setminus X| * c_den >= c_num * |X|.
    Returns the first violating subset as a bitmask, or 0.
    """
    total = np.int64(1) << n
    mask = np.int64(1)
    while mask < total:
        size = popcount64(mask)
        if size <= r_cap:
            nbh = np.int64(0)
            m = mask
            while m != 0:
                v = 0
                low = m & (-m)
                mm = low
                while mm > 1:
                    mm >>= 1
                    v += 1
                nbh |= adj_mask[v]
                m &= m - 1
            ext = popcount64(nbh & ~mask)
            if ext * c_den < c_num * size:
                return mask
        mask += 1
    return np.int64(0)


@njit
def expander_e2_scan(adj_mask, subset_masks):
    """Exhaustive (E2) check: every disjoint pair of listed subsets is
    joined by an edge.  Returns (i, j) of a violating pair or (-1, -1).
    """
    k = subset_masks.shape[0]
    for i in range(k):
        mi = subset_masks[i]
        for j in range(i + 1, k):
            mj = subset_masks[j]
            if mi & mj != 0:
                continue
            hit = False
            m = mi
            while m != 0:
                v = 0
                low = m & (-m)
                mm = low
                while mm > 1:
                    mm >>= 1
                    v += 1
                if adj_mask[v] & mj != 0:
                    hit = True
                    break
                m &= m - 1
            if not hit:
                return i, j
    return -1, -1


@njit
def edge_density_scan(adj_mask, n, bounds):
    """Exhaustive sparseness audit: |E(U)| <= bounds[|U|] for all U.

    ``bounds`` is float64 per subset size.  Returns the first violating
    subset mask, or 0.
    """
    total = np.int64(1) << n
    mask = np.int64(1)
    while mask < total:
        size = popcount64(mask)
        twice_edges = 0
        m = mask
        while m != 0:
            v = 0
            low = m & (-m)
            mm = low
            while mm > 1:
                mm >>= 1
                v += 1
            twice_edges += popcount64(adj_mask[v] & mask)
            m &= m - 1
        if twice_edges > 2.0 * bounds[size]:
            return mask
        mask += 1
    return np.int64(0)


@njit
def scan_free_disjoint_edge(eu, ev, owner, blocked, start):
    """Lowest-id free edge avoiding blocked vertices, from ``start`` on.

    Both blockedness and non-freeness are monotone during a game stage,
    so callers may resume from the returned position + 1.
    """
    m = eu.shape[0]
    ptr = start
    while ptr < m:
        if owner[ptr] == 0 and blocked[eu[ptr]] == 0 and blocked[ev[ptr]] == 0:
            return ptr
        ptr += 1
    return np.int64(-1)


@njit
def count_edges_between(indptr, indices, in_a, in_b):
    """Number of edges with one endpoint flagged in_a, other in_b."""
    n = indptr.shape[0] - 1
    cnt = 0
    for u in range(n):
        if in_a[u] == 0:
            continue
        for ii in range(indptr[u], indptr[u + 1]):
            if in_b[indices[ii]] != 0:
                cnt += 1
    return cnt
