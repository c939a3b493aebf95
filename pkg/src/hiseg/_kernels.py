"""Numba kernels for the two sequential inner loops.

Everything else in the build is vectorized; these loops (ordered
union-find during a merge round, and root resolution during extraction)
are inherently sequential and dominate runtime if left in pure Python.
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
def merge_round(edge_a, edge_b, edge_w, root_id, next_node):
    """Apply one round's chosen edges in sorted order.

    root_id maps each supervertex's component to its current dendrogram
    node id and is updated in place as merges are logged.  Returns the
    merge count, dense component labels (first-occurrence order), the
    dendrogram root per new component, and the logged record fields.
    """
    n = root_id.size
    parent = np.arange(n)
    k = edge_a.size
    out_a = np.empty(k, np.int64)
    out_b = np.empty(k, np.int64)
    out_w = np.empty(k, np.float64)
    cnt = 0
    for i in range(k):
        ra = _find(parent, edge_a[i])
        rb = _find(parent, edge_b[i])
        if ra == rb:
            continue
        out_a[cnt] = root_id[ra]
        out_b[cnt] = root_id[rb]
        out_w[cnt] = edge_w[i]
        parent[rb] = ra
        root_id[ra] = next_node + cnt
        cnt += 1
    comp_of = np.full(n, -1, np.int64)
    labels = np.empty(n, np.int64)
    new_root = np.empty(n, np.int64)
    c = 0
    for v in range(n):
        r = _find(parent, v)
        if comp_of[r] < 0:
            comp_of[r] = c
            new_root[c] = root_id[r]
            c += 1
        labels[v] = comp_of[r]
    return cnt, labels, new_root[:c], out_a[:cnt], out_b[:cnt], out_w[:cnt]


@njit(cache=True)
def leaf_roots(parent, n_leaves):
    """Resolve each leaf's root in a forest given as a parent array."""
    out = np.empty(n_leaves, np.int64)
    for i in range(n_leaves):
        r = i
        while parent[r] != r:
            r = parent[r]
        x = i
        while parent[x] != r:
            nxt = parent[x]
            parent[x] = r
            x = nxt
        out[i] = r
    return out
