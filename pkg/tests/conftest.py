"""Shared fixtures and independent oracle implementations.

The oracles here are deliberately naive (loops, dicts, brute force) so
they share no code path with the library.
"""

from collections import deque

import numpy as np
import pytest

from hiseg import Image


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timing tests measure steady state."""
    from hiseg import build_hierarchy, extract
    h = build_hierarchy(Image(np.zeros((2, 2))))
    extract(h, 2)


def random_image(rng, height, width, channels=3):
    return Image(rng.random((height, width, channels)))


def two_halves_image(height=4, width=4):
    """Left half intensity 0.0, right half 1.0."""
    a = np.zeros((height, width))
    a[:, width // 2:] = 1.0
    return Image(a)


def kruskal_mst_weights(n, edge_a, edge_b, weight):
    """Edge weights of a minimum spanning tree, ascending. Independent oracle."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    out = []
    for i in np.argsort(weight, kind="stable"):
        ra, rb = find(int(edge_a[i])), find(int(edge_b[i]))
        if ra != rb:
            parent[ra] = rb
            out.append(float(weight[i]))
    return sorted(out)


def naive_asa(s_labels, g_labels):
    inter = {}
    for sv, gv in zip(s_labels.ravel().tolist(), g_labels.ravel().tolist()):
        inter[(sv, gv)] = inter.get((sv, gv), 0) + 1
    best = {}
    for (sv, _), c in inter.items():
        best[sv] = max(best.get(sv, 0), c)
    return sum(best.values()) / s_labels.size


def naive_ue(s_labels, g_labels):
    inter = {}
    sp_size = {}
    for sv, gv in zip(s_labels.ravel().tolist(), g_labels.ravel().tolist()):
        inter[(sv, gv)] = inter.get((sv, gv), 0) + 1
        sp_size[sv] = sp_size.get(sv, 0) + 1
    total = 0
    for (sv, _), c in inter.items():
        total += min(c, sp_size[sv] - c)
    return total / s_labels.size


def naive_boundary_pixels(labels):
    """Pixels whose right or bottom neighbor has a different label."""
    h, w = labels.shape
    out = []
    for r in range(h):
        for c in range(w):
            if c + 1 < w and labels[r, c] != labels[r, c + 1]:
                out.append((r, c))
            elif r + 1 < h and labels[r, c] != labels[r + 1, c]:
                out.append((r, c))
    return out

def naive_br(s_labels, g_labels, eps):
    gt_b = naive_boundary_pixels(g_labels)
    if not gt_b:
        return 1.0
    s_b = naive_boundary_pixels(s_labels)
    tp = 0
    for (gr, gc) in gt_b:
        for (sr, sc) in s_b:
            if max(abs(gr - sr), abs(gc - sc)) <= eps:
                tp += 1
                break
    return tp / len(gt_b)


def region_is_connected(labels, value):
    """Flood-fill check that one label's pixel set is 4-connected."""
    coords = np.argwhere(labels == value)
    if coords.size == 0:
        return False
    member = {tuple(p) for p in coords.tolist()}
    seen = {tuple(coords[0])}
    queue = deque(seen)
    while queue:
        r, c = queue.popleft()
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if (nr, nc) in member and (nr, nc) not in seen:
                seen.add((nr, nc))
                queue.append((nr, nc))
    return len(seen) == len(member)


def all_regions_connected(labels, k):
    vals = np.unique(labels)
    if vals.size != k or vals.min() != 0 or vals.max() != k - 1:
        return False
    return all(region_is_connected(labels, v) for v in range(k))


def is_nested(fine_labels, coarse_labels):
    """Every fine region lies in exactly one coarse region."""
    mapping = {}
    for f, c in zip(fine_labels.ravel().tolist(), coarse_labels.ravel().tolist()):
        if f in mapping and mapping[f] != c:
            return False
        mapping[f] = c
    return True
