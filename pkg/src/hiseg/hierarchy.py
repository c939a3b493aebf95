"""Borůvka-style merge engine producing the full merge hierarchy.

Each round, every live region picks its minimum-weight incident edge
under a deterministic tie-break; the chosen edges are applied in
ascending order, the graph is contracted and flattened, and edge
weights are refreshed from the pooled region features.  The ordered
merge log is the dendrogram: cutting after the first n-k merges yields
exactly k connected regions, for any k.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .features import FeatureConfig
from .gridgraph import (
    build_grid_graph,
    contract_and_flatten,
    materialize_histograms,
    recompute_weights,
)
from .image import EdgeConfidenceMap, Image

__all__ = ["MergeRecord", "Hierarchy", "build_hierarchy"]


@dataclass(frozen=True)
class MergeRecord:
    step: int
    root_a: int
    root_b: int
    new_node: int
    weight: float
    iteration: int


class Hierarchy:
    """Immutable merge log over n leaves (one per pixel, row-major).

    Internal nodes are numbered densely n, n+1, ..., 2n-2 in merge
    order.  round_stats holds (vertices, edges) after every flatten,
    which makes the halving and planarity bounds directly checkable.
    """

    def __init__(self, *, width, height, root_a, root_b, new_node, weight,
                 iteration, round_stats=()):
        self.width = int(width)
        self.height = int(height)
        self.root_a = np.ascontiguousarray(root_a, dtype=np.int64)
        self.root_b = np.ascontiguousarray(root_b, dtype=np.int64)
        self.new_node = np.ascontiguousarray(new_node, dtype=np.int64)
        self.weight = np.ascontiguousarray(weight, dtype=np.float64)
        self.iteration = np.ascontiguousarray(iteration, dtype=np.int64)
        self.round_stats = tuple(round_stats)
        n = self.width * self.height
        if self.root_a.size != max(n - 1, 0):
            raise ValueError(
                f"expected {max(n - 1, 0)} merges for {n} leaves, got {self.root_a.size}"
            )

    @property
    def leaf_count(self):
        return self.width * self.height

    @property
    def merge_count(self):
        return self.root_a.size

    def iteration_count(self):
        """Number of merge rounds executed."""
        if self.iteration.size == 0:
            return 0
        return int(self.iteration.max()) + 1

    def record(self, step) -> MergeRecord:
        return MergeRecord(
            step=step,
            root_a=int(self.root_a[step]),
            root_b=int(self.root_b[step]),
            new_node=int(self.new_node[step]),
            weight=float(self.weight[step]),
            iteration=int(self.iteration[step]),
        )

    @property
    def merges(self):
        return [self.record(i) for i in range(self.merge_count)]

    def parent_array(self):
        """parent[node] over all 2n-1 nodes; roots point to themselves."""
        n = self.leaf_count
        parent = np.arange(2 * n - 1, dtype=np.int64)
        parent[self.root_a] = self.new_node
        parent[self.root_b] = self.new_node
        return parent

    def __eq__(self, other):
        return (
            isinstance(other, Hierarchy)
            and (self.width, self.height) == (other.width, other.height)
            and np.array_equal(self.root_a, other.root_a)
            and np.array_equal(self.root_b, other.root_b)
            and np.array_equal(self.new_node, other.new_node)
            and np.array_equal(self.weight, other.weight)
            and np.array_equal(self.iteration, other.iteration)
        )


def _choose_min_edges(g):
    """Chosen minimum edges of the round, in ascending (weight, tie) order.

    The tie-break orders equal weights by the smaller and then larger of
    the endpoints' representative original pixel ids, which is a total
    order because endpoint pairs are unique after flattening.  Two facts
    make a single stable sort on the weights sufficient: supervertex ids
    stay sorted by their minimum original pixel id across relabelings,
    and the edge list is kept in lexicographic endpoint order.  The
    weights are non-negative, so their IEEE bit patterns sort like
    unsigned integers (radix-sortable).
    """
    wbits = np.maximum(g.weight, 0.0).view(np.uint64)  # clears any -0.0
    order = np.argsort(wbits, kind="stable")
    # scatter descending ranks so each vertex keeps its cheapest edge's rank
    rev = order[::-1]
    desc = np.arange(g.m - 1, -1, -1)
    best_a = np.full(g.n, g.m, dtype=np.int64)
    best_a[g.edge_a[rev]] = desc
    best_b = np.full(g.n, g.m, dtype=np.int64)
    best_b[g.edge_b[rev]] = desc
    best_rank = np.minimum(best_a, best_b)
    if (best_rank == g.m).any():
        raise RuntimeError("disconnected region graph")
    return order[np.unique(best_rank)]


def build_hierarchy(img: Image, edge_map: EdgeConfidenceMap | None = None,
                    cfg: FeatureConfig | None = None, aggregate: bool = True,
                    ) -> Hierarchy:
    """Build the complete merge hierarchy for an image.

    With aggregate=False the initial edge weights are frozen (bundles
    still keep their minimum), which turns the build into a plain
    minimum-spanning-tree construction used by the oracle tests.
    """
    cfg = cfg or FeatureConfig()
    if edge_map is not None:
        edge_map.check_matches(img)
    cfg = cfg.with_edge_feature(cfg.use_edge_feature and edge_map is not None)

    g = build_grid_graph(img, edge_map, cfg)
    n = g.n
    root_id = np.arange(n, dtype=np.int64)
    next_node = n
    rec_a, rec_b, rec_w, rec_it = [], [], [], []
    round_stats = []
    iteration = 0

    while g.n > 1:
        chosen = _choose_min_edges(g)
        cnt, labels, new_root, out_a, out_b, out_w = _kernels.merge_round(
            g.edge_a[chosen], g.edge_b[chosen], g.weight[chosen],
            root_id, next_node,
        )
        rec_a.append(out_a)
        rec_b.append(out_b)
        rec_w.append(out_w)
        rec_it.append(np.full(cnt, iteration, dtype=np.int64))
        next_node += cnt
        g = contract_and_flatten(g, labels, g.n - cnt)
        root_id = new_root
        iteration += 1
        round_stats.append((g.n, g.m))
        if aggregate and g.n > 1:
            if g.hist is None and iteration >= cfg.hist_switch_iter:
                materialize_histograms(g, cfg)
            recompute_weights(g, iteration, cfg)

    merge_count = next_node - n
    return Hierarchy(
        width=img.width,
        height=img.height,
        root_a=np.concatenate(rec_a) if rec_a else np.empty(0, np.int64),
        root_b=np.concatenate(rec_b) if rec_b else np.empty(0, np.int64),
        new_node=n + np.arange(merge_count, dtype=np.int64),
        weight=np.concatenate(rec_w) if rec_w else np.empty(0),
        iteration=np.concatenate(rec_it) if rec_it else np.empty(0, np.int64),
        round_stats=round_stats,
    )
