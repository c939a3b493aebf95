"""Initial grid graph and the contracted region graph it evolves into.

The graph stays simple after every contraction: self-loops are dropped
and each bundle of parallel edges collapses to a single edge carrying
the bundle's minimum weight and the summed boundary statistics.  Since
edge contraction preserves planarity, the edge count obeys the Euler
bound m <= 3n throughout.
"""

import numpy as np

from .features import (
    BoundaryStat,
    FeatureConfig,
    VertexFeature,
    histogram_bin_index,
    rgb_to_unit_lab,
)
from .image import EdgeConfidenceMap, Image

__all__ = ["ContractedGraph", "build_grid_graph", "contract_and_flatten",
           "recompute_weights", "materialize_histograms"]


class ContractedGraph:
    """Region adjacency multigraph after flattening.

    Vertex arrays are indexed by supervertex id in [0, n); edge arrays
    are parallel to each other.  rep holds the smallest original pixel
    id inside each supervertex and provides the deterministic tie-break
    for equal-weight edges.
    """

    def __init__(self, *, width, height, n, edge_a, edge_b, weight, conf_sum,
                 pair_count, pixel_count, color_sum, hist, rep, root_of,
                 pixel_colors):
        self.width = width
        self.height = height
        self.n = n
        self.edge_a = edge_a
        self.edge_b = edge_b
        self.weight = weight
        self.conf_sum = conf_sum
        self.pair_count = pair_count
        self.pixel_count = pixel_count
        self.color_sum = color_sum
        self.hist = hist
        self.rep = rep
        self.root_of = root_of
        self.pixel_colors = pixel_colors  # (total pixels, channels), working color space
        self.pixel_conf = None  # set by build_grid_graph when an edge map is given

    @property
    def m(self):
        return self.edge_a.size

    @property
    def channels(self):
        return self.color_sum.shape[1]

    def vertex_feature(self, i) -> VertexFeature:
        hist = None if self.hist is None else self.hist[i].copy()
        return VertexFeature(
            pixel_count=int(self.pixel_count[i]),
            color_sum=self.color_sum[i].copy(),
            histogram=hist,
        )

    def boundary_stat(self, e) -> BoundaryStat:
        return BoundaryStat(conf_sum=float(self.conf_sum[e]),
                            pair_count=int(self.pair_count[e]))


def _grid_edges(width, height):
    """Endpoints of all 4-neighbor pixel pairs.

    Emitted in lexicographic (smaller endpoint, larger endpoint) order:
    for each pixel its right edge, then its down edge.  Later stages
    rely on the edge list staying in this order (a stable sort on the
    weights alone then realizes the deterministic tie-break).
    """
    npix = width * height
    p = np.arange(npix, dtype=np.int64)
    col = p % width
    row = p // width
    ea = np.repeat(p, 2)
    eb = np.empty(2 * npix, dtype=np.int64)
    eb[0::2] = p + 1
    eb[1::2] = p + width
    valid = np.empty(2 * npix, dtype=bool)
    valid[0::2] = col < width - 1
    valid[1::2] = row < height - 1
    return ea[valid], eb[valid]


def build_grid_graph(img: Image, edge_map: EdgeConfidenceMap | None = None,
                     cfg: FeatureConfig | None = None) -> ContractedGraph:
    """One supervertex per pixel, one edge per 4-neighbor pair."""
    cfg = cfg or FeatureConfig()
    if edge_map is not None:
        edge_map.check_matches(img)
    use_edge = cfg.use_edge_feature and edge_map is not None
    cfg = cfg.with_edge_feature(use_edge)

    npix = img.pixel_count
    colors = img.planes()
    if cfg.color_space == "lab":
        if img.channels != 3:
            raise ValueError("CIELAB color space requires a 3-channel image")
        colors = rgb_to_unit_lab(colors)

    ea, eb = _grid_edges(img.width, img.height)
    if edge_map is not None:
        conf = edge_map.conf.ravel()
        conf_sum = 0.5 * (conf[ea] + conf[eb])
    else:
        conf_sum = np.zeros(ea.size)

    g = ContractedGraph(
        width=img.width,
        height=img.height,
        n=npix,
        edge_a=ea,
        edge_b=eb,
        weight=np.zeros(ea.size),
        conf_sum=conf_sum,
        pair_count=np.ones(ea.size, dtype=np.int64),
        pixel_count=np.ones(npix, dtype=np.int64),
        color_sum=colors.copy(),
        hist=None,
        rep=np.arange(npix, dtype=np.int64),
        root_of=np.arange(npix, dtype=np.int64),
        pixel_colors=colors,
    )
    if cfg.hist_switch_iter <= 0:
        materialize_histograms(g, cfg)
    recompute_weights(g, 0, cfg)
    return g


def materialize_histograms(g: ContractedGraph, cfg: FeatureConfig):
    """Build per-region color histograms in one pass over the original pixels."""
    c = g.channels
    k = cfg.hist_bins
    bins = histogram_bin_index(g.pixel_colors, k)  # (npix, channels)
    idx = (g.root_of[:, None] * c + np.arange(c, dtype=np.int64)[None, :]) * k + bins
    counts = np.bincount(idx.ravel(), minlength=g.n * c * k)
    g.hist = counts.reshape(g.n, c, k).astype(np.float64)


def recompute_weights(g: ContractedGraph, iteration: int, cfg: FeatureConfig):
    """Refresh every edge weight from the current aggregated features."""
    ea, eb = g.edge_a, g.edge_b
    if iteration < cfg.hist_switch_iter:
        means = g.color_sum / g.pixel_count[:, None]
        dc = np.abs(means[ea] - means[eb]).sum(axis=1)
    else:
        if g.hist is None:
            raise RuntimeError(f"histograms not populated at iteration {iteration}")
        hn = g.hist / g.pixel_count[:, None, None]
        a = hn[ea]
        b = hn[eb]
        dc = 0.5 * ((a - b) ** 2 / (a + b + cfg.chi2_epsilon)).sum(axis=(1, 2))
    if cfg.use_edge_feature:
        de = g.conf_sum / g.pair_count + cfg.edge_epsilon
    else:
        de = 1.0
    g.weight = dc * de


def contract_and_flatten(g: ContractedGraph, labels, n_new=None) -> ContractedGraph:
    """Collapse supervertices by label, drop self-loops, merge parallel edges.

    labels maps every current supervertex onto a dense range [0, n_new).
    Parallel edges keep the minimum full-precision weight; their boundary
    statistics are summed so the average confidence stays exact over the
    whole shared boundary.
    """
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    if labels.shape != (g.n,):
        raise ValueError(f"labels must have shape ({g.n},), got {labels.shape}")
    if n_new is None:
        n_new = int(labels.max()) + 1 if labels.size else 0
    if labels.size and (labels.min() < 0 or labels.max() >= n_new):
        raise ValueError("labels out of range")
    sizes = np.bincount(labels, minlength=n_new)
    if (sizes == 0).any():
        raise ValueError("labels not surjective onto the new id range")

    pixel_count = np.bincount(labels, weights=g.pixel_count, minlength=n_new)
    pixel_count = pixel_count.astype(np.int64)
    color_sum = np.stack(
        [np.bincount(labels, weights=g.color_sum[:, c], minlength=n_new)
         for c in range(g.channels)],
        axis=1,
    )
    hist = None
    if g.hist is not None:
        hist = np.zeros((n_new,) + g.hist.shape[1:])
        np.add.at(hist, labels, g.hist)
    rep = np.full(n_new, g.root_of.size, dtype=np.int64)
    np.minimum.at(rep, labels, g.rep)
    root_of = labels[g.root_of]

    na = labels[g.edge_a]
    nb = labels[g.edge_b]
    keep = na != nb
    lo = np.minimum(na[keep], nb[keep])
    hi = np.maximum(na[keep], nb[keep])
    w = g.weight[keep]
    cs = g.conf_sum[keep]
    pc = g.pair_count[keep]
    if lo.size:
        key = lo * n_new + hi
        order = np.argsort(key, kind="stable")
        ks = key[order]
        starts = np.flatnonzero(np.concatenate([[True], ks[1:] != ks[:-1]]))
        edge_a = lo[order][starts]
        edge_b = hi[order][starts]
        weight = np.minimum.reduceat(w[order], starts)
        conf_sum = np.add.reduceat(cs[order], starts)
        pair_count = np.add.reduceat(pc[order], starts)
    else:
        edge_a = np.empty(0, dtype=np.int64)
        edge_b = np.empty(0, dtype=np.int64)
        weight = np.empty(0)
        conf_sum = np.empty(0)
        pair_count = np.empty(0, dtype=np.int64)

    return ContractedGraph(
        width=g.width,
        height=g.height,
        n=n_new,
        edge_a=edge_a,
        edge_b=edge_b,
        weight=weight,
        conf_sum=conf_sum,
        pair_count=pair_count,
        pixel_count=pixel_count,
        color_sum=color_sum,
        hist=hist,
        rep=rep,
        root_of=root_of,
        pixel_colors=g.pixel_colors,
    )
