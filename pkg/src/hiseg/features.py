"""Region features and inter-region distances.

Two feature families drive the merge order: color (mean color early,
chi-square over per-channel histograms once regions are large enough)
and the average boundary confidence between two regions.  The combined
dissimilarity is their product.
"""

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "FeatureConfig",
    "BoundaryStat",
    "VertexFeature",
    "color_distance",
    "edge_distance",
    "combined_distance",
    "merge_features",
    "chi_square",
    "histogram_bin_index",
    "rgb_to_unit_lab",
]


@dataclass
class FeatureConfig:
    """Knobs for feature computation.

    hist_switch_iter: first merge round that compares histograms instead
        of mean colors.
    hist_bins: uniform bins per channel over [0, 1].
    edge_epsilon: floor added to the average boundary confidence so the
        multiplicative combination never zeroes out color ordering.
    chi2_epsilon: denominator guard for empty histogram bins.
    """

    hist_switch_iter: int = 4
    hist_bins: int = 20
    edge_epsilon: float = 0.01
    chi2_epsilon: float = 1e-10
    use_edge_feature: bool = True
    color_space: str = "rgb"  # "rgb" or "lab"

    def __post_init__(self):
        if self.hist_switch_iter < 0:
            raise ValueError("hist_switch_iter must be >= 0")
        if self.hist_bins < 1:
            raise ValueError("hist_bins must be >= 1")
        if self.edge_epsilon <= 0:
            raise ValueError("edge_epsilon must be > 0")
        if self.chi2_epsilon <= 0:
            raise ValueError("chi2_epsilon must be > 0")
        if self.color_space not in ("rgb", "lab"):
            raise ValueError(f"unknown color space {self.color_space!r}")

    def with_edge_feature(self, enabled):
        return replace(self, use_edge_feature=enabled)


@dataclass
class BoundaryStat:
    """Accumulated confidence over the original pixel pairs crossing a boundary."""

    conf_sum: float
    pair_count: int


@dataclass
class VertexFeature:
    """Aggregated statistics of one region.

    color_sum is the per-channel sum of member pixel intensities, so the
    mean color is exact under merging.  The histogram holds integer
    counts per channel and bin; it may be absent before the switch round.
    """

    pixel_count: int
    color_sum: np.ndarray
    histogram: np.ndarray | None = None  # (channels, bins) counts

    @property
    def mean_color(self):
        return self.color_sum / self.pixel_count


def chi_square(ha, hb, eps):
    """0.5 * sum((a-b)^2 / (a+b+eps)) over all bins of two histograms."""
    ha = np.asarray(ha, dtype=np.float64)
    hb = np.asarray(hb, dtype=np.float64)
    return float(0.5 * np.sum((ha - hb) ** 2 / (ha + hb + eps)))


def color_distance(a: VertexFeature, b: VertexFeature, iteration: int, cfg: FeatureConfig):
    """Color dissimilarity between two regions at a given merge round.

    Before the switch round this is the L1 distance of mean colors; from
    the switch round on it is the chi-square distance of unit-mass
    per-channel histograms.
    """
    if iteration < cfg.hist_switch_iter:
        return float(np.abs(a.mean_color - b.mean_color).sum())
    if a.histogram is None or b.histogram is None:
        raise RuntimeError(f"histograms not populated at iteration {iteration}")
    return chi_square(
        a.histogram / a.pixel_count,
        b.histogram / b.pixel_count,
        cfg.chi2_epsilon,
    )


def edge_distance(bs: BoundaryStat, cfg: FeatureConfig):
    """Average boundary confidence plus a small floor; 1 when disabled."""
    if bs.pair_count < 1:
        raise RuntimeError("boundary with pair_count < 1")
    if not cfg.use_edge_feature:
        return 1.0
    return bs.conf_sum / bs.pair_count + cfg.edge_epsilon


def combined_distance(a, b, bs, iteration, cfg):
    return color_distance(a, b, iteration, cfg) * edge_distance(bs, cfg)


def merge_features(a: VertexFeature, b: VertexFeature) -> VertexFeature:
    """Pool two regions: counts, color sums, and histograms all add."""
    hist = None
    if a.histogram is not None and b.histogram is not None:
        hist = a.histogram + b.histogram
    elif a.histogram is not None or b.histogram is not None:
        raise ValueError("cannot merge a feature with histogram into one without")
    return VertexFeature(
        pixel_count=a.pixel_count + b.pixel_count,
        color_sum=a.color_sum + b.color_sum,
        histogram=hist,
    )


def histogram_bin_index(values, bins):
    """Uniform binning of [0, 1] values; the value 1.0 lands in the top bin."""
    idx = (np.asarray(values, dtype=np.float64) * bins).astype(np.int64)
    return np.minimum(idx, bins - 1)


# sRGB -> CIELAB, rescaled so every channel lies in [0, 1] again.
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_D65_WHITE = np.array([0.95047, 1.0, 1.08883])


def rgb_to_unit_lab(rgb):
    """Convert (..., 3) sRGB in [0, 1] to CIELAB rescaled into [0, 1].

    L/100 and (a+128)/255, (b+128)/255; values are clipped to the unit
    interval so downstream binning stays valid.
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    linear = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _SRGB_TO_XYZ.T / _D65_WHITE
    f = np.where(xyz > (6 / 29) ** 3, np.cbrt(xyz), xyz / (3 * (6 / 29) ** 2) + 4 / 29)
    lab = np.empty_like(xyz)
    lab[..., 0] = 116 * f[..., 1] - 16
    lab[..., 1] = 500 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200 * (f[..., 1] - f[..., 2])
    out = np.empty_like(lab)
    out[..., 0] = lab[..., 0] / 100.0
    out[..., 1] = (lab[..., 1] + 128.0) / 255.0
    out[..., 2] = (lab[..., 2] + 128.0) / 255.0
    return np.clip(out, 0.0, 1.0)
