"""Superpixel hierarchy: one region-merging build answers every scale.

Builds a complete merge hierarchy over an image by repeated rounds of
minimum-edge region merging with edge contraction and feature pooling,
then extracts any number of superpixels from the prebuilt hierarchy and
scores segmentations with standard benchmark metrics.
"""

from .extract import (
    Segmentation,
    export_dendrogram,
    extract,
    extract_many,
    import_dendrogram,
)
from .features import (
    BoundaryStat,
    FeatureConfig,
    VertexFeature,
    color_distance,
    combined_distance,
    edge_distance,
    merge_features,
)
from .gridgraph import ContractedGraph, build_grid_graph, contract_and_flatten
from .hierarchy import Hierarchy, MergeRecord, build_hierarchy
from .image import EdgeConfidenceMap, Image
from .metrics import (
    GroundTruth,
    MetricsReport,
    asa,
    boundary_mask,
    boundary_recall,
    evaluate,
    under_seg_error,
)
from .pnm import (
    PnmParseError,
    read_edge_map,
    read_image,
    read_labels,
    write_image,
    write_labels,
    write_overlay,
)

__version__ = "0.1.0"
