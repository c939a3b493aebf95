"""Scale queries against a built hierarchy.

Any region count k is obtained by replaying the first n-k merges with a
union-find, so one build serves every scale without rework.  Labels are
canonicalized by first occurrence in row-major order.
"""

import os
import struct

import numpy as np

from . import _kernels
from .hierarchy import Hierarchy

__all__ = ["Segmentation", "extract", "extract_many",
           "export_dendrogram", "import_dendrogram"]

_MAGIC = b"SHDG"
_VERSION = 1
_HEADER = struct.Struct("<HIIQ")  # version, width, height, leaf count
_RECORD_DTYPE = np.dtype([
    ("root_a", "<u8"),
    ("root_b", "<u8"),
    ("new_node", "<u8"),
    ("weight", "<f8"),
    ("iteration", "<u4"),
])


class Segmentation:
    """Per-pixel region labels in [0, k) at one scale."""

    def __init__(self, labels, k=None):
        labels = np.ascontiguousarray(labels, dtype=np.int64)
        if labels.ndim != 2:
            raise ValueError(f"labels must be 2-D, got shape {labels.shape}")
        if k is None:
            k = int(labels.max()) + 1 if labels.size else 0
        self.labels = labels
        self.k = int(k)

    @property
    def height(self):
        return self.labels.shape[0]

    @property
    def width(self):
        return self.labels.shape[1]

    @classmethod
    def from_raw_labels(cls, labels):
        """Canonicalize an arbitrary label grid (dense ids, scan order)."""
        labels = np.asarray(labels)
        return cls(canonical_labels(labels.ravel()).reshape(labels.shape))


def canonical_labels(raw):
    """Renumber labels by first occurrence in the flat scan order."""
    _, first, inv = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inv]


def _canonical_dense(raw, size):
    """Same as canonical_labels for values known to lie in [0, size)."""
    pos = np.arange(raw.size, dtype=np.int64)
    first = np.empty(size, dtype=np.int64)
    first[raw[::-1]] = pos[::-1]  # first occurrence is written last
    first_pos = first[raw]
    ranks = np.cumsum(first_pos == pos) - 1
    return ranks[first_pos]


def extract(h: Hierarchy, k: int) -> Segmentation:
    """Segmentation with exactly k regions, canonical labeling."""
    n = h.leaf_count
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    t = n - k
    parent = np.arange(2 * n - 1, dtype=np.int64)
    parent[h.root_a[:t]] = h.new_node[:t]
    parent[h.root_b[:t]] = h.new_node[:t]
    roots = _kernels.leaf_roots(parent, n)
    labels = _canonical_dense(roots, 2 * n - 1).reshape(h.height, h.width)
    return Segmentation(labels, k)


def extract_many(h: Hierarchy, ks) -> list:
    """Segmentations for every requested k, in input order."""
    ks = [int(k) for k in ks]
    n = h.leaf_count
    for k in ks:
        if not 1 <= k <= n:
            raise ValueError(f"k must be in [1, {n}], got {k}")
    return [extract(h, k) for k in ks]


def export_dendrogram(h: Hierarchy, path):
    """Write the merge log to a little-endian binary file."""
    records = np.empty(h.merge_count, dtype=_RECORD_DTYPE)
    records["root_a"] = h.root_a
    records["root_b"] = h.root_b
    records["new_node"] = h.new_node
    records["weight"] = h.weight
    records["iteration"] = h.iteration
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "wb") as f:
            f.write(_MAGIC)
            f.write(_HEADER.pack(_VERSION, h.width, h.height, h.leaf_count))
            f.write(records.tobytes())
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"failed to write dendrogram to {path}: {exc}") from exc
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def import_dendrogram(path) -> Hierarchy:
    """Read a dendrogram file back into a Hierarchy."""
    try:
        with open(path, "rb") as f:
            blob = f.read()
    except OSError as exc:
        raise OSError(f"failed to read dendrogram from {path}: {exc}") from exc
    if blob[:4] != _MAGIC:
        raise ValueError(f"{path}: not a dendrogram file (bad magic)")
    version, width, height, leaf_count = _HEADER.unpack_from(blob, 4)
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported dendrogram version {version}")
    body = blob[4 + _HEADER.size:]
    expected = (leaf_count - 1) * _RECORD_DTYPE.itemsize if leaf_count else 0
    if len(body) != expected:
        raise ValueError(
            f"{path}: expected {expected} record bytes, found {len(body)}"
        )
    records = np.frombuffer(body, dtype=_RECORD_DTYPE)
    return Hierarchy(
        width=width,
        height=height,
        root_a=records["root_a"].astype(np.int64),
        root_b=records["root_b"].astype(np.int64),
        new_node=records["new_node"].astype(np.int64),
        weight=records["weight"].astype(np.float64),
        iteration=records["iteration"].astype(np.int64),
    )
