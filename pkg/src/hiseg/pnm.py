"""Binary PNM (P5/P6) decoding and encoding, plus label and overlay output.

The decoder works on raw bytes, never reads past the declared payload,
and reports parse failures with the byte offset where they occurred.
"""

import os

import numpy as np

from .extract import Segmentation
from .image import EdgeConfidenceMap, Image

__all__ = ["PnmParseError", "read_image", "read_edge_map", "write_image",
           "read_labels", "write_labels", "write_overlay"]

_WHITESPACE = b" \t\n\r\x0b\x0c"


class PnmParseError(ValueError):
    """Malformed PNM input; carries the byte offset of the failure."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def fail(self, message):
        raise PnmParseError(message, self.pos)

    def skip_ws(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos:self.pos + 1]
            if c in (b"#",):
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            elif c in _WHITESPACE:
                self.pos += 1
            else:
                return

    def read_int(self, what):
        self.skip_ws()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos:self.pos + 1].isdigit():
            self.pos += 1
        if self.pos == start:
            self.fail(f"expected {what}")
        return int(data[start:self.pos])


def _parse_header(data, magics):
    r = _Reader(data)
    magic = data[:2]
    if magic not in magics:
        r.fail(f"unsupported magic {magic!r}, expected one of {sorted(magics)}")
    r.pos = 2
    width = r.read_int("width")
    height = r.read_int("height")
    maxval = r.read_int("maxval")
    if width < 1 or height < 1:
        r.fail(f"invalid dimensions {width}x{height}")
    if not 1 <= maxval <= 65535:
        r.fail(f"invalid maxval {maxval}")
    # exactly one whitespace byte separates the header from the payload
    if r.pos >= len(data) or data[r.pos:r.pos + 1] not in _WHITESPACE:
        r.fail("expected single whitespace before payload")
    r.pos += 1
    return magic, width, height, maxval, r.pos


def _read_payload(data, offset, count, bytes_per_sample):
    need = count * bytes_per_sample
    got = len(data) - offset
    if got < need:
        raise PnmParseError(
            f"truncated payload: expected {need} bytes, got {got} "
            f"(missing {need - got})",
            len(data),
        )
    payload = data[offset:offset + need]
    if bytes_per_sample == 1:
        return np.frombuffer(payload, dtype=np.uint8)
    return np.frombuffer(payload, dtype=">u2")


def _decode(data, magics):
    magic, width, height, maxval, offset = _parse_header(data, magics)
    channels = 3 if magic == b"P6" else 1
    samples = _read_payload(data, offset, width * height * channels,
                            2 if maxval > 255 else 1)
    if samples.max(initial=0) > maxval:
        raise PnmParseError(f"sample value exceeds maxval {maxval}", offset)
    return magic, width, height, maxval, samples


def read_image(path) -> Image:
    """Decode a P5 (grayscale) or P6 (RGB) file with maxval 255."""
    with open(path, "rb") as f:
        data = f.read()
    magic, width, height, maxval, samples = _decode(data, {b"P5", b"P6"})
    if maxval != 255:
        raise PnmParseError(f"unsupported maxval {maxval}, expected 255", 2)
    channels = 3 if magic == b"P6" else 1
    arr = samples.astype(np.float64).reshape(height, width, channels) / 255.0
    return Image(arr)


def read_edge_map(path) -> EdgeConfidenceMap:
    """Decode a P5 file with maxval 255 into per-pixel confidences."""
    with open(path, "rb") as f:
        data = f.read()
    _, width, height, maxval, samples = _decode(data, {b"P5"})
    if maxval != 255:
        raise PnmParseError(f"unsupported maxval {maxval}, expected 255", 2)
    return EdgeConfidenceMap(samples.astype(np.float64).reshape(height, width) / 255.0)


def _atomic_write(path, blob):
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "wb") as f:
            f.write(blob)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def write_image(img: Image, path):
    """Encode an Image as P5 (1 channel) or P6 (3 channels), maxval 255."""
    magic = b"P6" if img.channels == 3 else b"P5"
    samples = np.rint(img.data * 255.0).astype(np.uint8)
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    _atomic_write(path, header + samples.tobytes())


def write_labels(s: Segmentation, path, fmt="pgm16"):
    """Write a label grid, either as 16-bit P5 or as a CSV text grid."""
    if fmt == "pgm16":
        if s.k > 65536 or s.labels.max(initial=0) > 65535:
            raise ValueError(
                f"{s.k} labels exceed the 16-bit pgm16 range; use the csv format"
            )
        header = b"P5\n%d %d\n65535\n" % (s.width, s.height)
        _atomic_write(path, header + s.labels.astype(">u2").tobytes())
    elif fmt == "csv":
        lines = "\n".join(",".join(str(v) for v in row) for row in s.labels)
        _atomic_write(path, (lines + "\n").encode("ascii"))
    else:
        raise ValueError(f"unknown label format {fmt!r}")


def read_labels(path) -> np.ndarray:
    """Read a label grid written by write_labels (pgm16 or csv)."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:2] == b"P5":
        _, width, height, maxval, samples = _decode(data, {b"P5"})
        return samples.astype(np.int64).reshape(height, width)
    try:
        rows = [
            [int(v) for v in line.split(",")]
            for line in data.decode("ascii").splitlines()
            if line.strip()
        ]
    except (UnicodeDecodeError, ValueError) as exc:
        raise ValueError(f"{path}: not a pgm16 or csv label grid: {exc}") from exc
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError(f"{path}: ragged or empty csv label grid")
    return np.asarray(rows, dtype=np.int64)


def write_overlay(img: Image, s: Segmentation, path):
    """Write the image as P6 with region boundary pixels painted pure red."""
    if (s.height, s.width) != (img.height, img.width):
        raise ValueError(
            f"segmentation {s.width}x{s.height} does not match "
            f"image {img.width}x{img.height}"
        )
    rgb = np.rint(img.data * 255.0).astype(np.uint8)
    if rgb.shape[2] == 1:
        rgb = np.repeat(rgb, 3, axis=2)
    labels = s.labels
    mask = np.zeros(labels.shape, dtype=bool)
    diff_h = labels[:, :-1] != labels[:, 1:]
    diff_v = labels[:-1, :] != labels[1:, :]
    mask[:, :-1] |= diff_h
    mask[:, 1:] |= diff_h
    mask[:-1, :] |= diff_v
    mask[1:, :] |= diff_v
    rgb[mask] = (255, 0, 0)
    header = b"P6\n%d %d\n255\n" % (img.width, img.height)
    _atomic_write(path, header + rgb.tobytes())
