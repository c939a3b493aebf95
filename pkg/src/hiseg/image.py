"""Raster containers shared by the whole pipeline."""

import numpy as np


class Image:
    """Dense multi-channel raster with intensities normalized to [0, 1].

    Data is stored as a (height, width, channels) float64 array with
    1 (grayscale) or 3 (RGB) channels.
    """

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise ValueError(
                "expected an HxW or HxWxC raster with 1 or 3 channels, "
                f"got shape {np.shape(data)}"
            )
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("zero-sized image")
        if not np.all(np.isfinite(arr)):
            raise ValueError("intensities must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("intensities must lie in [0, 1]")
        self.data = arr

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def channels(self):
        return self.data.shape[2]

    @property
    def pixel_count(self):
        return self.height * self.width

    def planes(self):
        """Row-major (pixel_count, channels) view of the intensities."""
        return self.data.reshape(-1, self.channels)

    def __eq__(self, other):
        return isinstance(other, Image) and np.array_equal(self.data, other.data)


class EdgeConfidenceMap:
    """Per-pixel boundary confidence in [0, 1], paired with an Image."""

    def __init__(self, conf):
        arr = np.asarray(conf, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"expected an HxW confidence raster, got shape {np.shape(conf)}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("zero-sized edge map")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("confidences must lie in [0, 1]")
        self.conf = arr

    @property
    def height(self):
        return self.conf.shape[0]

    @property
    def width(self):
        return self.conf.shape[1]

    def check_matches(self, img: Image):
        if (self.height, self.width) != (img.height, img.width):
            raise ValueError(
                f"edge map dimensions {self.width}x{self.height} do not match "
                f"image dimensions {img.width}x{img.height}"
            )
