"""MNIST IDX parsing and image-to-point-cloud conversion.

The IDX container is read bit-exactly: 4-byte big-endian magic
(0x00000803 for images, 0x00000801 for labels), big-endian dimension
sizes, unsigned-byte payload.  Files must be pre-decompressed; gzip is
not handled here.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import Truncated, WrongMagic

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

DEFAULT_THRESHOLD = 102  # ~0.4 * 255, common MNIST binarization level


@dataclass(frozen=True)
class ImageSet:
    """Grayscale image stack, shape (count, rows, cols), uint8."""

    images: np.ndarray

    @property
    def count(self) -> int:
        return self.images.shape[0]


@dataclass(frozen=True)
class LabelSet:
    """Digit labels in 0..9, shape (count,), uint8."""

    labels: np.ndarray

    @property
    def count(self) -> int:
        return self.labels.shape[0]


def parse_idx(data: bytes, kind: str):
    """Parse a complete IDX byte string.

    kind is "images" or "labels" and must match the file's magic number.
    Raises WrongMagic on a kind/file mismatch and Truncated when the
    declared item count exceeds the payload.
    """
    if kind not in ("images", "labels"):
        raise ValueError(f"kind must be 'images' or 'labels', got {kind!r}")
    if len(data) < 8:
        raise Truncated(f"IDX header needs at least 8 bytes, got {len(data)}")
    magic, count = struct.unpack(">ii", data[:8])
    if kind == "images":
        if magic != IMAGE_MAGIC:
            raise WrongMagic(f"expected image magic {IMAGE_MAGIC}, got {magic}")
        if len(data) < 16:
            raise Truncated("image IDX header needs 16 bytes")
        rows, cols = struct.unpack(">ii", data[8:16])
        need = 16 + count * rows * cols
        if len(data) < need:
            raise Truncated(f"declared {count} images need {need} bytes, got {len(data)}")
        raw = np.frombuffer(data, dtype=np.uint8, count=count * rows * cols, offset=16)
        return ImageSet(raw.reshape(count, rows, cols).copy())
    if magic != LABEL_MAGIC:
        raise WrongMagic(f"expected label magic {LABEL_MAGIC}, got {magic}")
    need = 8 + count
    if len(data) < need:
        raise Truncated(f"declared {count} labels need {need} bytes, got {len(data)}")
    return LabelSet(np.frombuffer(data, dtype=np.uint8, count=count, offset=8).copy())


def serialize_idx(record: ImageSet | LabelSet) -> bytes:
    """Inverse of parse_idx; emits the bit-exact IDX layout."""
    if isinstance(record, ImageSet):
        count, rows, cols = record.images.shape
        header = struct.pack(">iiii", IMAGE_MAGIC, count, rows, cols)
        return header + record.images.astype(np.uint8).tobytes()
    header = struct.pack(">ii", LABEL_MAGIC, record.labels.shape[0])
    return header + record.labels.astype(np.uint8).tobytes()


def load_images(path) -> ImageSet:
    with open(path, "rb") as f:
        return parse_idx(f.read(), "images")


def load_labels(path) -> LabelSet:
    with open(path, "rb") as f:
        return parse_idx(f.read(), "labels")


def image_to_point_cloud(image: np.ndarray, threshold: int = DEFAULT_THRESHOLD) -> np.ndarray:
    """Convert a grayscale grid to a 2-D point cloud, one point per ink pixel.

    A pixel at (row, col) with intensity strictly above `threshold` becomes
    the point (col, rows-1 - row): x grows rightward, y grows upward so the
    cloud is visually upright.  Points come out in row-major scan order.
    An empty cloud is a legal return.
    """
    image = np.asarray(image)
    rows = image.shape[0]
    r, c = np.nonzero(image > threshold)
    cloud = np.empty((r.size, 2), dtype=np.float64)
    cloud[:, 0] = c
    cloud[:, 1] = rows - 1 - r
    return cloud
