"""Deterministic synthetic digit images in MNIST IDX format.

The experiment pipeline consumes MNIST IDX files; when the real dataset
is unavailable this module renders digit glyphs (DejaVu fonts bundled
with matplotlib) at 4x resolution with random font, size, rotation,
shear, and translation, then downsamples to antialiased 28x28
grayscale.  The result matches MNIST's container format and broad
statistics (a single ~20x20 ink blob of 60..160 pixels above the usual
binarization threshold), and preserves the digit topology the
experiments care about: 0, 4, 6, 8, 9 render with their counters
(holes) closed in these fonts.

Rendering is deterministic given the seed and environment (PIL's
rasterizer is deterministic for a fixed version).
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .ingest import ImageSet, LabelSet, serialize_idx

_SUPER = 4  # supersampling factor
_SIZE = 28

_FONT_FILES = (
    "DejaVuSans.ttf",
    "DejaVuSans-Bold.ttf",
    "DejaVuSans-Oblique.ttf",
    "DejaVuSerif.ttf",
    "DejaVuSerif-Bold.ttf",
    "DejaVuSansMono.ttf",
    "DejaVuSansMono-Bold.ttf",
    "DejaVuSansMono-Oblique.ttf",
)


def _font_dir() -> str:
    import matplotlib

    return os.path.join(matplotlib.get_data_path(), "fonts", "ttf")


_FONT_CACHE: dict = {}


def _font(name: str, size: int) -> ImageFont.FreeTypeFont:
    key = (name, size)
    if key not in _FONT_CACHE:
        _FONT_CACHE[key] = ImageFont.truetype(os.path.join(_font_dir(), name), size)
    return _FONT_CACHE[key]


def render_digit(digit: int, rng: np.random.Generator) -> np.ndarray:
    """One jittered 28x28 uint8 glyph image of the given digit."""
    big = _SIZE * _SUPER
    font_name = _FONT_FILES[rng.integers(0, len(_FONT_FILES))]
    size = int(rng.integers(16, 20)) * _SUPER
    angle = rng.uniform(-12.0, 12.0)
    shear = rng.uniform(-0.15, 0.15)
    dx = rng.uniform(-1.5, 1.5) * _SUPER
    dy = rng.uniform(-1.5, 1.5) * _SUPER
    peak = int(rng.integers(230, 256))

    img = Image.new("L", (big, big), 0)
    draw = ImageDraw.Draw(img)
    draw.text(
        (big / 2, big / 2), str(digit), fill=255,
        font=_font(font_name, size), anchor="mm",
        stroke_width=_SUPER, stroke_fill=255,
    )

    # affine about the center: rotate, shear, then jitter-translate;
    # PIL wants the output->input map, so build the forward matrix and invert
    c = big / 2
    theta = np.deg2rad(angle)
    rot = np.array([[np.cos(theta), -np.sin(theta), 0], [np.sin(theta), np.cos(theta), 0], [0, 0, 1]])
    shr = np.array([[1, shear, 0], [0, 1, 0], [0, 0, 1]])
    to_origin = np.array([[1, 0, -c], [0, 1, -c], [0, 0, 1]])
    back = np.array([[1, 0, c + dx], [0, 1, c + dy], [0, 0, 1]])
    forward = back @ rot @ shr @ to_origin
    inv = np.linalg.inv(forward)
    img = img.transform((big, big), Image.AFFINE, tuple(inv[:2].ravel()), resample=Image.BILINEAR)

    small = img.resize((_SIZE, _SIZE), Image.LANCZOS)
    arr = np.asarray(small, dtype=np.float64) * (peak / 255.0)
    return np.clip(np.round(arr), 0, 255).astype(np.uint8)


def generate_dataset(n_images: int, seed: int = 0):
    """Balanced labeled image set: digit of row i is i mod 10."""
    rng = np.random.default_rng(seed)
    images = np.empty((n_images, _SIZE, _SIZE), dtype=np.uint8)
    labels = np.empty(n_images, dtype=np.uint8)
    for i in range(n_images):
        digit = i % 10
        images[i] = render_digit(digit, rng)
        labels[i] = digit
    return ImageSet(images), LabelSet(labels)


def write_dataset(out_dir, n_images: int, seed: int = 0, prefix: str = "train"):
    """Write IDX image/label files; returns the two paths."""
    os.makedirs(out_dir, exist_ok=True)
    images, labels = generate_dataset(n_images, seed)
    img_path = os.path.join(out_dir, f"{prefix}-images-idx3-ubyte")
    lab_path = os.path.join(out_dir, f"{prefix}-labels-idx1-ubyte")
    with open(img_path, "wb") as f:
        f.write(serialize_idx(images))
    with open(lab_path, "wb") as f:
        f.write(serialize_idx(labels))
    return img_path, lab_path
