"""Image file I/O: 8-bit color images, binary masks, 16-bit probability maps.

Color images are accepted as 8-bit PNG or JPEG and written as PNG so that
repeated augmentation rounds never re-compress lossily. Probability maps
travel as 16-bit grayscale PNG with value/65535 semantics, which round
trips exactly and keeps the median pipeline bit-deterministic. Masks are
8-bit grayscale, positive at values >= 128, written as 0/255.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from .color import ImageBuffer
from .errors import UnsupportedImageError

_DEEP_MODES = ("I;16", "I;16B", "I;16L", "I;16N", "I", "F")

MASK_POSITIVE_MIN = 128
PROB_MAP_SCALE = 65535


def _open(path) -> Image.Image:
    im = Image.open(path)
    im.load()
    return im


def load_image(path) -> ImageBuffer:
    """Read an 8-bit image as an ImageBuffer (values scaled to [0, 1])."""
    im = _open(path)
    if im.mode in _DEEP_MODES:
        raise UnsupportedImageError(f"{path}: unsupported bit depth (mode {im.mode}); only 8-bit images are supported")
    if im.mode != "RGB":
        im = im.convert("RGB")
    return ImageBuffer.from_uint8(np.asarray(im))


def save_image(img: ImageBuffer, path) -> None:
    """Write an ImageBuffer as an 8-bit image; use a .png path for lossless output."""
    Image.fromarray(img.to_uint8(), mode="RGB").save(path)


def load_mask(path) -> np.ndarray:
    """Read an 8-bit grayscale mask; pixels >= 128 count as positive."""
    im = _open(path)
    if im.mode in _DEEP_MODES:
        raise UnsupportedImageError(f"{path}: unsupported bit depth (mode {im.mode}); only 8-bit masks are supported")
    if im.mode != "L":
        im = im.convert("L")
    return np.asarray(im) >= MASK_POSITIVE_MIN


def save_mask(mask: np.ndarray, path) -> None:
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    Image.fromarray(np.where(m.astype(bool), 255, 0).astype(np.uint8), mode="L").save(path)


def load_prob_map(path) -> np.ndarray:
    """Read a 16-bit grayscale probability map as float64 in [0, 1]."""
    im = _open(path)
    if im.mode not in ("I;16", "I;16B", "I;16L", "I;16N", "I"):
        raise UnsupportedImageError(
            f"{path}: expected a 16-bit grayscale probability map, got mode {im.mode}"
        )
    data = np.asarray(im, dtype=np.int64)
    if data.min() < 0 or data.max() > PROB_MAP_SCALE:
        raise UnsupportedImageError(f"{path}: sample values outside the 16-bit range")
    return data.astype(np.float64) / PROB_MAP_SCALE


def save_prob_map(prob: np.ndarray, path) -> None:
    """Write a [0, 1] probability map as 16-bit grayscale PNG (value/65535)."""
    p = np.asarray(prob, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError(f"probability map must be 2-D, got shape {p.shape}")
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("probability map has values outside [0, 1]")
    codes = np.round(p * PROB_MAP_SCALE).astype(np.uint16)
    Image.fromarray(codes).save(path)
