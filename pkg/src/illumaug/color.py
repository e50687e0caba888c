"""Core color math: image buffers, diagonal chromatic adaptation, gamma
mapping, sRGB transfer functions, and CIE L*a*b* conversion.

Images are (H, W, 3) float64 arrays with samples in [0, 1]; every operation
clips back into that range when a transform could leave it. Illuminant
estimation and casting run on encoded (display-referred) sample values;
linearization happens only on the way to XYZ / L*a*b*. That working-space
choice is fixed (see ESTIMATION_SPACE), not a flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

#: Estimation and casting operate on encoded sRGB sample values, matching the
#: convention of the classic (n, p, sigma) constancy implementations.
ESTIMATION_SPACE = "encoded-srgb"

_INV_SQRT3 = 1.0 / math.sqrt(3.0)

# linear sRGB -> XYZ (D65, 2 degree observer) and the D65 reference white
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_D65_WHITE = np.array([0.95047, 1.0, 1.08883])


class Encoding(Enum):
    """Transfer state of an image's samples."""

    ENCODED_SRGB = "encoded-srgb"
    LINEAR_RGB = "linear-rgb"


@dataclass
class ImageBuffer:
    """An in-memory RGB image: float64 samples in [0, 1], shape (H, W, 3).

    The buffer adopts the array it is given (no defensive copy); callers that
    keep mutating the source array should pass a copy.
    """

    data: np.ndarray
    encoding: Encoding = Encoding.ENCODED_SRGB

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected an (H, W, 3) array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")
        if not np.isfinite(arr).all():
            raise ValueError("image samples must be finite")
        lo, hi = float(arr.min()), float(arr.max())
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"image samples must lie in [0, 1], found [{lo}, {hi}]")
        if not isinstance(self.encoding, Encoding):
            raise ValueError(f"bad encoding: {self.encoding!r}")
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def copy(self) -> "ImageBuffer":
        return ImageBuffer(self.data.copy(), self.encoding)

    @classmethod
    def from_uint8(cls, arr: np.ndarray, encoding: Encoding = Encoding.ENCODED_SRGB) -> "ImageBuffer":
        """8-bit samples to float via s / 255."""
        return cls(np.asarray(arr, dtype=np.float64) / 255.0, encoding)

    def to_uint8(self) -> np.ndarray:
        """Float samples to 8-bit via round(s * 255)."""
        return np.round(self.data * 255.0).astype(np.uint8)


@dataclass(frozen=True)
class Illuminant:
    """Unit-L2 RGB direction of a scene light."""

    r: float
    g: float
    b: float

    def __post_init__(self):
        comps = (self.r, self.g, self.b)
        if any(not math.isfinite(c) or c < 0.0 for c in comps):
            raise ValueError(f"illuminant components must be finite and non-negative: {comps}")
        norm = math.sqrt(self.r * self.r + self.g * self.g + self.b * self.b)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"illuminant must have unit L2 norm, got {norm!r}")

    @classmethod
    def from_rgb(cls, r: float, g: float, b: float) -> "Illuminant":
        """Normalize an arbitrary non-negative RGB triple to unit length."""
        v = np.array([r, g, b], dtype=np.float64)
        if (v < 0.0).any() or not np.isfinite(v).all():
            raise ValueError(f"illuminant components must be finite and non-negative: {(r, g, b)}")
        norm = math.sqrt(float(v @ v))
        if norm == 0.0:
            raise ValueError("cannot normalize a zero illuminant")
        v /= norm
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def neutral(cls) -> "Illuminant":
        return cls(_INV_SQRT3, _INV_SQRT3, _INV_SQRT3)

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b])


@dataclass(frozen=True)
class LabPoint:
    """A CIE L*a*b* coordinate (L nominally in [0, 100], D65 white)."""

    L: float
    a: float
    b: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.L, self.a, self.b)):
            raise ValueError(f"Lab components must be finite: {(self.L, self.a, self.b)}")


def von_kries_gains(tau: Illuminant) -> np.ndarray:
    """White-balance gains 1 / (sqrt(3) * tau), as (1/sqrt(3)) / tau.

    The division form makes the neutral illuminant yield gains of exactly
    1.0, so correcting (or casting) by neutral light is a bitwise no-op.
    """
    t = tau.as_array()
    if (t == 0.0).any():
        raise DomainError(f"degenerate illuminant {tuple(t)}: a zero channel has infinite gain")
    return _INV_SQRT3 / t


def von_kries_correct(img: ImageBuffer, tau: Illuminant) -> ImageBuffer:
    """Remove an illuminant: scale each channel by 1 / (sqrt(3) * tau)."""
    gains = von_kries_gains(tau)
    return ImageBuffer(np.clip(img.data * gains, 0.0, 1.0), img.encoding)


def von_kries_cast(img_wb: ImageBuffer, tau: Illuminant) -> ImageBuffer:
    """Re-apply an illuminant to a white-balanced image.

    Gains are sqrt(3) * tau, the exact per-channel reciprocals of
    von_kries_correct, so casting with the illuminant that was removed
    restores the original image (up to any clipping the removal caused).
    """
    gains = tau.as_array() / _INV_SQRT3
    return ImageBuffer(np.clip(img_wb.data * gains, 0.0, 1.0), img_wb.encoding)


def apply_gamma(img: ImageBuffer, gamma: float) -> ImageBuffer:
    """Power-law map s -> s**gamma; [0, 1] is closed under it."""
    if not 0.0 < gamma <= 2.0:
        raise ValueError(f"gamma out of range (0, 2]: {gamma}")
    if gamma == 1.0:
        return img.copy()
    return ImageBuffer(np.power(img.data, gamma), img.encoding)


def _srgb_decode(encoded: np.ndarray) -> np.ndarray:
    return np.where(
        encoded <= 0.04045,
        encoded / 12.92,
        np.power((encoded + 0.055) / 1.055, 2.4),
    )


def _srgb_encode(linear: np.ndarray) -> np.ndarray:
    return np.where(
        linear <= 0.0031308,
        12.92 * linear,
        1.055 * np.power(linear, 1.0 / 2.4) - 0.055,
    )


def srgb_to_linear(img: ImageBuffer) -> ImageBuffer:
    """Undo the sRGB transfer curve. Requires an encoded buffer."""
    if img.encoding is not Encoding.ENCODED_SRGB:
        raise ValueError(f"srgb_to_linear expects an encoded-sRGB buffer, got {img.encoding}")
    return ImageBuffer(np.clip(_srgb_decode(img.data), 0.0, 1.0), Encoding.LINEAR_RGB)


def linear_to_srgb(img: ImageBuffer) -> ImageBuffer:
    """Apply the sRGB transfer curve. Requires a linear buffer."""
    if img.encoding is not Encoding.LINEAR_RGB:
        raise ValueError(f"linear_to_srgb expects a linear-RGB buffer, got {img.encoding}")
    return ImageBuffer(np.clip(_srgb_encode(img.data), 0.0, 1.0), Encoding.ENCODED_SRGB)


def rgb_to_lab(rgb) -> LabPoint:
    """One encoded-sRGB triple in [0, 1] to CIE L*a*b* (D65 white).

    Linearizes, applies the sRGB-to-XYZ matrix, then the Lab companding
    function with the D65 reference white.
    """
    v = np.asarray(rgb, dtype=np.float64)
    if v.shape != (3,):
        raise ValueError(f"expected an RGB triple, got shape {v.shape}")
    if (v < 0.0).any() or (v > 1.0).any():
        raise ValueError(f"RGB components must lie in [0, 1]: {tuple(v)}")
    t = (_RGB_TO_XYZ @ _srgb_decode(v)) / _D65_WHITE
    delta = 6.0 / 29.0
    f = np.where(t > delta**3, np.cbrt(t), t / (3.0 * delta * delta) + 4.0 / 29.0)
    return LabPoint(
        float(116.0 * f[1] - 16.0),
        float(500.0 * (f[0] - f[1])),
        float(200.0 * (f[1] - f[2])),
    )
