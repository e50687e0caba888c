"""Illuminant estimation via the (n, p, sigma) color constancy framework.

Per channel, the estimate is the Minkowski p-mean of the absolute n-th order
Gaussian-derivative response, normalized across channels to a unit-L2
direction. The classic instances fall out of the parameters: n=0, p=1 is
gray-world, n=0, p=inf is max-RGB, n=0 with finite p > 1 is shades-of-gray,
and n >= 1 gives the edge-based variants. Estimation runs on encoded sample
values (color.ESTIMATION_SPACE).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .color import Illuminant, ImageBuffer
from .errors import DomainError

#: Structuring element for the saturation-exclusion ring: one pixel in every
#: direction, diagonals included.
_RING = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class EstimatorConfig:
    """Parameters of the (n, p, sigma) estimator.

    Defaults are shades-of-gray with the customary p=6, no smoothing, and
    saturated highlights (any channel >= 0.98) excluded together with a
    one-pixel ring around them. A saturation_threshold above 1 disables
    exclusion, since samples never exceed 1.
    """

    deriv_order: int = 0
    minkowski_p: float = 6.0
    smoothing_sigma: float = 0.0
    saturation_threshold: float = 0.98

    def __post_init__(self):
        if self.deriv_order not in (0, 1, 2):
            raise ValueError(f"deriv_order must be 0, 1 or 2, got {self.deriv_order}")
        if not self.minkowski_p >= 1.0:
            raise ValueError(f"minkowski_p must be >= 1 (math.inf for max), got {self.minkowski_p}")
        if not self.smoothing_sigma >= 0.0:
            raise ValueError(f"smoothing_sigma must be >= 0, got {self.smoothing_sigma}")
        if self.deriv_order >= 1 and self.smoothing_sigma <= 0.0:
            raise ValueError("derivative orders require smoothing_sigma > 0")
        if not self.saturation_threshold > 0.0:
            raise ValueError(f"saturation_threshold must be positive, got {self.saturation_threshold}")


def gaussian_kernels(sigma: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sampled 1-D Gaussian and its first two derivatives, radius ceil(3*sigma).

    The smoothing kernel is normalized to unit sum. The second-derivative
    kernel gets a DC correction so a constant signal maps to zero response;
    the first-derivative kernel is antisymmetric and needs none.
    """
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    g /= g.sum()
    g1 = -x / sigma**2 * g
    g2 = (x * x / sigma**4 - 1.0 / sigma**2) * g
    g2 -= g2.sum() / g2.size
    return g, g1, g2


def _sep2d(channel: np.ndarray, kernel_y: np.ndarray, kernel_x: np.ndarray) -> np.ndarray:
    out = ndimage.correlate1d(channel, kernel_y, axis=0, mode="reflect")
    return ndimage.correlate1d(out, kernel_x, axis=1, mode="reflect")


def gaussian_derivative(img: ImageBuffer, order: int, sigma: float) -> np.ndarray:
    """Per-channel Gaussian (derivative) response of an image.

    order 0 returns the sigma-smoothed image (the image itself for sigma=0),
    order 1 the gradient magnitude sqrt(dx^2 + dy^2), order 2 the second-order
    magnitude sqrt(dxx^2 + 2*dxy^2 + dyy^2). Separable correlation with
    reflect borders, so constants stay constant under smoothing.

    Returns a raw (H, W, 3) float array: derivative magnitudes are not
    confined to [0, 1].
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    if order >= 1 and sigma <= 0.0:
        raise ValueError("derivative orders require sigma > 0")
    data = img.data
    if order == 0:
        if sigma == 0.0:
            return data.copy()
        g, _, _ = gaussian_kernels(sigma)
        return np.stack([_sep2d(data[:, :, c], g, g) for c in range(3)], axis=2)

    g, g1, g2 = gaussian_kernels(sigma)
    out = np.empty_like(data)
    for c in range(3):
        ch = data[:, :, c]
        if order == 1:
            dx = _sep2d(ch, g, g1)
            dy = _sep2d(ch, g1, g)
            out[:, :, c] = np.sqrt(dx * dx + dy * dy)
        else:
            dxx = _sep2d(ch, g, g2)
            dyy = _sep2d(ch, g2, g)
            dxy = _sep2d(ch, g1, g1)
            out[:, :, c] = np.sqrt(dxx * dxx + 2.0 * dxy * dxy + dyy * dyy)
    return out


def _minkowski_mean(values: np.ndarray, p: float) -> float:
    """(mean |v|^p)^(1/p), scaled by the max for numerical range safety."""
    top = float(values.max())
    if top == 0.0:
        return 0.0
    if math.isinf(p):
        return top
    return top * float(np.mean((values / top) ** p)) ** (1.0 / p)


def estimate_illuminant(img: ImageBuffer, cfg: EstimatorConfig = EstimatorConfig()) -> Illuminant:
    """Estimate the scene illuminant of an image under a given configuration.

    Pixels with any channel >= cfg.saturation_threshold (evaluated on the raw
    image) are excluded from the mean, along with a one-pixel ring around
    them. Raises DomainError when every pixel is excluded or when every
    channel has zero response.
    """
    data = img.data
    saturated = (data >= cfg.saturation_threshold).any(axis=2)
    if saturated.any():
        saturated = ndimage.binary_dilation(saturated, structure=_RING)
    valid = ~saturated
    if not valid.any():
        raise DomainError("no valid pixels: every pixel is saturation-excluded")

    response = np.abs(gaussian_derivative(img, cfg.deriv_order, cfg.smoothing_sigma))
    selected = response[valid]
    energy = np.array([_minkowski_mean(selected[:, c], cfg.minkowski_p) for c in range(3)])
    if (energy == 0.0).all():
        raise DomainError("black image: zero response in every channel")
    energy /= math.sqrt(float(energy @ energy))
    return Illuminant(float(energy[0]), float(energy[1]), float(energy[2]))


def angular_error_degrees(a: Illuminant, b: Illuminant) -> float:
    """Angle between two illuminants, in degrees.

    Computed as atan2(|a x b|, a.b), which stays accurate for tiny angles
    where arccos of the dot product loses half the significand, and is
    exactly 0 for identical vectors.
    """
    va, vb = a.as_array(), b.as_array()
    cross = float(np.linalg.norm(np.cross(va, vb)))
    return math.degrees(math.atan2(cross, float(va @ vb)))
