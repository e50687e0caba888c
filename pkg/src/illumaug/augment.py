"""Composable augmentation of white-balanced images.

One augmented output is described by an AugmentationPlan: a bank illuminant
to re-cast with, a gamma jitter, affine geometry (rotation, flips,
translation, scaling) and an elastic distortion seed. Plans are pure
functions of (seed, image_index) via a fixed 64-bit mix, so serial and
parallel batch runs draw identical parameters. apply_plan composes the
pieces in a fixed order: cast, then gamma, then geometry.

Also here: the bounding-box crop used to feed classification, and the
test-time expand/median-aggregate pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .bank import IlluminantBank, sample_illuminant
from .color import Illuminant, ImageBuffer, apply_gamma, von_kries_cast, von_kries_correct
from .constancy import estimate_illuminant
from .errors import DomainError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(seed: int, index: int) -> int:
    """Mix a run seed and an item index into an independent 64-bit seed.

    SplitMix64 finalizer over seed + (index + 1) * golden-ratio increment.
    Published, fixed-for-all-time mixing: the same (seed, index) pair gives
    the same stream on any machine and any worker schedule.
    """
    z = (seed + (index + 1) * _GOLDEN) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


@dataclass(frozen=True)
class GammaSamplerConfig:
    """Truncated-Normal gamma jitter: Normal(1, 0.1) kept inside (0, 2].

    stddev 0 degenerates to the point mass at the mean, used for identity
    pipelines.
    """

    mean: float = 1.0
    stddev: float = 0.1
    low: float = 0.0
    high: float = 2.0

    def __post_init__(self):
        if not self.low < self.mean < self.high:
            raise ValueError(f"need low < mean < high, got {(self.low, self.mean, self.high)}")
        if self.stddev < 0.0:
            raise ValueError(f"stddev must be >= 0, got {self.stddev}")


@dataclass(frozen=True)
class GeometricConfig:
    """Ranges for the geometric draws; defaults are the batch-pipeline ones."""

    rotation_range: float = 45.0
    flip_h: float = 0.5
    flip_v: float = 0.5
    translate_frac: float = 0.1
    scale_range: tuple[float, float] = (0.8, 1.25)
    elastic_alpha: float = 10.0
    elastic_sigma: float = 4.0

    def __post_init__(self):
        if self.rotation_range < 0.0:
            raise ValueError("rotation_range must be >= 0")
        for name, p in (("flip_h", self.flip_h), ("flip_v", self.flip_v)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability in [0, 1], got {p}")
        if self.translate_frac < 0.0:
            raise ValueError("translate_frac must be >= 0")
        lo, hi = self.scale_range
        if not (0.0 < lo <= hi):
            raise ValueError(f"scale_range must be positive and ordered, got {self.scale_range}")
        if self.elastic_alpha < 0.0:
            raise ValueError("elastic_alpha must be >= 0")
        if self.elastic_alpha > 0.0 and self.elastic_sigma <= 0.0:
            raise ValueError("elastic_sigma must be > 0 when elastic_alpha > 0")


@dataclass(frozen=True)
class AugmentationPlan:
    """A fully-seeded description of one augmented output."""

    illuminant: Illuminant
    gamma: float
    rotation_deg: float
    flip_h: bool
    flip_v: bool
    translation: tuple[float, float]  # (dx, dy) pixels, +x right, +y down
    scale: float
    elastic_alpha: float
    elastic_sigma: float
    elastic_field_seed: int

    def __post_init__(self):
        if not 0.0 < self.gamma <= 2.0:
            raise ValueError(f"gamma out of range (0, 2]: {self.gamma}")
        if self.scale <= 0.0:
            raise ValueError(f"scale must be positive: {self.scale}")


def sample_gamma(cfg: GammaSamplerConfig, rng: np.random.Generator) -> float:
    """One truncated-Normal draw, by rejection."""
    for _ in range(10_000):
        g = float(rng.normal(cfg.mean, cfg.stddev))
        if cfg.low < g <= cfg.high:
            return g
    # (0, 2] covers ten standard deviations around the default mean; reaching
    # this would mean a broken RNG or a pathological config
    raise RuntimeError("gamma rejection sampling did not terminate in 10000 attempts")


def make_plan(
    bank: IlluminantBank,
    gamma_cfg: GammaSamplerConfig,
    geo_cfg: GeometricConfig,
    seed: int,
    image_index: int,
    image_size: tuple[int, int],
) -> AugmentationPlan:
    """Draw one plan, deterministically, from (seed, image_index).

    image_size is (height, width); it only scales the translation draw (a
    fraction of min(H, W) turned into pixels), never the RNG stream, so
    plans across differently sized images stay aligned draw for draw.

    Draw order is fixed: illuminant, gamma, rotation, flip_h, flip_v,
    translation dx then dy, scale, elastic field seed.
    """
    rng = np.random.default_rng(derive_seed(seed, image_index))
    illum = sample_illuminant(bank, rng)
    gamma = sample_gamma(gamma_cfg, rng)
    rotation = float(rng.uniform(-geo_cfg.rotation_range, geo_cfg.rotation_range))
    flip_h = bool(rng.random() < geo_cfg.flip_h)
    flip_v = bool(rng.random() < geo_cfg.flip_v)
    limit = geo_cfg.translate_frac * min(image_size)
    dx = float(rng.uniform(-limit, limit))
    dy = float(rng.uniform(-limit, limit))
    scale = float(rng.uniform(geo_cfg.scale_range[0], geo_cfg.scale_range[1]))
    elastic_seed = int(rng.integers(0, 2**63))
    return AugmentationPlan(
        illuminant=illum,
        gamma=gamma,
        rotation_deg=rotation,
        flip_h=flip_h,
        flip_v=flip_v,
        translation=(dx, dy),
        scale=scale,
        elastic_alpha=geo_cfg.elastic_alpha,
        elastic_sigma=geo_cfg.elastic_sigma,
        elastic_field_seed=elastic_seed,
    )


def _affine_input_coords(
    shape: tuple[int, int], rotation_deg: float, scale: float, translation: tuple[float, float]
) -> tuple[np.ndarray, np.ndarray]:
    """Source coordinates realizing scale-about-center, rotate-about-center
    (positive = counterclockwise on screen, row 0 on top), then translate."""
    h, w = shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    theta = math.radians(rotation_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    ii, jj = np.meshgrid(
        np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij"
    )
    x = jj - cx - translation[0]
    y = ii - cy - translation[1]
    src_x = (cos_t * x - sin_t * y) / scale + cx
    src_y = (sin_t * x + cos_t * y) / scale + cy
    return src_y, src_x


def _plan_has_affine(plan: AugmentationPlan) -> bool:
    return (
        plan.rotation_deg != 0.0
        or plan.scale != 1.0
        or plan.translation[0] != 0.0
        or plan.translation[1] != 0.0
    )


def _elastic_field(
    shape: tuple[int, int], alpha: float, sigma: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Smoothed random displacement field: uniform [-1, 1] noise per pixel,
    Gaussian-filtered with the given sigma, scaled by alpha. dx drawn first."""
    rng = np.random.default_rng(seed)
    dx = ndimage.gaussian_filter(rng.uniform(-1.0, 1.0, shape), sigma, mode="reflect") * alpha
    dy = ndimage.gaussian_filter(rng.uniform(-1.0, 1.0, shape), sigma, mode="reflect") * alpha
    return dx, dy


def _warp_geometry(channel_stack: np.ndarray, plan: AugmentationPlan, order: int) -> np.ndarray:
    """Geometric part of a plan on an (H, W) or (H, W, C) array.

    order 1 is bilinear (images), order 0 nearest (masks). Identity
    components are skipped entirely so identity plans are bitwise no-ops.
    """
    arr = channel_stack
    shape = arr.shape[:2]

    if _plan_has_affine(plan):
        src_y, src_x = _affine_input_coords(shape, plan.rotation_deg, plan.scale, plan.translation)
        arr = _map_all_channels(arr, src_y, src_x, order)

    if plan.flip_h:
        arr = arr[:, ::-1]
    if plan.flip_v:
        arr = arr[::-1, :]

    if plan.elastic_alpha > 0.0:
        dx, dy = _elastic_field(shape, plan.elastic_alpha, plan.elastic_sigma, plan.elastic_field_seed)
        ii, jj = np.meshgrid(
            np.arange(shape[0], dtype=np.float64),
            np.arange(shape[1], dtype=np.float64),
            indexing="ij",
        )
        arr = _map_all_channels(arr, ii + dy, jj + dx, order)

    return np.ascontiguousarray(arr)


def _map_all_channels(arr: np.ndarray, src_y: np.ndarray, src_x: np.ndarray, order: int) -> np.ndarray:
    coords = np.stack([src_y, src_x])
    if arr.ndim == 2:
        return ndimage.map_coordinates(arr, coords, order=order, mode="reflect")
    out = np.empty_like(arr)
    for c in range(arr.shape[2]):
        out[:, :, c] = ndimage.map_coordinates(arr[:, :, c], coords, order=order, mode="reflect")
    return out


def apply_plan(img_wb: ImageBuffer, plan: AugmentationPlan) -> ImageBuffer:
    """Run one plan on a white-balanced image: cast, gamma, then geometry."""
    out = von_kries_cast(img_wb, plan.illuminant)
    out = apply_gamma(out, plan.gamma)
    warped = _warp_geometry(out.data, plan, order=1)
    return ImageBuffer(np.clip(warped, 0.0, 1.0), out.encoding)


def apply_plan_to_mask(mask: np.ndarray, plan: AugmentationPlan) -> np.ndarray:
    """Co-transform a boolean (H, W) mask with a plan's geometric parameters.

    Color steps do not apply to masks; warping is nearest-neighbor so the
    mask stays binary.
    """
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    warped = _warp_geometry(m.astype(np.float64), plan, order=0)
    return warped > 0.5


def mask_bbox_with_margin(mask: np.ndarray, margin: float) -> tuple[int, int, int, int]:
    """Tight bbox of positive pixels, grown by margin*dim per dimension.

    Returns inclusive (top, bottom, left, right). Each dimension grows by
    ceil(margin * extent / 2) per side, clamped to the mask bounds.
    """
    if margin < 0.0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    m = np.asarray(mask, dtype=bool)
    ys, xs = np.nonzero(m)
    if ys.size == 0:
        raise DomainError("empty mask: no positive pixels to crop around")
    top, bottom = int(ys.min()), int(ys.max())
    left, right = int(xs.min()), int(xs.max())
    pad_y = math.ceil(margin * (bottom - top + 1) / 2.0)
    pad_x = math.ceil(margin * (right - left + 1) / 2.0)
    h, w = m.shape
    return (
        max(0, top - pad_y),
        min(h - 1, bottom + pad_y),
        max(0, left - pad_x),
        min(w - 1, right + pad_x),
    )


def crop_bbox(img: ImageBuffer, mask: np.ndarray, margin: float = 0.15) -> ImageBuffer:
    """Crop an image to its mask's bounding box plus a safety margin."""
    m = np.asarray(mask, dtype=bool)
    if m.shape != (img.height, img.width):
        raise ValueError(f"mask shape {m.shape} does not match image {(img.height, img.width)}")
    top, bottom, left, right = mask_bbox_with_margin(m, margin)
    return ImageBuffer(img.data[top : bottom + 1, left : right + 1].copy(), img.encoding)


def tta_median(preds: Sequence[np.ndarray]) -> np.ndarray:
    """Per-pixel median of probability maps; even counts average the middle two."""
    if len(preds) == 0:
        raise ValueError("need at least one probability map")
    maps = [np.asarray(p, dtype=np.float64) for p in preds]
    shape = maps[0].shape
    for i, m in enumerate(maps):
        if m.shape != shape:
            raise ValueError(f"map {i} has shape {m.shape}, expected {shape}")
        if m.size and (m.min() < 0.0 or m.max() > 1.0):
            raise ValueError(f"map {i} has values outside [0, 1]")
    return np.median(np.stack(maps), axis=0)


def tta_expand(img: ImageBuffer, bank: IlluminantBank, count: int, seed: int) -> list[ImageBuffer]:
    """White-balance an image and return `count` test-time versions of it.

    Index 0 is always the plain white-balanced image, so count=1 degrades to
    ordinary single-shot prediction; the rest are re-cast with bank draws
    from per-index derived seeds.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    tau = estimate_illuminant(img, bank.estimator)
    wb = von_kries_correct(img, tau)
    versions = [wb]
    for i in range(1, count):
        rng = np.random.default_rng(derive_seed(seed, i))
        versions.append(von_kries_cast(wb, sample_illuminant(bank, rng)))
    return versions
