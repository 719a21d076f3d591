"""
Curvature–orientation descriptor.

Per glyph, three 28×28 channels are derived from 3×3 Sobel estimates of the
first and second intensity derivatives:

    kappa_mag   |κ| divided by its per-image maximum            in [0, 1]
    kappa_sign  sign(κ)                                         in {-1, 0, 1}
    theta       (atan2(Iy, Ix) + π) / (2π)                      in [0, 1]

where κ is the isophote (level-curve) curvature

    κ = (Ixx·Iy² − 2·Ix·Iy·Ixy + Iyy·Ix²) / ((Ix² + Iy²)^{3/2} + eps).

Axes: x runs along columns (left to right), y along rows (top to bottom).
Under this convention the rim of a bright disc on a dark background has
negative κ; inverting intensities flips the sign everywhere.

The flat vector is [kappa_mag; kappa_sign; theta], each channel row-major,
3·28·28 = 2352 values.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from .idx import GLYPH_SIZE, GlyphImage
from .schemas import FeatureConfig

logger = logging.getLogger(__name__)

EXTRACTOR_VERSION = "cofeat-1"
NUM_CHANNELS = 3
FEATURE_DIM = NUM_CHANNELS * GLYPH_SIZE * GLYPH_SIZE
BORDER_MODE = "mirror"  # reflect about the edge sample without repeating it

SMOOTH = np.array([1.0, 2.0, 1.0])
DIFF = np.array([-1.0, 0.0, 1.0])
SECOND = np.array([1.0, -2.0, 1.0])
ROWS, COLS = -2, -1

# Response of each kernel to a unit-slope ramp / unit-curvature parabola.
FIRST_ORDER_GAIN = 8.0
SECOND_ORDER_GAIN = 4.0
MIXED_GAIN = FIRST_ORDER_GAIN * FIRST_ORDER_GAIN


# ── Domain types ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class DerivativeStack:
    Ix: np.ndarray
    Iy: np.ndarray
    Ixx: np.ndarray
    Iyy: np.ndarray
    Ixy: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return self.Ix.shape


@dataclass(frozen=True)
class FeatureMaps:
    kappa_mag: np.ndarray
    kappa_sign: np.ndarray
    theta: np.ndarray

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.kappa_mag.ravel(), self.kappa_sign.ravel(), self.theta.ravel()])


# ── Derivatives ────────────────────────────────────────────────────────────────

def _separable(images: np.ndarray, across: np.ndarray, along: np.ndarray, axis: int) -> np.ndarray:
    """``along`` on ``axis`` after ``across`` on the other image axis."""
    other = ROWS if axis == COLS else COLS
    smoothed = ndimage.correlate1d(images, across, axis=other, mode=BORDER_MODE)
    return ndimage.correlate1d(smoothed, along, axis=axis, mode=BORDER_MODE)


def sobel_derivatives(
    img,
    unit_gain: bool = True,
    pre_blur_sigma: float = 0.0,
) -> DerivativeStack:
    """
    First and second derivatives of ``img`` (a GlyphImage or any array whose
    last two axes are the image) with 3×3 Sobel kernels and mirrored borders.

    Every kernel is applied as two 1-D passes, smoothing before differencing,
    so a flat neighbourhood yields exactly zero whatever its value.
    Ixy is the x kernel followed by the y kernel.
    """
    pixels = img.pixels if isinstance(img, GlyphImage) else img
    pixels = np.asarray(pixels, dtype=np.float64)
    if pre_blur_sigma > 0:
        sigma = (0,) * (pixels.ndim - 2) + (pre_blur_sigma, pre_blur_sigma)
        pixels = ndimage.gaussian_filter(pixels, sigma=sigma, mode=BORDER_MODE)

    Ix = _separable(pixels, SMOOTH, DIFF, axis=COLS)
    Iy = _separable(pixels, SMOOTH, DIFF, axis=ROWS)
    Ixx = _separable(pixels, SMOOTH, SECOND, axis=COLS)
    Iyy = _separable(pixels, SMOOTH, SECOND, axis=ROWS)
    Ixy = _separable(Ix, SMOOTH, DIFF, axis=ROWS)

    if unit_gain:
        Ixy = Ixy / MIXED_GAIN
        Ix = Ix / FIRST_ORDER_GAIN
        Iy = Iy / FIRST_ORDER_GAIN
        Ixx = Ixx / SECOND_ORDER_GAIN
        Iyy = Iyy / SECOND_ORDER_GAIN
    return DerivativeStack(Ix=Ix, Iy=Iy, Ixx=Ixx, Iyy=Iyy, Ixy=Ixy)


# ── Curvature and orientation ──────────────────────────────────────────────────

def curvature_map(d: DerivativeStack, eps: float = 1e-8) -> np.ndarray:
    numerator = d.Ixx * d.Iy**2 - 2.0 * d.Ix * d.Iy * d.Ixy + d.Iyy * d.Ix**2
    denominator = (d.Ix**2 + d.Iy**2) ** 1.5 + eps
    return numerator / denominator


def orientation_map(d: DerivativeStack) -> np.ndarray:
    # Adding 0.0 turns -0.0 into +0.0, so flat pixels hit atan2(0, 0) = 0 -> 0.5.
    theta = np.arctan2(d.Iy + 0.0, d.Ix + 0.0)
    return (theta + np.pi) / (2.0 * np.pi)


def _normalise(kappa: np.ndarray, sign_floor: float) -> tuple[np.ndarray, np.ndarray]:
    magnitude = np.abs(kappa)
    peak = magnitude.max(axis=(-2, -1), keepdims=True)
    safe_peak = np.where(peak > 0, peak, 1.0)
    kappa_mag = np.where(peak > 0, magnitude / safe_peak, 0.0)
    kappa_sign = np.where(magnitude > sign_floor, np.sign(kappa), 0.0)
    return kappa_mag, kappa_sign


def assemble_features(img, cfg: Optional[FeatureConfig] = None) -> FeatureMaps:
    cfg = cfg or FeatureConfig()
    d = sobel_derivatives(img, unit_gain=cfg.unit_gain, pre_blur_sigma=cfg.pre_blur_sigma)
    kappa_mag, kappa_sign = _normalise(curvature_map(d, cfg.eps), cfg.sign_floor)
    return FeatureMaps(kappa_mag=kappa_mag, kappa_sign=kappa_sign, theta=orientation_map(d))


# ── Batch extraction ───────────────────────────────────────────────────────────

def extract_features(
    images: np.ndarray,
    cfg: Optional[FeatureConfig] = None,
    chunk_size: int = 4096,
) -> np.ndarray:
    """Descriptor matrix (N, 2352) in float32 for an (N, 28, 28) image stack."""
    cfg = cfg or FeatureConfig()
    images = np.asarray(images)
    out = np.empty((len(images), FEATURE_DIM), dtype=np.float32)
    plane = GLYPH_SIZE * GLYPH_SIZE
    for start in range(0, len(images), chunk_size):
        stop = min(start + chunk_size, len(images))
        maps = assemble_features(images[start:stop], cfg)
        n = stop - start
        out[start:stop, :plane] = maps.kappa_mag.reshape(n, plane)
        out[start:stop, plane : 2 * plane] = maps.kappa_sign.reshape(n, plane)
        out[start:stop, 2 * plane :] = maps.theta.reshape(n, plane)
        logger.info("Extracted features for %d/%d glyphs", stop, len(images))
    return out


def channel_images(maps: FeatureMaps) -> dict[str, np.ndarray]:
    """8-bit renderings of the three channels, keyed by file suffix."""
    def to_byte(values: np.ndarray) -> np.ndarray:
        return np.rint(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8)

    return {
        "mag": to_byte(maps.kappa_mag),
        "sign": to_byte((maps.kappa_sign + 1.0) / 2.0),
        "theta": to_byte(maps.theta),
    }
