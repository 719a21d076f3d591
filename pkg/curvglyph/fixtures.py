"""
Synthetic glyphs with known geometry: anti-aliased discs and rings, ramps,
constant fields and random smooth strokes. Used by ``viz`` and the tests.
"""
from typing import Optional

import numpy as np
from scipy import ndimage

from .idx import GLYPH_SIZE

CENTER = (GLYPH_SIZE - 1) / 2.0  # 13.5: halfway between the two middle pixels
EDGE_SIGMA = 1.0
EDGE_TRUNCATE = 3.0  # kernel reaches 3 sigma, so the disc blur stays clear of the border


def _subpixel_grid(size: int, supersample: int) -> tuple[np.ndarray, np.ndarray]:
    offsets = (np.arange(supersample) + 0.5) / supersample - 0.5
    coords = (np.arange(size)[:, None] + offsets[None, :]).ravel()
    return np.meshgrid(coords, coords, indexing="ij")


def _coverage(inside: np.ndarray, size: int, supersample: int) -> np.ndarray:
    return inside.reshape(size, supersample, size, supersample).mean(axis=(1, 3))


def render_disc(
    radius: float,
    center: Optional[tuple[float, float]] = None,
    size: int = GLYPH_SIZE,
    supersample: int = 8,
    edge_sigma: float = EDGE_SIGMA,
) -> np.ndarray:
    """
    Bright filled disc on black; pixel value = covered area fraction, then a
    Gaussian of ``edge_sigma`` pixels so the edge is band-limited the way a
    pen stroke is. ``edge_sigma=0`` keeps the hard-edged coverage, whose
    staircase boundary aliases the curvature estimate.
    """
    cy, cx = center if center is not None else (CENTER, CENTER)
    rows, cols = _subpixel_grid(size, supersample)
    inside = (rows - cy) ** 2 + (cols - cx) ** 2 <= radius**2
    coverage = _coverage(inside, size, supersample)
    if edge_sigma > 0:
        coverage = ndimage.gaussian_filter(coverage, edge_sigma, mode="nearest", truncate=EDGE_TRUNCATE)
    return coverage


def render_ring(
    radius: float,
    width: float = 2.0,
    center: Optional[tuple[float, float]] = None,
    size: int = GLYPH_SIZE,
    supersample: int = 8,
) -> np.ndarray:
    """Stroke of the given width centred on a circle, like a handwritten 'O'."""
    cy, cx = center if center is not None else (CENTER, CENTER)
    rows, cols = _subpixel_grid(size, supersample)
    distance = np.hypot(rows - cy, cols - cx)
    inside = np.abs(distance - radius) <= width / 2.0
    return _coverage(inside, size, supersample)


def constant_image(value: float = 0.5, size: int = GLYPH_SIZE) -> np.ndarray:
    return np.full((size, size), value, dtype=np.float64)


def horizontal_ramp(size: int = GLYPH_SIZE) -> np.ndarray:
    """I(x, y) = x / (size - 1)."""
    return np.tile(np.arange(size, dtype=np.float64) / (size - 1), (size, 1))


def random_smooth_images(
    count: int, seed: int = 0, sigma: float = 1.5, size: int = GLYPH_SIZE
) -> np.ndarray:
    """Blurred random strokes rescaled to [0, 1], quantised to 8 bits like real glyphs."""
    rng = np.random.Generator(np.random.PCG64(seed))
    canvas = np.zeros((count, size, size))
    for img in canvas:
        for _ in range(rng.integers(1, 4)):
            r0, c0, r1, c1 = rng.uniform(4, size - 4, 4)
            t = np.linspace(0, 1, 64)
            bend = rng.uniform(-6, 6)
            rr = r0 + (r1 - r0) * t + bend * np.sin(np.pi * t)
            cc = c0 + (c1 - c0) * t
            img[np.clip(np.rint(rr), 0, size - 1).astype(int), np.clip(np.rint(cc), 0, size - 1).astype(int)] = 1.0
    blurred = ndimage.gaussian_filter(canvas, sigma=(0, sigma, sigma))
    peak = blurred.max(axis=(1, 2), keepdims=True)
    scaled = blurred / np.where(peak > 0, peak, 1.0)
    return np.rint(scaled * 255.0) / 255.0
