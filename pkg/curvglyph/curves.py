"""
Curvature of sampled parametric curves γ(t) = (x(t), y(t)), used as an
analytic reference for the per-pixel curvature maps.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DataMismatch, DegenerateTangent, ZeroLength

# Relative to the squared extent of the curve.
TANGENT_TOLERANCE = 1e-12
LENGTH_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ParametricCurve:
    """Dense samples of a curve at uniformly spaced t in [0, 1]."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise DataMismatch("x and y must be 1-D sample arrays of equal length")
        if self.sample_count < 4:
            raise DataMismatch(f"Need at least 4 samples, got {self.sample_count}")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise DataMismatch("Curve samples must be finite")

    @property
    def sample_count(self) -> int:
        return len(self.x)

    @property
    def extent(self) -> float:
        return float(max(np.ptp(self.x), np.ptp(self.y)))

    @classmethod
    def from_functions(
        cls, fx: Callable[[np.ndarray], np.ndarray], fy: Callable[[np.ndarray], np.ndarray], sample_count: int = 1000
    ) -> "ParametricCurve":
        t = np.linspace(0.0, 1.0, sample_count)
        return cls(x=np.asarray(fx(t), dtype=np.float64), y=np.asarray(fy(t), dtype=np.float64))

    def transformed(self, scale: float = 1.0, angle: float = 0.0, shift: tuple[float, float] = (0.0, 0.0)) -> "ParametricCurve":
        c, s = np.cos(angle), np.sin(angle)
        x = scale * (c * self.x - s * self.y) + shift[0]
        y = scale * (s * self.x + c * self.y) + shift[1]
        return ParametricCurve(x=x, y=y)


def circle(radius: float = 1.0, clockwise: bool = False, sample_count: int = 1000) -> ParametricCurve:
    direction = -1.0 if clockwise else 1.0
    return ParametricCurve.from_functions(
        lambda t: radius * np.cos(direction * 2 * np.pi * t),
        lambda t: radius * np.sin(direction * 2 * np.pi * t),
        sample_count,
    )


def _tangent_floor(curve: ParametricCurve) -> float:
    return TANGENT_TOLERANCE * max(curve.extent, np.finfo(np.float64).tiny) ** 2 / curve.sample_count**2


def parametric_curvature(curve: ParametricCurve) -> np.ndarray:
    """
    Signed curvature (x'y'' − y'x'') / (x'² + y'²)^{3/2} at every interior
    sample, derivatives by central differences. Counterclockwise is positive.
    The parameter step cancels between numerator and denominator, so
    differences are taken per sample index.
    """
    x, y = curve.x, curve.y
    dx = (x[2:] - x[:-2]) / 2.0
    dy = (y[2:] - y[:-2]) / 2.0
    ddx = x[2:] - 2.0 * x[1:-1] + x[:-2]
    ddy = y[2:] - 2.0 * y[1:-1] + y[:-2]

    speed_sq = dx**2 + dy**2
    floor = _tangent_floor(curve)
    if np.any(speed_sq <= floor):
        at = int(np.argmax(speed_sq <= floor)) + 1
        raise DegenerateTangent(f"Tangent vanishes at sample {at}")
    return (dx * ddy - dy * ddx) / speed_sq**1.5


def arc_length(curve: ParametricCurve) -> np.ndarray:
    """Cumulative arc length at every sample (trapezoidal accumulation of ‖γ'‖)."""
    speed = np.hypot(np.gradient(curve.x, edge_order=2), np.gradient(curve.y, edge_order=2))
    steps = 0.5 * (speed[1:] + speed[:-1])
    return np.concatenate([[0.0], np.cumsum(steps)])


def normalized_curvature(curve: ParametricCurve, num_points: Optional[int] = None) -> np.ndarray:
    """
    k(s) = L·κ(t(s)) at ``num_points`` uniformly spaced s in [0, 1], where L
    is the total arc length. Invariant under rotation, translation and
    uniform scaling of the samples.
    """
    s = arc_length(curve)
    length = s[-1]
    if length <= LENGTH_TOLERANCE * max(curve.extent, 1.0):
        raise ZeroLength(f"Curve length {length:.3g} is too small to reparameterise")

    kappa = parametric_curvature(curve)
    s_interior = s[1:-1] / length
    grid = np.linspace(0.0, 1.0, num_points or curve.sample_count)
    return length * np.interp(grid, s_interior, kappa)
