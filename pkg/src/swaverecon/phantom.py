"""Synthetic phantoms and an independent point-source forward oracle."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, TargetOutsideRoi


class TargetShape(enum.Enum):
    POINT = "point"
    DISC = "disc"


@dataclass(frozen=True)
class Target:
    shape: TargetShape
    center: tuple[float, float]
    intensity: float = 1.0
    # meters; only used by discs
    radius: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "shape", TargetShape(self.shape))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.intensity < 0:
            raise ValueError("intensity must be >= 0")
        if self.shape is TargetShape.DISC and not self.radius > 0:
            raise ValueError("disc radius must be > 0")

    @classmethod
    def point(cls, x, y, intensity=1.0):
        return cls(TargetShape.POINT, (x, y), intensity)

    @classmethod
    def disc(cls, x, y, radius, intensity=1.0):
        return cls(TargetShape.DISC, (x, y), intensity, radius)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian noise on channel data.

    With ``relative`` the standard deviation is ``sigma * max|S|``.
    """

    sigma: float
    relative: bool = True

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class PhantomSpec:
    targets: tuple[Target, ...] = field(default_factory=tuple)
    noise: NoiseSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))


def _check_inside(target, grid):
    if not grid.contains(*target.center):
        raise TargetOutsideRoi(f"target at {target.center} lies outside the ROI")


def gen_phantom(spec: PhantomSpec, grid):
    """Rasterize targets; overlapping targets add."""
    image = np.zeros(grid.shape)
    centers = grid.pixel_centers().reshape(grid.n, grid.m, 2)
    for target in spec.targets:
        _check_inside(target, grid)
        if target.shape is TargetShape.POINT:
            r, c = grid.nearest_pixel(*target.center)
            image[min(max(r, 0), grid.n - 1), min(max(c, 0), grid.m - 1)] += target.intensity
        else:
            dx = centers[..., 0] - target.center[0]
            dy = centers[..., 1] - target.center[1]
            image[dx * dx + dy * dy <= target.radius ** 2] += target.intensity
    return image


def _oracle_sensors(geom):
    n = geom.num_sensors
    cx, cy = geom.center
    if geom.kind.value == "ring":
        return [(cx + geom.radius * math.cos(geom.angular_offset + 2 * math.pi * i / n),
                 cy + geom.radius * math.sin(geom.angular_offset + 2 * math.pi * i / n))
                for i in range(n)]
    return [(cx + (i - (n - 1) / 2) * geom.pitch, cy) for i in range(n)]


def _round_away(x):
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def oracle_forward(spec: PhantomSpec, geom, acoustic, s, k=None):
    """Channel data for point targets, summed target by target with ``np.roll``.

    Works from target coordinates directly; ``s.ref_distances`` supplies the
    per-sensor reference distance and ``k=None`` uses its square.
    """
    samples = np.asarray(s.samples, dtype=np.float64)
    if len(samples) != acoustic.sample_depth:
        raise DimensionMismatch("waveform length differs from sample depth")
    out = np.zeros((geom.num_sensors, acoustic.sample_depth))
    for target in spec.targets:
        if target.shape is not TargetShape.POINT:
            raise ValueError("the oracle handles point targets only")
    for i, (sx, sy) in enumerate(_oracle_sensors(geom)):
        d_s = float(s.ref_distances[i])
        gain = d_s * d_s if k is None else k
        for target in spec.targets:
            d = math.hypot(target.center[0] - sx, target.center[1] - sy)
            if d == 0:
                raise ValueError("target coincides with a sensor")
            shift = _round_away((d - d_s) / acoustic.sound_speed * acoustic.sample_rate)
            out[i] += (gain * target.intensity / (d * d)) * np.roll(samples, shift)
    return out


def apply_noise(S, noise: NoiseSpec | None, rng):
    """Return ``S`` plus Gaussian noise drawn from ``rng`` (a numpy Generator)."""
    S = np.asarray(S, dtype=np.float64)
    if noise is None or noise.sigma == 0:
        return S.copy()
    sigma = noise.sigma * float(np.abs(S).max()) if noise.relative else noise.sigma
    return S + rng.normal(0.0, sigma, size=S.shape)
