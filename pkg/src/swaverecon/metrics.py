"""Image comparison metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import DimensionMismatch


@dataclass(frozen=True)
class SsimParams:
    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 256.0

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError("window must be odd and >= 3")
        if min(self.sigma, self.k1, self.k2, self.dynamic_range) <= 0:
            raise ValueError("sigma, k1, k2 and dynamic_range must be > 0")


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"image shapes {a.shape} and {b.shape} differ")
    return a, b


def ssim_map(a, b, params: SsimParams = SsimParams()):
    """Local SSIM with a Gaussian window, borders of half a window cropped."""
    a, b = _pair(a, b)
    radius = params.window // 2
    if min(a.shape) < params.window:
        raise DimensionMismatch(f"images smaller than the {params.window}-pixel window")

    def blur(x):
        return gaussian_filter(x, params.sigma, truncate=radius / params.sigma, mode="reflect")

    mu_a, mu_b = blur(a), blur(b)
    var_a = blur(a * a) - mu_a * mu_a
    var_b = blur(b * b) - mu_b * mu_b
    cov = blur(a * b) - mu_a * mu_b
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    full = num / den
    return full[radius:-radius, radius:-radius]


def ssim(a, b, params: SsimParams = SsimParams()):
    return float(ssim_map(a, b, params).mean())


def error_map(a, b):
    a, b = _pair(a, b)
    return np.abs(a - b)


def loss_curve(losses):
    """Losses relative to the first entry."""
    losses = np.asarray(losses, dtype=np.float64)
    if losses.size == 0 or losses[0] == 0:
        return losses.copy()
    return losses / losses[0]
