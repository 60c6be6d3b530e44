"""s-Wave forward model: image -> synthetic channel data.

Each nonzero pixel ``j`` contributes to channel ``i`` a copy of the standard
waveform scaled by ``k * I_j / d_ij**2`` and shifted by
``round((d_ij - d_s) / c * f_s)`` samples. Because every copy is the same
waveform, the per-channel sum is computed as a weighted histogram over shifts
followed by one (circulant or Toeplitz) matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import circulant

from .errors import DegenerateDistance, DimensionMismatch
from .geometry import (AcousticConfig, ArrayGeometry, RoiGrid, distance_matrix,
                       reference_distances, round_half_away, samples_from_distance)
from .waveform import ShiftMode, StandardWaveform


@dataclass(frozen=True)
class SwaveParams:
    """``k=None`` uses ``d_s**2`` per sensor, giving the center pixel unit gain."""

    k: float | None = None
    shift_mode: ShiftMode = ShiftMode.CIRCULAR

    def __post_init__(self):
        object.__setattr__(self, "shift_mode", ShiftMode(self.shift_mode))
        if self.k is not None and not self.k > 0:
            raise ValueError("k must be > 0")

    def gain(self, ref_distances):
        ref = np.asarray(ref_distances, dtype=np.float64)
        return ref ** 2 if self.k is None else np.full_like(ref, self.k)


def tau(d_p, d_s, acoustic: AcousticConfig):
    """Integer sample shift of a pixel at ``d_p`` relative to the reference ``d_s``."""
    return round_half_away(samples_from_distance(np.asarray(d_p) - np.asarray(d_s), acoustic))


def amplitude(d_p, p, k):
    d_p = np.asarray(d_p, dtype=np.float64)
    if np.any(d_p == 0):
        raise DegenerateDistance("pixel coincides with a sensor")
    return k * np.asarray(p, dtype=np.float64) / (d_p * d_p)


def shift_matrix(s, mode: ShiftMode):
    """Matrix ``C`` with ``out = hist @ C.T`` for a shift histogram ``hist``.

    Circular: columns indexed by ``tau mod M``. Zero-pad: columns indexed by
    ``tau + M - 1`` for ``tau`` in ``(-M, M)``.
    """
    s = np.asarray(s, dtype=np.float64)
    length = len(s)
    if ShiftMode(mode) is ShiftMode.CIRCULAR:
        return circulant(s)
    k = np.arange(length)[:, None]
    shifts = np.arange(-(length - 1), length)[None, :]
    idx = k - shifts
    valid = (idx >= 0) & (idx < length)
    return np.where(valid, s[np.clip(idx, 0, length - 1)], 0.0)


class SwaveModel:
    """Precomputed shifts and gains for repeated forward projections."""

    def __init__(self, s: StandardWaveform, geom: ArrayGeometry, grid: RoiGrid,
                 acoustic: AcousticConfig, params: SwaveParams = SwaveParams()):
        samples = np.asarray(s.samples, dtype=np.float64)
        if len(samples) != acoustic.sample_depth:
            raise DimensionMismatch(
                f"waveform length {len(samples)} != sample depth {acoustic.sample_depth}")
        self.grid = grid
        self.params = params
        self.num_sensors = geom.num_sensors
        self.depth = acoustic.sample_depth
        d = distance_matrix(geom, grid)
        if np.any(d == 0):
            raise DegenerateDistance("a pixel center coincides with a sensor")
        ref = reference_distances(geom, grid)
        self.shifts = tau(d, ref[:, None], acoustic)
        self.gains = params.gain(ref)[:, None] / (d * d)
        self._matrix_t = shift_matrix(samples, params.shift_mode).T.copy()
        if params.shift_mode is ShiftMode.CIRCULAR:
            columns = self.shifts % self.depth
            self._width = self.depth
            keep = np.ones(self.shifts.shape, dtype=bool)
        else:
            columns = self.shifts + (self.depth - 1)
            self._width = 2 * self.depth - 1
            keep = np.abs(self.shifts) < self.depth
        rows = np.arange(self.num_sensors)[:, None] * self._width
        self._bins = np.where(keep, rows + columns, -1)

    def histogram(self, image):
        """Per-channel weighted shift histogram, shape (N, width)."""
        flat = np.asarray(image, dtype=np.float64).reshape(-1)
        if flat.size != self.grid.size:
            raise DimensionMismatch(f"image has {flat.size} pixels, grid has {self.grid.size}")
        nz = np.flatnonzero(flat)
        bins = self._bins[:, nz]
        weights = self.gains[:, nz] * flat[nz]
        ok = bins >= 0
        hist = np.bincount(bins[ok], weights=weights[ok],
                           minlength=self.num_sensors * self._width)
        return hist.reshape(self.num_sensors, self._width)

    def forward(self, image):
        return self.histogram(image) @ self._matrix_t


def swave_forward(image, s: StandardWaveform, geom: ArrayGeometry, grid: RoiGrid,
                  acoustic: AcousticConfig, params: SwaveParams = SwaveParams()):
    """Synthetic channel data (N x M) for ``image`` (n x m)."""
    return SwaveModel(s, geom, grid, acoustic, params).forward(image)
