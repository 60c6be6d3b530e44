"""The standard (unit center pixel) waveform and the circular shift operator."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch
from .geometry import AcousticConfig, ArrayGeometry, RoiGrid, reference_distances, round_half_away
from .padf import read_padf, write_padf


class ShiftMode(enum.Enum):
    CIRCULAR = "circular"
    ZERO_PAD = "zero_pad"


class PulseShape(enum.Enum):
    N_WAVE = "n_wave"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class PulseParams:
    """Analytic pulse parameters; ``width`` is the Gaussian sigma in samples."""

    width: float = 2.0
    shape: PulseShape = PulseShape.GAUSSIAN

    def __post_init__(self):
        object.__setattr__(self, "shape", PulseShape(self.shape))


@dataclass(frozen=True)
class StandardWaveform:
    samples: np.ndarray
    ref_distances: np.ndarray
    sample_rate: float

    def __len__(self):
        return len(self.samples)


def pulse_center(ref_distance, acoustic: AcousticConfig):
    return int(round_half_away(ref_distance / acoustic.sound_speed * acoustic.sample_rate))


def analytic_pulse(length, center, params: PulseParams):
    """Pulse of ``length`` samples centered at ``center`` on a circular time axis.

    Offsets are wrapped into ``[-length/2, length/2)``; for even lengths the
    sample with no mirror partner is zeroed so the pulse keeps exact
    point (N-wave) or mirror (Gaussian) symmetry about ``center``.
    """
    if not 2 <= params.width <= length / 4:
        raise ValueError(f"pulse width {params.width} outside [2, {length / 4}]")
    k = (np.arange(length) - center + length // 2) % length - length // 2
    g = np.exp(-(k.astype(np.float64) ** 2) / (2.0 * params.width ** 2))
    s = -k * g if params.shape is PulseShape.N_WAVE else g
    if length % 2 == 0:
        s[k == -(length // 2)] = 0.0
    return s / np.max(np.abs(s))


def analytic_standard_waveform(acoustic: AcousticConfig, geom: ArrayGeometry,
                               grid: RoiGrid, pulse_params: PulseParams = PulseParams()):
    """Standard waveform with its pulse at the mean center-pixel arrival time.

    For a ring concentric with the grid every sensor sees the same arrival
    time; for other layouts the mean reference distance is used.
    """
    ref = reference_distances(geom, grid)
    center = pulse_center(float(np.mean(ref)), acoustic)
    samples = analytic_pulse(acoustic.sample_depth, center, pulse_params)
    return StandardWaveform(samples, ref, acoustic.sample_rate)


def loop_shift(s, tau, mode=ShiftMode.CIRCULAR):
    """``out[k] = s[k - tau]``, wrapped circularly or zero-filled."""
    s = np.asarray(s)
    tau = int(tau)
    if ShiftMode(mode) is ShiftMode.CIRCULAR:
        return np.roll(s, tau)
    out = np.zeros_like(s)
    length = len(s)
    if tau >= 0:
        if tau < length:
            out[tau:] = s[:length - tau]
    elif -tau < length:
        out[:tau] = s[-tau:]
    return out


def write_waveform(path, wf: StandardWaveform):
    write_padf(path, np.asarray(wf.samples)[None, :], wf.sample_rate)


def load_waveform(path, sample_depth=None, geom=None, grid=None):
    """Read a single-row PADF file as a standard waveform.

    ``ref_distances`` are recomputed from ``geom``/``grid`` when given (the
    file stores samples only).
    """
    data = read_padf(path)
    if data.samples.shape[0] != 1:
        raise LengthMismatch(f"waveform file has {data.samples.shape[0]} rows, expected 1")
    samples = data.samples[0].astype(np.float64)
    if sample_depth is not None and len(samples) != sample_depth:
        raise LengthMismatch(f"waveform has {len(samples)} samples, config expects {sample_depth}")
    ref = reference_distances(geom, grid) if geom is not None and grid is not None else np.empty(0)
    return StandardWaveform(samples, ref, data.sample_rate)
