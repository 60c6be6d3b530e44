"""Fixed-point formats and the lane/execution-cycle schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class FixedPointSpec:
    """Word widths of the emulated datapath.

    ``amplitude_scale_shift`` is the right shift applied to each
    ``amp_code * pixel`` product in the forward model; ``None`` means
    ``amplitude_bits``. ``lr_shift`` sets the denominator of the dyadic
    learning-rate multiply ``q / 2**lr_shift``. ``image_frac_bits`` extra
    fractional bits are kept in the iterative image store.
    """

    delay_bits: int = 10
    phase_bits: int = 10
    amplitude_bits: int = 8
    sample_bits: int = 12
    accumulator_bits: int = 32
    norm_shift: int = 8
    amplitude_scale_shift: int | None = None
    lr_shift: int = 12
    image_frac_bits: int = 4
    gain_mantissa_bits: int = 16

    def __post_init__(self):
        widths = (self.delay_bits, self.phase_bits, self.amplitude_bits,
                  self.sample_bits, self.accumulator_bits)
        if min(widths) < 1:
            raise ConfigError("all widths must be >= 1")
        if self.accumulator_bits > 62:
            raise ConfigError("accumulator_bits above 62 are not emulated")
        if min(self.norm_shift, self.lr_shift, self.image_frac_bits) < 0:
            raise ConfigError("shifts must be >= 0")

    @property
    def amp_shift(self):
        return self.amplitude_bits if self.amplitude_scale_shift is None else self.amplitude_scale_shift

    @property
    def phase_bias(self):
        return 1 << (self.phase_bits - 1)

    @property
    def sample_max(self):
        return (1 << (self.sample_bits - 1)) - 1

    @property
    def acc_min(self):
        return -(1 << (self.accumulator_bits - 1))

    @property
    def acc_max(self):
        return (1 << (self.accumulator_bits - 1)) - 1

    def check_headroom(self, num_sensors):
        """Raise if N sample-width additions could overflow the accumulator."""
        need = self.sample_bits + math.ceil(math.log2(max(num_sensors, 1)))
        if need > self.accumulator_bits:
            raise ConfigError(
                f"accumulator_bits={self.accumulator_bits} < sample_bits + log2(N) = {need}")

    def lr_code(self, lr):
        """Dyadic approximation ``q`` of ``lr`` with denominator ``2**lr_shift``."""
        q = int(round(lr * (1 << self.lr_shift)))
        if q < 1:
            raise ConfigError(f"learning rate {lr} rounds to zero with lr_shift={self.lr_shift}")
        return q


def saturate(values, lo, hi):
    """Clip to ``[lo, hi]``; returns ``(clipped, count_clipped)``."""
    values = np.asarray(values)
    count = int(np.count_nonzero((values < lo) | (values > hi)))
    return np.clip(values, lo, hi), count


def round_shift(values, shift):
    """Arithmetic right shift with round-half-up (``(x + 2**(s-1)) >> s``)."""
    values = np.asarray(values, dtype=np.int64)
    if shift <= 0:
        return values << (-shift)
    return (values + (1 << (shift - 1))) >> shift


def trunc_div(num, den):
    """Integer division truncating toward zero, as a hardware divider does."""
    num = np.asarray(num, dtype=np.int64)
    q = np.abs(num) // den
    return np.where(num < 0, -q, q)


def quantize_samples(S, spec: FixedPointSpec, full_scale=None):
    """ADC-style quantization of float channel data to signed ``sample_bits``.

    Returns ``(codes, scale)`` with ``codes ~= S * scale``. Integer input is
    passed through unchanged (``scale == 1``) after a range check.
    """
    S = np.asarray(S)
    if np.issubdtype(S.dtype, np.integer):
        if S.size and np.abs(S).max() > spec.sample_max + 1:
            raise ConfigError("integer samples exceed sample_bits")
        return S.astype(np.int64), 1.0
    peak = float(np.abs(S).max()) if full_scale is None else float(full_scale)
    if peak == 0:
        return np.zeros(S.shape, dtype=np.int64), 1.0
    scale = spec.sample_max / peak
    codes = np.clip(np.rint(S * scale), -spec.sample_max, spec.sample_max)
    return codes.astype(np.int64), scale


@dataclass(frozen=True)
class ExecSchedule:
    """Assignment of sensors to ``lanes`` parallel channels over execution cycles.

    Execution cycle ``cc`` (0-based here) handles sensors
    ``cc * lanes + lane_order[lane]``. ``lane_order=None`` is the identity.
    """

    num_sensors: int = 128
    lanes: int = 32
    lane_order: tuple[int, ...] | None = None
    adder_fanin: int = 4

    def __post_init__(self):
        if self.lanes < 1 or self.num_sensors % self.lanes:
            raise ConfigError(f"N={self.num_sensors} is not a multiple of lanes={self.lanes}")
        if self.lane_order is not None and sorted(self.lane_order) != list(range(self.lanes)):
            raise ConfigError("lane_order must be a permutation of range(lanes)")
        if self.adder_fanin < 2:
            raise ConfigError("adder_fanin must be >= 2")

    @property
    def cc_count(self):
        return self.num_sensors // self.lanes

    def sensors_for(self, cc):
        order = self.lane_order or range(self.lanes)
        return [cc * self.lanes + lane for lane in order]

    def rom_enable(self, mapping):
        """Stored-table indices read during each execution cycle."""
        return [sorted({mapping[i][0] for i in self.sensors_for(cc)})
                for cc in range(self.cc_count)]

    @property
    def adder_stages(self):
        stages, width = 0, self.lanes
        while width > 1:
            width = -(-width // self.adder_fanin)
            stages += 1
        return stages


def lane_tree_sum(values, fanin=4):
    """Sum lane values (axis 0) through a fixed adder tree of the given fan-in."""
    values = np.asarray(values, dtype=np.int64)
    while values.shape[0] > 1:
        pad = (-values.shape[0]) % fanin
        if pad:
            values = np.concatenate([values, np.zeros((pad,) + values.shape[1:], np.int64)])
        values = values.reshape((-1, fanin) + values.shape[1:]).sum(axis=1)
    return values[0]
