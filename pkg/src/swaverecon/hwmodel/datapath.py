"""Integer emulation of the backward (DAS) and forward (s-Wave) engines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import AccumulatorOverflow, DimensionMismatch, ReconError
from ..swave import shift_matrix
from ..waveform import ShiftMode
from .cycles import CycleCounter, CycleOverheads
from .fixed import ExecSchedule, FixedPointSpec, lane_tree_sum, round_shift, saturate, trunc_div
from .tables import QuantizedTables

# float64 sums of integers are exact below this bound
_EXACT_LIMIT = 1 << 53


@dataclass
class HwDasResult:
    image: np.ndarray
    accumulator: np.ndarray
    max_value: int


@dataclass
class HwSwaveResult:
    channels: np.ndarray
    saturations: int


def _check_schedule(tables, schedule):
    if schedule.num_sensors != tables.num_sensors:
        raise DimensionMismatch(
            f"schedule covers {schedule.num_sensors} sensors, tables {tables.num_sensors}")


def hw_das(S_fixed, tables: QuantizedTables, schedule: ExecSchedule,
           spec: FixedPointSpec = FixedPointSpec(), *, absolute=True, divisor=None,
           shift=None, counter: CycleCounter | None = None,
           overheads: CycleOverheads = CycleOverheads()):
    """Lane-parallel delay-and-sum over integer samples.

    Every execution cycle the lanes fetch one sample per pixel through the
    AMU-folded delay ROM and the adder tree adds them into the pixel
    accumulator. With ``absolute`` the output is ``(|v| << shift) // max|v|``;
    otherwise it is ``trunc(v * 2**shift / divisor)`` with an externally
    latched divisor. ``shift`` defaults to ``spec.norm_shift``.
    """
    S = np.asarray(S_fixed)
    if not np.issubdtype(S.dtype, np.integer):
        raise TypeError("hw_das expects integer samples")
    S = S.astype(np.int64)
    _check_schedule(tables, schedule)
    if S.ndim != 2 or S.shape[0] != tables.num_sensors:
        raise DimensionMismatch(f"samples {S.shape} vs {tables.num_sensors} sensors")
    shift = spec.norm_shift if shift is None else shift
    n, m = tables.grid_shape
    depth = S.shape[1]

    acc = np.zeros(n * m, dtype=np.int64)
    for cc in range(schedule.cc_count):
        lanes = []
        for sensor in schedule.sensors_for(cc):
            addr = tables.delay.row(sensor)
            if addr.max(initial=0) >= depth:
                raise DimensionMismatch(f"delay address {addr.max()} >= sample depth {depth}")
            lanes.append(S[sensor, addr])
        acc = acc + lane_tree_sum(lanes, schedule.adder_fanin)
        if acc.size and (acc.min() < spec.acc_min or acc.max() > spec.acc_max):
            raise AccumulatorOverflow(f"DAS accumulator overflow in execution cycle {cc}")
        if counter is not None:
            counter.add("das", n * m)
    if counter is not None:
        counter.add("das", overheads.das_latency)
        counter.finish_pass("das")

    if absolute:
        mag = np.abs(acc)
        peak = int(mag.max(initial=0))
        image = np.zeros_like(mag) if peak == 0 else (mag << shift) // peak
    else:
        if divisor is None or divisor <= 0:
            raise ValueError("signed DAS needs a positive latched divisor")
        peak = int(divisor)
        image = trunc_div(acc << shift, peak)
    return HwDasResult(image.reshape(n, m), acc.reshape(n, m), peak)


class SwaveEngine:
    """Forward projector with the unfolded ROM contents cached."""

    def __init__(self, tables: QuantizedTables, s_fixed, schedule: ExecSchedule,
                 spec: FixedPointSpec = FixedPointSpec(), shift_mode=ShiftMode.CIRCULAR):
        _check_schedule(tables, schedule)
        s_fixed = np.asarray(s_fixed)
        if not np.issubdtype(s_fixed.dtype, np.integer):
            raise TypeError("standard waveform must be integer coded")
        self.tables = tables
        self.schedule = schedule
        self.spec = spec
        self.depth = len(s_fixed)
        self.num_sensors = tables.num_sensors
        self.amp = tables.amplitude.unfold().astype(np.int64)
        shifts = tables.shifts()
        mode = ShiftMode(shift_mode)
        if mode is ShiftMode.CIRCULAR:
            columns, self.width = shifts % self.depth, self.depth
            keep = np.ones(shifts.shape, dtype=bool)
        else:
            columns, self.width = shifts + (self.depth - 1), 2 * self.depth - 1
            keep = np.abs(shifts) < self.depth
        rows = np.arange(self.num_sensors)[:, None] * self.width
        self.bins = np.where(keep, rows + columns, -1)
        self.matrix_t = shift_matrix(s_fixed.astype(np.float64), mode).T.astype(np.int64).copy()
        self.s_l1 = int(np.abs(s_fixed).sum())

    def project(self, image_fixed, frac_bits=0, counter: CycleCounter | None = None,
                overheads: CycleOverheads = CycleOverheads()):
        """Channel accumulators for a non-negative integer image."""
        img = np.asarray(image_fixed)
        if not np.issubdtype(img.dtype, np.integer):
            raise TypeError("image must be integer coded")
        flat = img.astype(np.int64).reshape(-1)
        if flat.size != self.amp.shape[1]:
            raise DimensionMismatch(f"image has {flat.size} pixels, tables {self.amp.shape[1]}")
        if flat.size and flat.min() < 0:
            raise ValueError("forward engine takes magnitudes")
        spec = self.spec

        nz = np.flatnonzero(flat)
        terms = round_shift(self.amp[:, nz] * flat[nz], spec.amp_shift + frac_bits)
        bins = self.bins[:, nz]
        ok = (bins >= 0) & (terms != 0)
        size = self.num_sensors * self.width
        if int(np.abs(terms).sum()) < _EXACT_LIMIT:
            hist = np.rint(np.bincount(bins[ok], weights=terms[ok].astype(np.float64),
                                       minlength=size)).astype(np.int64)
        else:
            hist = np.zeros(size, dtype=np.int64)
            np.add.at(hist, bins[ok], terms[ok])
        hist = hist.reshape(self.num_sensors, self.width)

        peak = int(np.abs(hist).max(initial=0))
        if peak * self.s_l1 < _EXACT_LIMIT:
            out = np.rint(hist.astype(np.float64) @ self.matrix_t.astype(np.float64))
            out = out.astype(np.int64)
        elif peak * self.s_l1 < (1 << 62):
            out = hist @ self.matrix_t
        else:
            raise ReconError("forward accumulator exceeds 62 bits; reduce image scale")

        if counter is not None:
            chunks = overheads.swave_chunks(self.depth)
            for _ in range(self.schedule.cc_count):
                counter.add("swave", len(flat) * chunks)
            counter.add("swave", overheads.swave_latency)
            counter.finish_pass("swave")
        clipped, count = saturate(out, spec.acc_min, spec.acc_max)
        return HwSwaveResult(clipped, count)


def hw_swave(image_fixed, tables: QuantizedTables, s_fixed, schedule: ExecSchedule,
             spec: FixedPointSpec = FixedPointSpec(), frac_bits=0,
             shift_mode=ShiftMode.CIRCULAR, counter=None, overheads=CycleOverheads()):
    """One-shot integer s-Wave projection; see :class:`SwaveEngine`."""
    engine = SwaveEngine(tables, s_fixed, schedule, spec, shift_mode)
    return engine.project(image_fixed, frac_bits, counter, overheads)
