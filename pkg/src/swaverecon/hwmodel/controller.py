"""Fixed-point emulation of the iterative reconstruction controller.

The image store holds ``|I|`` normalized so the initial DAS peak is
``2**norm_shift``, with ``image_frac_bits`` extra fractional bits. The
initial DAS maximum is latched and reused as the divisor for every residual
DAS pass, so corrections share the image's scale. The forward engine output
is brought back to sample units by a single gain register multiply and
shift computed at setup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..geometry import AcousticConfig, ArrayGeometry, Fold, RoiGrid
from ..iterate import IterationRecord, IterationTrace, ModelBasedReconstructor, ReconConfig
from ..errors import AccumulatorOverflow, DimensionMismatch
from ..swave import SwaveParams
from ..waveform import StandardWaveform
from .cycles import CycleCounter, CycleOverheads, CycleReport, cycle_model
from .datapath import SwaveEngine, hw_das
from .fixed import ExecSchedule, FixedPointSpec, quantize_samples, round_shift, saturate
from .tables import QuantizedTables, quantize_tables


@dataclass
class SaturationReport:
    forward: int = 0
    image: int = 0
    table_overflow: dict = field(default_factory=dict)

    @property
    def total(self):
        return self.forward + self.image + sum(self.table_overflow.values())


@dataclass
class HwRunResult:
    # magnitude image in normalized units (initial DAS peak == 2**norm_shift)
    image: np.ndarray
    image_codes: np.ndarray
    trace: IterationTrace
    cycles: CycleReport
    saturation: SaturationReport
    sample_scale: float = 1.0
    gain_register: int = 0
    gain_shift: int = 0
    lr_code: int = 0


def default_schedule(num_sensors, lanes=32):
    return ExecSchedule(num_sensors=num_sensors, lanes=math.gcd(num_sensors, lanes))


def gain_register(value, mantissa_bits):
    """Split a positive real gain into ``(register, shift)`` with a full mantissa."""
    if not value > 0:
        raise ValueError("gain must be > 0")
    shift = mantissa_bits - 1 - math.floor(math.log2(value))
    return int(round(value * 2.0 ** shift)), shift


class HardwareEmulator:
    """Bit-level model of DAS, s-Wave and the iteration control for one setup."""

    def __init__(self, geom: ArrayGeometry, grid: RoiGrid, acoustic: AcousticConfig,
                 s: StandardWaveform, params: SwaveParams = SwaveParams(),
                 cfg: ReconConfig = ReconConfig(), spec: FixedPointSpec = FixedPointSpec(),
                 schedule: ExecSchedule | None = None, fold=Fold.QUARTER,
                 overheads: CycleOverheads = CycleOverheads(), tables: QuantizedTables | None = None):
        spec.check_headroom(geom.num_sensors)
        self.geom, self.grid, self.acoustic = geom, grid, acoustic
        self.params, self.cfg, self.spec = params, cfg, spec
        self.overheads = overheads
        self.schedule = schedule or default_schedule(geom.num_sensors)
        self.tables = tables or quantize_tables(geom, grid, acoustic, params, spec, fold)

        samples = np.asarray(s.samples, dtype=np.float64)
        self.s_peak = float(np.abs(samples).max())
        if self.s_peak == 0:
            raise ValueError("standard waveform is all zeros")
        self.s_fixed = np.rint(samples * (spec.sample_max / self.s_peak)).astype(np.int64)
        self.engine = SwaveEngine(self.tables, self.s_fixed, self.schedule, spec, params.shift_mode)
        self._reference = ModelBasedReconstructor(geom, grid, acoustic, s, params, cfg)

    @property
    def backward_gain(self):
        return self._reference.backward_gain

    def predicted_cycles(self, iterations):
        return cycle_model(self.grid, self.geom, self.schedule, iterations,
                           self.acoustic.sample_depth, self.overheads)

    def _quantize(self, S):
        S = np.asarray(S)
        expect = (self.geom.num_sensors, self.acoustic.sample_depth)
        if S.shape != expect:
            raise DimensionMismatch(f"sensor data {S.shape} != {expect}")
        return quantize_samples(S, self.spec)

    def _das(self, S_q, counter, **kw):
        shift = self.spec.norm_shift + self.spec.image_frac_bits
        return hw_das(S_q, self.tables, self.schedule, self.spec, shift=shift,
                      counter=counter, overheads=self.overheads, **kw)

    def _normalize_pass(self, counter):
        counter.add("normalize", self.grid.size + self.overheads.divider_latency)
        counter.finish_pass("normalize")

    def das_frame(self, S):
        """DAS-only frame; returns ``(image in normalized units, CycleReport)``."""
        S_q, _ = self._quantize(S)
        counter = CycleCounter()
        res = self._das(S_q, counter)
        self._normalize_pass(counter)
        return res.image / float(1 << self.spec.image_frac_bits), counter.report(0)

    def run(self, S) -> HwRunResult:
        cfg, spec, ov = self.cfg, self.spec, self.overheads
        S_q, q_scale = self._quantize(S)
        threshold_q = cfg.threshold_for(S) * q_scale
        frac = spec.image_frac_bits
        counter = CycleCounter()
        sat = SaturationReport(table_overflow=dict(self.tables.overflow))
        beta = self.backward_gain
        trace = IterationTrace(backward_gain=beta)

        first = self._das(S_q, counter, absolute=True)
        self._normalize_pass(counter)
        max0 = first.max_value
        image = first.image.astype(np.int64)
        if not cfg.keep_magnitude:
            image = np.where(first.accumulator < 0, -image, image)
        trace.image_scale = (1 << spec.norm_shift) / (beta * max0 / q_scale) if max0 else 1.0

        top = (1 << spec.amplitude_bits) - 1
        gain_value = (self.tables.amplitude_full_scale * 2.0 ** spec.amp_shift * self.s_peak
                      * beta * max(max0, 1)
                      / (top * spec.sample_max * 2.0 ** spec.norm_shift))
        g_reg, g_shift = gain_register(gain_value, spec.gain_mantissa_bits)
        q = spec.lr_code(cfg.learning_rate)

        def forward_residual():
            proj = self.engine.project(np.abs(image), frac, counter, ov)
            sat.forward += proj.saturations
            out, n_sat = saturate(round_shift(proj.channels * g_reg, g_shift),
                                  spec.acc_min, spec.acc_max)
            sat.forward += n_sat
            R = S_q - out
            for _ in range(self.schedule.cc_count):
                counter.add("loss", self.acoustic.sample_depth)
            counter.add("loss", ov.loss_latency)
            counter.finish_pass("loss")
            energy = int(np.sum(R * R))
            return R, energy

        def record(t, energy):
            loss = math.sqrt(energy) / q_scale
            trace.iterations_run, trace.final_loss = t, loss
            if cfg.record_trace:
                snap = np.abs(image) / float(1 << frac) if cfg.record_images else None
                trace.records.append(IterationRecord(t, loss, snap))
            return energy < threshold_q ** 2

        R, energy = forward_residual()
        done = record(0, energy) or energy == 0 or max0 == 0
        t = 0
        while not done and t < cfg.max_iterations:
            t += 1
            try:
                corr = self._das(R, counter, absolute=False, divisor=max0).image
            except AccumulatorOverflow:
                sat.image += 1
                raise
            image = image + round_shift(q * corr, spec.lr_shift)
            if cfg.keep_magnitude:
                image = np.abs(image)
            image, n_sat = saturate(image, spec.acc_min, spec.acc_max)
            sat.image += n_sat
            counter.add("deviation", self.grid.size + ov.deviation_latency)
            counter.finish_pass("deviation")
            R, energy = forward_residual()
            done = record(t, energy)

        trace.signed_image = image / float(1 << frac)
        return HwRunResult(
            image=np.abs(image) / float(1 << frac), image_codes=image, trace=trace,
            cycles=counter.report(trace.iterations_run), saturation=sat, sample_scale=q_scale,
            gain_register=g_reg, gain_shift=g_shift, lr_code=q)


def hw_model_based(S, geom, grid, acoustic, s, params=SwaveParams(), cfg=ReconConfig(),
                   spec=FixedPointSpec(), schedule=None, fold=Fold.QUARTER,
                   overheads=CycleOverheads()):
    """Run the emulator once; returns ``(image, trace, CycleReport)``."""
    res = HardwareEmulator(geom, grid, acoustic, s, params, cfg, spec, schedule, fold,
                           overheads).run(S)
    return res.image, res.trace, res.cycles
