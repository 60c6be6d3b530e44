"""Closed-form cycle model and the step counter the emulator fills in.

Per-stage costs (P lanes, cc = N / P execution cycles, n*m pixels, M samples):

    das        cc * n*m                       + das_latency
    normalize  n*m                            + divider_latency
    swave      cc * n*m * ceil(M_active / T)  + swave_latency
    deviation  n*m                            + deviation_latency
    loss       cc * M                         + loss_latency

A DAS-only frame costs ``das + normalize``. A model-based frame with ``t``
iterations costs ``das + normalize + swave + loss`` for the initial residual
plus ``t * (das + deviation + swave + loss)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass

STAGES = ("das", "normalize", "swave", "deviation", "loss")


@dataclass(frozen=True)
class CycleOverheads:
    das_latency: int = 8
    divider_latency: int = 16
    swave_latency: int = 8
    deviation_latency: int = 4
    loss_latency: int = 4
    # waveform samples written per lane per clock
    lane_throughput: int = 32
    # None -> full sample depth
    active_samples: int | None = None

    def swave_chunks(self, sample_depth):
        active = sample_depth if self.active_samples is None else self.active_samples
        return -(-active // self.lane_throughput)


@dataclass(frozen=True)
class CycleReport:
    cycles_das: int
    cycles_normalize: int
    cycles_swave: int
    cycles_deviation: int
    cycles_loss: int
    iterations_run: int
    total_cycles: int

    def fps_at_clock(self, clock_hz):
        return clock_hz / self.total_cycles

    def seconds_at_clock(self, clock_hz):
        return self.total_cycles / clock_hz

    def as_dict(self):
        return asdict(self)


def stage_cycles(pixels, cc_count, sample_depth, overheads: CycleOverheads):
    o = overheads
    return {
        "das": cc_count * pixels + o.das_latency,
        "normalize": pixels + o.divider_latency,
        "swave": cc_count * pixels * o.swave_chunks(sample_depth) + o.swave_latency,
        "deviation": pixels + o.deviation_latency,
        "loss": cc_count * sample_depth + o.loss_latency,
    }


def frame_total(stages, iterations):
    if iterations == 0:
        return stages["das"] + stages["normalize"]
    setup = stages["das"] + stages["normalize"] + stages["swave"] + stages["loss"]
    per_iter = stages["das"] + stages["deviation"] + stages["swave"] + stages["loss"]
    return setup + iterations * per_iter


def cycle_model(grid, geom, schedule, iterations, sample_depth,
                overheads: CycleOverheads = CycleOverheads()):
    """Predicted cycles for one frame; ``iterations=0`` means DAS only."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if schedule.num_sensors != geom.num_sensors:
        raise ValueError("schedule and geometry disagree on N")
    st = stage_cycles(grid.size, schedule.cc_count, sample_depth, overheads)
    return CycleReport(st["das"], st["normalize"], st["swave"], st["deviation"], st["loss"],
                       iterations, frame_total(st, iterations))


class CycleCounter:
    """Accumulates the steps the emulator actually schedules, per stage."""

    def __init__(self):
        self.counts = Counter()
        self.passes = Counter()

    def add(self, stage, cycles):
        if stage not in STAGES:
            raise KeyError(stage)
        self.counts[stage] += int(cycles)

    def finish_pass(self, stage):
        self.passes[stage] += 1

    def report(self, iterations_run):
        def per_pass(stage):
            return self.counts[stage] // self.passes[stage] if self.passes[stage] else 0

        return CycleReport(per_pass("das"), per_pass("normalize"), per_pass("swave"),
                           per_pass("deviation"), per_pass("loss"), iterations_run,
                           sum(self.counts.values()))
