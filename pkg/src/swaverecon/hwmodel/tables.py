"""Quantized, symmetry-folded ROM contents: delay, phase and amplitude."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import (AcousticConfig, ArrayGeometry, Fold, FoldedTableSet, RoiGrid,
                        distance_matrix, fold_tables, quantize_unsigned,
                        reference_distances, round_half_away, samples_from_distance,
                        storage_budget)
from ..swave import SwaveParams
from .fixed import FixedPointSpec


@dataclass(frozen=True)
class QuantizedTables:
    delay: FoldedTableSet
    phase: FoldedTableSet
    amplitude: FoldedTableSet
    # real value of amplitude code (2**amplitude_bits - 1)
    amplitude_full_scale: float
    overflow: dict
    spec: FixedPointSpec

    @property
    def fold(self):
        return self.delay.fold

    @property
    def num_sensors(self):
        return self.delay.num_sensors

    @property
    def grid_shape(self):
        return self.delay.grid_shape

    def storage_bits(self):
        n_entries = self.delay.tables.size
        s = self.spec
        return {"delay": n_entries * s.delay_bits, "phase": self.phase.tables.size * s.phase_bits,
                "amplitude": self.amplitude.tables.size * s.amplitude_bits}

    def shifts(self):
        """Signed sample shifts decoded from the phase ROM, shape (N, n*m)."""
        return self.phase.unfold() - self.spec.phase_bias


def quantize_tables(geom: ArrayGeometry, grid: RoiGrid, acoustic: AcousticConfig,
                    params: SwaveParams = SwaveParams(),
                    spec: FixedPointSpec = FixedPointSpec(), fold=Fold.QUARTER):
    """Build the three ROM classes and fold them.

    Phase codes hold ``tau + bias`` so negative shifts fit unsigned storage.
    Amplitude codes hold ``k / d**2`` scaled so the largest entry maps to
    ``2**amplitude_bits - 1``.
    """
    fold = Fold(fold)
    d = distance_matrix(geom, grid)
    ref = reference_distances(geom, grid)

    delay, delay_over = quantize_unsigned(samples_from_distance(d, acoustic), spec.delay_bits)

    tau = round_half_away(samples_from_distance(d - ref[:, None], acoustic))
    phase, phase_over = quantize_unsigned(tau + spec.phase_bias, spec.phase_bits)

    amp = params.gain(ref)[:, None] / (d * d)
    full_scale = float(amp.max())
    top = (1 << spec.amplitude_bits) - 1
    amp_codes, amp_over = quantize_unsigned(amp * (top / full_scale), spec.amplitude_bits)

    def fold_one(values, width):
        return fold_tables(values, geom, grid, fold, bit_width=width)

    return QuantizedTables(
        delay=fold_one(delay, spec.delay_bits),
        phase=fold_one(phase, spec.phase_bits),
        amplitude=fold_one(amp_codes, spec.amplitude_bits),
        amplitude_full_scale=full_scale,
        overflow={"delay": delay_over, "phase": phase_over, "amplitude": amp_over},
        spec=spec,
    )


def budget_for(tables: QuantizedTables, num_sensors, grid: RoiGrid):
    s = tables.spec
    return storage_budget(num_sensors, grid.n, grid.m, s.delay_bits, s.phase_bits,
                          s.amplitude_bits, tables.fold)
