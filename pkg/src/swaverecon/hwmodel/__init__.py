"""Bit-accurate emulation of the hardware datapath and its cycle budget."""

from .controller import HardwareEmulator, HwRunResult, SaturationReport, hw_model_based
from .cycles import CycleCounter, CycleOverheads, CycleReport, cycle_model
from .datapath import SwaveEngine, hw_das, hw_swave
from .fixed import (ExecSchedule, FixedPointSpec, lane_tree_sum, quantize_samples,
                    round_shift, saturate, trunc_div)
from .tables import QuantizedTables, budget_for, quantize_tables

__all__ = [
    "CycleCounter", "CycleOverheads", "CycleReport", "ExecSchedule", "FixedPointSpec",
    "HardwareEmulator", "HwRunResult", "QuantizedTables", "SaturationReport", "SwaveEngine",
    "budget_for", "cycle_model", "hw_das", "hw_model_based", "hw_swave", "lane_tree_sum",
    "quantize_samples", "quantize_tables", "round_shift", "saturate", "trunc_div",
]
