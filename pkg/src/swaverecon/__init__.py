"""Photoacoustic image reconstruction: DAS beamformers, the s-Wave forward
model, model-based iteration and a fixed-point hardware emulator."""

from .backward import (das_cf_reconstruct, das_reconstruct, dmas_reconstruct, gather,
                       normalize_image)
from .errors import ReconError
from .geometry import (AcousticConfig, AmuMode, ArrayGeometry, DelayTable, Fold, RoiGrid,
                       amu_lookup, compute_delay_table, fold_tables, storage_budget)
from .iterate import ModelBasedReconstructor, ReconConfig, model_based_reconstruct
from .metrics import SsimParams, error_map, ssim
from .padf import SensorData, read_padf, write_padf
from .phantom import NoiseSpec, PhantomSpec, Target, gen_phantom, oracle_forward
from .swave import SwaveModel, SwaveParams, swave_forward
from .waveform import PulseParams, PulseShape, ShiftMode, StandardWaveform, analytic_standard_waveform

__all__ = [
    "AcousticConfig", "AmuMode", "ArrayGeometry", "DelayTable", "Fold", "ModelBasedReconstructor",
    "NoiseSpec", "PhantomSpec", "PulseParams", "PulseShape", "ReconConfig", "ReconError",
    "RoiGrid", "SensorData", "ShiftMode", "SsimParams", "StandardWaveform", "SwaveModel",
    "SwaveParams", "Target", "amu_lookup", "analytic_standard_waveform", "compute_delay_table",
    "das_cf_reconstruct", "das_reconstruct", "dmas_reconstruct", "error_map", "fold_tables",
    "gather", "gen_phantom", "model_based_reconstruct", "normalize_image", "oracle_forward",
    "read_padf", "ssim", "storage_budget", "swave_forward", "write_padf",
]
