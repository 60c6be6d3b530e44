"""End-to-end helpers shared by the command line and the demos."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backward import das_cf_reconstruct, das_reconstruct, dmas_reconstruct, normalize_image
from .config import Mode, RunConfig
from .errors import ConfigError
from .geometry import compute_delay_table
from .hwmodel import HardwareEmulator
from .hwmodel.cycles import CycleReport
from .iterate import IterationTrace, ModelBasedReconstructor
from .phantom import apply_noise, gen_phantom, oracle_forward
from .swave import swave_forward
from .waveform import analytic_standard_waveform, load_waveform

ALGORITHMS = ("das", "dmas", "das-cf", "model-based")


def standard_waveform(cfg: RunConfig):
    if cfg.waveform.path:
        return load_waveform(cfg.waveform.path, cfg.acoustic.sample_depth, cfg.geometry, cfg.grid)
    return analytic_standard_waveform(cfg.acoustic, cfg.geometry, cfg.grid, cfg.waveform.pulse)


def forward_data(image, cfg: RunConfig, s=None):
    s = s if s is not None else standard_waveform(cfg)
    return swave_forward(image, s, cfg.geometry, cfg.grid, cfg.acoustic, cfg.swave)


def phantom_data(cfg: RunConfig, seed=0, oracle=False):
    """Rasterized phantom and (optionally noisy) channel data."""
    s = standard_waveform(cfg)
    image = gen_phantom(cfg.phantom, cfg.grid)
    if oracle:
        S = oracle_forward(cfg.phantom, cfg.geometry, cfg.acoustic, s, cfg.swave.k)
    else:
        S = forward_data(image, cfg, s)
    S = apply_noise(S, cfg.phantom.noise, np.random.default_rng(seed))
    return image, S


@dataclass
class ReconOutput:
    image: np.ndarray
    trace: IterationTrace | None = None
    cycles: CycleReport | None = None
    extra: dict = field(default_factory=dict)

    @property
    def display(self):
        """Image scaled so its peak is 256."""
        return normalize_image(self.image)


def reconstruct(S, cfg: RunConfig, algo="das", mode=None):
    mode = Mode(mode) if mode is not None else cfg.mode
    if algo not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algo!r}")
    if mode is Mode.HARDWARE:
        return _reconstruct_hw(S, cfg, algo)

    S = np.asarray(S, dtype=np.float64)
    if algo == "model-based":
        recon = ModelBasedReconstructor(cfg.geometry, cfg.grid, cfg.acoustic,
                                        standard_waveform(cfg), cfg.swave, cfg.recon)
        image, trace = recon.run(S)
        return ReconOutput(image, trace)
    delays = compute_delay_table(cfg.geometry, cfg.grid, cfg.acoustic, cfg.fixed_point.delay_bits)
    fn = {"das": das_reconstruct, "dmas": dmas_reconstruct, "das-cf": das_cf_reconstruct}[algo]
    # beamformer outputs are signed; images are displayed as magnitudes
    return ReconOutput(np.abs(fn(S, delays, cfg.grid.shape)))


def hardware_emulator(cfg: RunConfig):
    return HardwareEmulator(cfg.geometry, cfg.grid, cfg.acoustic, standard_waveform(cfg),
                            cfg.swave, cfg.recon, cfg.fixed_point, cfg.exec_schedule(),
                            cfg.schedule.fold, cfg.cycles)


def _reconstruct_hw(S, cfg, algo):
    if algo not in ("das", "model-based"):
        raise ConfigError(f"hardware mode supports das and model-based, not {algo!r}")
    emu = hardware_emulator(cfg)
    if algo == "das":
        image, cycles = emu.das_frame(S)
        return ReconOutput(image, None, cycles)
    res = emu.run(S)
    extra = {
        "saturation": {"forward": res.saturation.forward, "image": res.saturation.image,
                       "table_overflow": res.saturation.table_overflow},
        "gain_register": res.gain_register,
        "gain_shift": res.gain_shift,
        "lr_code": res.lr_code,
        "lr_shift": cfg.fixed_point.lr_shift,
    }
    return ReconOutput(res.image, res.trace, res.cycles, extra)
