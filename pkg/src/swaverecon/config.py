"""TOML run configuration.

Every section and key is optional; omitted values take the defaults of the
corresponding dataclass, which together describe a 128-element ring of
radius 30 mm around a 20 mm, 128 x 128 grid sampled at 20 MHz for 1024
samples. Unknown sections or keys are rejected. See ``docs/config.md``.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import sys
import warnings
from dataclasses import dataclass, field

from .errors import ConfigError
from .geometry import AcousticConfig, ArrayGeometry, ArrayKind, Fold, RoiGrid
from .hwmodel.cycles import CycleOverheads
from .hwmodel.fixed import ExecSchedule, FixedPointSpec
from .iterate import ReconConfig
from .phantom import NoiseSpec, PhantomSpec, Target
from .swave import SwaveParams
from .waveform import PulseParams, PulseShape, ShiftMode

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class Mode(enum.Enum):
    REFERENCE = "reference"
    HARDWARE = "hardware"


@dataclass(frozen=True)
class WaveformConfig:
    shape: PulseShape = PulseShape.GAUSSIAN
    width: float = 2.0
    # optional PADF file with one row holding the measured waveform
    path: str | None = None

    @property
    def pulse(self):
        return PulseParams(self.width, self.shape)


@dataclass(frozen=True)
class ScheduleConfig:
    lanes: int = 32
    lane_order: tuple[int, ...] | None = None
    adder_fanin: int = 4
    fold: Fold = Fold.QUARTER

    def schedule(self, num_sensors):
        return ExecSchedule(num_sensors, self.lanes, self.lane_order, self.adder_fanin)


@dataclass(frozen=True)
class RunConfig:
    mode: Mode = Mode.REFERENCE
    clock_hz: float = 200e6
    geometry: ArrayGeometry = field(default_factory=lambda: ArrayGeometry.ring(128, 0.03))
    grid: RoiGrid = field(default_factory=lambda: RoiGrid(128, 128, 0.02, 0.02))
    acoustic: AcousticConfig = field(default_factory=AcousticConfig)
    waveform: WaveformConfig = field(default_factory=WaveformConfig)
    swave: SwaveParams = field(default_factory=SwaveParams)
    recon: ReconConfig = field(default_factory=ReconConfig)
    fixed_point: FixedPointSpec = field(default_factory=FixedPointSpec)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    cycles: CycleOverheads = field(default_factory=CycleOverheads)
    phantom: PhantomSpec = field(default_factory=PhantomSpec)

    def exec_schedule(self):
        return self.schedule.schedule(self.geometry.num_sensors)

    def to_dict(self):
        return _plain(dataclasses.asdict(self))

    def digest(self):
        """SHA-256 of the fully resolved configuration."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _plain(value):
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _build(cls, section, name, convert=None):
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")
    kwargs = dict(section)
    try:
        for key, fn in (convert or {}).items():
            if key in kwargs and kwargs[key] is not None:
                kwargs[key] = fn(kwargs[key])
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc


_SECTIONS = {"geometry", "grid", "acoustic", "waveform", "swave", "recon", "fixed_point",
             "schedule", "cycles", "phantom"}
_TOP = {"mode", "clock_hz"}


def config_from_dict(data):
    unknown = set(data) - _SECTIONS - _TOP
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    base = RunConfig()
    kw = {}
    if "mode" in data:
        try:
            kw["mode"] = Mode(str(data["mode"]).lower())
        except ValueError as exc:
            raise ConfigError(f"mode must be 'reference' or 'hardware', got {data['mode']!r}") from exc
    if "clock_hz" in data:
        kw["clock_hz"] = float(data["clock_hz"])
        if not kw["clock_hz"] > 0:
            raise ConfigError("clock_hz must be > 0")

    geo = dict(data.get("geometry", {}))
    geo.setdefault("kind", "ring")
    if geo["kind"] == "ring":
        geo.setdefault("num_sensors", base.geometry.num_sensors)
        geo.setdefault("radius", base.geometry.radius)
    kw["geometry"] = _build(ArrayGeometry, geo, "geometry",
                            {"kind": ArrayKind, "center": tuple})
    grid = {"n": 128, "m": 128, "extent_x": 0.02, "extent_y": 0.02, **data.get("grid", {})}
    kw["grid"] = _build(RoiGrid, grid, "grid", {"center": tuple})
    kw["acoustic"] = _build(AcousticConfig, data.get("acoustic", {}), "acoustic")
    kw["waveform"] = _build(WaveformConfig, data.get("waveform", {}), "waveform",
                            {"shape": PulseShape})
    kw["swave"] = _build(SwaveParams, data.get("swave", {}), "swave", {"shift_mode": ShiftMode})
    kw["recon"] = _build(ReconConfig, data.get("recon", {}), "recon")
    kw["fixed_point"] = _build(FixedPointSpec, data.get("fixed_point", {}), "fixed_point")
    kw["schedule"] = _build(ScheduleConfig, data.get("schedule", {}), "schedule",
                            {"fold": Fold, "lane_order": tuple})
    kw["cycles"] = _build(CycleOverheads, data.get("cycles", {}), "cycles")
    kw["phantom"] = _phantom(data.get("phantom", {}))
    cfg = RunConfig(**kw)
    validate(cfg)
    return cfg


def _phantom(section):
    unknown = set(section) - {"targets", "noise"}
    if unknown:
        raise ConfigError(f"unknown key(s) in [phantom]: {', '.join(sorted(unknown))}")
    targets = [_build(Target, t, "phantom.targets", {"center": tuple})
               for t in section.get("targets", [])]
    noise = section.get("noise")
    noise = None if noise is None else _build(NoiseSpec, noise, "phantom.noise")
    return PhantomSpec(tuple(targets), noise)


def validate(cfg: RunConfig):
    try:
        cfg.exec_schedule()
    except ConfigError as exc:
        raise ConfigError(f"[schedule]: {exc}") from exc
    cfg.fixed_point.check_headroom(cfg.geometry.num_sensors)
    if cfg.acoustic.sample_depth > (1 << cfg.fixed_point.delay_bits):
        warnings.warn(f"sample depth {cfg.acoustic.sample_depth} exceeds the "
                      f"{cfg.fixed_point.delay_bits}-bit delay address range", stacklevel=2)


def load_config(path=None):
    """Parse a TOML file; ``None`` returns the defaults."""
    if path is None:
        return RunConfig()
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)
