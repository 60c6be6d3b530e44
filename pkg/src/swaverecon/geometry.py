"""Transducer arrays, the imaging grid, delay tables and symmetry folding.

Coordinates are meters. Pixel ``(r, c)`` of an ``n x m`` grid sits at

    x = grid.center[0] + (c - (m - 1) / 2) * pitch_x
    y = grid.center[1] + ((n - 1) / 2 - r) * pitch_y

so row 0 is the top (largest y) row and the flat pixel index is ``r * m + c``.

Folding stores delay rows for a subset of sensors only. Every other sensor is
served by a stored row read through a pixel-address transform (an
:class:`AmuMode`). The lookup is *exact*: sensor positions are built so that
mirror images are bit-identical in floating point, and distances are always
evaluated relative to the shared array/grid center.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, IncompatibleSymmetry


def round_half_away(x):
    """Round to the nearest integer, ties away from zero. Returns int64."""
    x = np.asarray(x, dtype=np.float64)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


class ArrayKind(enum.Enum):
    RING = "ring"
    LINEAR = "linear"


@dataclass(frozen=True)
class ArrayGeometry:
    """A ring or linear transducer array.

    For ``RING`` arrays ``radius`` is required and sensor ``i`` sits at angle
    ``angular_offset + 2*pi*i/N``. For ``LINEAR`` arrays ``pitch`` is required;
    the elements lie on the horizontal line ``y = center[1]`` symmetric about
    ``x = center[0]``.
    """

    kind: ArrayKind
    num_sensors: int
    radius: float | None = None
    pitch: float | None = None
    center: tuple[float, float] = (0.0, 0.0)
    angular_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ArrayKind(self.kind))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.num_sensors < 1:
            raise ValueError("num_sensors must be >= 1")
        if self.kind is ArrayKind.RING:
            if self.radius is None or not self.radius > 0:
                raise ValueError("ring arrays need radius > 0")
        else:
            if self.pitch is None or not self.pitch > 0:
                raise ValueError("linear arrays need pitch > 0")

    @classmethod
    def ring(cls, num_sensors, radius, center=(0.0, 0.0), angular_offset=0.0):
        return cls(ArrayKind.RING, num_sensors, radius=radius, center=center,
                   angular_offset=angular_offset)

    @classmethod
    def linear(cls, num_sensors, pitch, center=(0.0, 0.0)):
        return cls(ArrayKind.LINEAR, num_sensors, pitch=pitch, center=center)


@dataclass(frozen=True)
class RoiGrid:
    n: int
    m: int
    extent_x: float
    extent_y: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.n < 1 or self.m < 1:
            raise ValueError("grid dimensions must be >= 1")
        if not (self.extent_x > 0 and self.extent_y > 0):
            raise ValueError("grid extents must be > 0")

    @property
    def shape(self):
        return (self.n, self.m)

    @property
    def size(self):
        return self.n * self.m

    @property
    def pitch_x(self):
        return self.extent_x / self.m

    @property
    def pitch_y(self):
        return self.extent_y / self.n

    def half_steps(self):
        """Doubled integer offsets ``(U, V)`` of every pixel from the center.

        ``U = 2c - (m - 1)`` and ``V = (n - 1) - 2r``; both have shape (n, m).
        """
        r, c = np.meshgrid(np.arange(self.n), np.arange(self.m), indexing="ij")
        return 2 * c - (self.m - 1), (self.n - 1) - 2 * r

    def relative_centers(self):
        """Pixel centers relative to ``self.center``, shape (n*m, 2)."""
        u, v = self.half_steps()
        x = u.ravel() * (self.pitch_x / 2)
        y = v.ravel() * (self.pitch_y / 2)
        return np.stack([x, y], axis=1)

    def pixel_centers(self):
        """Absolute pixel centers, shape (n*m, 2), flat index ``r*m + c``."""
        return self.relative_centers() + np.asarray(self.center)

    def nearest_pixel(self, x, y):
        c = int(round((x - self.center[0]) / self.pitch_x + (self.m - 1) / 2))
        r = int(round((self.n - 1) / 2 - (y - self.center[1]) / self.pitch_y))
        return r, c

    def contains(self, x, y):
        return (abs(x - self.center[0]) <= self.extent_x / 2
                and abs(y - self.center[1]) <= self.extent_y / 2)


@dataclass(frozen=True)
class AcousticConfig:
    sound_speed: float = 1500.0
    sample_rate: float = 20e6
    sample_depth: int = 1024

    def __post_init__(self):
        if not self.sound_speed > 0:
            raise ValueError("sound_speed must be > 0")
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be > 0")
        if self.sample_depth < 1:
            raise ValueError("sample_depth must be >= 1")


def _ring_units(num_sensors, angular_offset):
    """Unit vectors of ring sensors.

    With zero offset and ``N % 4 == 0`` only the first octant is evaluated
    with trigonometry; the rest is obtained by exact sign flips and swaps, so
    mirror-image sensors have bit-identical mirrored coordinates.
    """
    n = num_sensors
    if angular_offset != 0.0 or n % 2:
        theta = angular_offset + 2 * np.pi * np.arange(n) / n
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)

    out = np.empty((n, 2))
    if n % 4:
        half = n // 2
        for i in range(half + 1):
            t = 2 * math.pi * i / n
            out[i] = (math.cos(t), math.sin(t))
        out[half] = (-1.0, 0.0)
        for i in range(half + 1, n):
            out[i] = (out[n - i, 0], -out[n - i, 1])
        return out

    q = n // 4
    base = np.empty((q, 2))
    diag = math.sqrt(0.5)
    for r in range(q):
        if 2 * r < q:
            t = 2 * math.pi * r / n
            base[r] = (math.cos(t), math.sin(t))
        elif 2 * r == q:
            base[r] = (diag, diag)
    for r in range(q):
        if 2 * r > q:
            base[r] = (base[q - r, 1], base[q - r, 0])
    base[0] = (1.0, 0.0)
    for i in range(n):
        turns, r = divmod(i, q)
        x, y = base[r]
        for _ in range(turns):
            x, y = -y, x
        out[i] = (x, y)
    return out


def sensor_positions(geom: ArrayGeometry):
    """Absolute sensor positions, shape (N, 2)."""
    return _relative_sensor_positions(geom) + np.asarray(geom.center)


def _relative_sensor_positions(geom):
    if geom.kind is ArrayKind.RING:
        return geom.radius * _ring_units(geom.num_sensors, geom.angular_offset)
    n = geom.num_sensors
    x = (2 * np.arange(n) - (n - 1)) * (geom.pitch / 2)
    return np.stack([x, np.zeros(n)], axis=1)


def sensor_offsets(geom: ArrayGeometry, grid: RoiGrid):
    """Sensor positions relative to the grid center, shape (N, 2)."""
    shift = (geom.center[0] - grid.center[0], geom.center[1] - grid.center[1])
    return _relative_sensor_positions(geom) + np.asarray(shift)


def distance_matrix(geom: ArrayGeometry, grid: RoiGrid):
    """Euclidean sensor-to-pixel distances, shape (N, n*m)."""
    s = sensor_offsets(geom, grid)
    p = grid.relative_centers()
    dx = p[None, :, 0] - s[:, None, 0]
    dy = p[None, :, 1] - s[:, None, 1]
    return np.sqrt(dx * dx + dy * dy)


def reference_distances(geom: ArrayGeometry, grid: RoiGrid):
    """Distance from the grid center to every sensor, shape (N,)."""
    s = sensor_offsets(geom, grid)
    return np.sqrt(s[:, 0] * s[:, 0] + s[:, 1] * s[:, 1])


@dataclass(frozen=True)
class DelayTable:
    delays: np.ndarray
    bit_width: int = 10
    overflow_count: int = 0
    grid_shape: tuple[int, int] | None = None

    @property
    def num_sensors(self):
        return self.delays.shape[0]


def samples_from_distance(d, acoustic: AcousticConfig):
    """Real-valued sample index ``d / c * f_s``."""
    return np.asarray(d, dtype=np.float64) / acoustic.sound_speed * acoustic.sample_rate


def quantize_unsigned(values, bit_width):
    """Round half away and clamp to ``[0, 2**bit_width - 1]``.

    Returns ``(codes, overflow_count)``.
    """
    raw = round_half_away(values)
    top = (1 << bit_width) - 1
    overflow = int(np.count_nonzero((raw < 0) | (raw > top)))
    return np.clip(raw, 0, top), overflow


def compute_delay_table(geom, grid, acoustic, bit_width=10):
    if not 1 <= bit_width <= 32:
        raise ValueError("bit_width must be in [1, 32]")
    exact = samples_from_distance(distance_matrix(geom, grid), acoustic)
    codes, overflow = quantize_unsigned(exact, bit_width)
    return DelayTable(codes, bit_width, overflow, grid.shape)


class Fold(enum.Enum):
    NONE = "none"
    HALF = "half"
    QUARTER = "quarter"
    OCTANT = "octant"

    @property
    def divisor(self):
        return {"none": 1, "half": 2, "quarter": 4, "octant": 8}[self.value]

    def stored_count(self, num_sensors):
        if self is Fold.NONE:
            return num_sensors
        if num_sensors % self.divisor:
            raise IncompatibleSymmetry(
                f"{self.value} fold needs N divisible by {self.divisor}, got {num_sensors}")
        return num_sensors // self.divisor + 1


class AmuMode(enum.Enum):
    """Pixel-address transforms, as signed permutations of (x, y)."""

    IDENTITY = ((1, 0), (0, 1))
    COL_MIRROR = ((-1, 0), (0, 1))
    POINT_REFLECT = ((-1, 0), (0, -1))
    ROW_MIRROR = ((1, 0), (0, -1))
    DIAG_MIRROR = ((0, 1), (1, 0))
    ANTI_DIAG_MIRROR = ((0, -1), (-1, 0))
    ROT_90 = ((0, -1), (1, 0))
    ROT_270 = ((0, 1), (-1, 0))

    @property
    def matrix(self):
        return np.array(self.value, dtype=np.int64)

    def compose(self, other: "AmuMode") -> "AmuMode":
        """The mode equal to applying ``other`` first, then ``self``."""
        prod = self.matrix @ other.matrix
        return AmuMode(tuple(tuple(int(v) for v in row) for row in prod))

    def map_pixel(self, r, c, n, m):
        """Map pixel indices ``(r, c)`` (scalars or arrays) through this mode."""
        u = 2 * np.asarray(c) - (m - 1)
        v = (n - 1) - 2 * np.asarray(r)
        (a, b), (d, e) = self.value
        u2 = a * u + b * v
        v2 = d * u + e * v
        c2 = (u2 + (m - 1)) // 2
        r2 = ((n - 1) - v2) // 2
        return r2, c2

    def pixel_permutation(self, n, m):
        """Flat source index for every flat pixel index, shape (n*m,)."""
        r, c = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
        r2, c2 = self.map_pixel(r.ravel(), c.ravel(), n, m)
        return (r2 * m + c2).astype(np.int64)


@dataclass(frozen=True)
class FoldedTableSet:
    """Stored table rows plus the sensor -> (stored row, AmuMode) mapping."""

    stored_sensor_ids: tuple[int, ...]
    tables: np.ndarray
    fold: Fold
    mapping: tuple[tuple[int, AmuMode], ...]
    grid_shape: tuple[int, int]
    bit_width: int = 10

    @property
    def num_sensors(self):
        return len(self.mapping)

    @cached_property
    def _permutations(self):
        n, m = self.grid_shape
        modes = {mode for _, mode in self.mapping}
        return {mode: mode.pixel_permutation(n, m) for mode in modes}

    def row(self, sensor):
        """Full-length table row for ``sensor`` read through the AMU."""
        stored, mode = self.mapping[sensor]
        return self.tables[stored][self._permutations[mode]]

    def unfold(self):
        """Reconstruct the complete (N, n*m) table."""
        return np.stack([self.row(i) for i in range(self.num_sensors)])


def fold_mapping(geom: ArrayGeometry, grid: RoiGrid, fold: Fold):
    """Sensor -> (stored index, AmuMode) map; raises IncompatibleSymmetry."""
    n_sensors = geom.num_sensors
    if fold is Fold.NONE:
        return tuple((i, AmuMode.IDENTITY) for i in range(n_sensors))

    fold.stored_count(n_sensors)
    if geom.center != grid.center and not (
            geom.kind is ArrayKind.LINEAR and fold is Fold.HALF
            and geom.center[0] == grid.center[0]):
        raise IncompatibleSymmetry("array and grid centers must coincide")

    if geom.kind is ArrayKind.LINEAR:
        if fold is not Fold.HALF:
            raise IncompatibleSymmetry("linear arrays only support the half fold")
        half = n_sensors // 2
        return tuple((i, AmuMode.IDENTITY) if i <= half
                     else (n_sensors - 1 - i, AmuMode.COL_MIRROR)
                     for i in range(n_sensors))

    if geom.angular_offset != 0.0:
        raise IncompatibleSymmetry("ring folds require angular_offset == 0")
    if fold is Fold.HALF:
        half = n_sensors // 2
        return tuple((i, AmuMode.IDENTITY) if i <= half
                     else (n_sensors - i, AmuMode.ROW_MIRROR)
                     for i in range(n_sensors))

    if grid.n != grid.m:
        raise IncompatibleSymmetry(f"{fold.value} fold needs a square grid")
    q = n_sensors // 4
    quarter = []
    for i in range(n_sensors):
        if i <= q:
            quarter.append((i, AmuMode.IDENTITY))
        elif i <= 2 * q:
            quarter.append((2 * q - i, AmuMode.COL_MIRROR))
        elif i <= 3 * q:
            quarter.append((i - 2 * q, AmuMode.POINT_REFLECT))
        else:
            quarter.append((n_sensors - i, AmuMode.ROW_MIRROR))
    if fold is Fold.QUARTER:
        return tuple(quarter)

    if grid.extent_x != grid.extent_y:
        raise IncompatibleSymmetry("octant fold needs equal x/y pixel pitch")
    octant = []
    for j, mode in quarter:
        if 2 * j > q:
            # the diagonal mirror is applied to the pixel after the quarter mode
            octant.append((q - j, AmuMode.DIAG_MIRROR.compose(mode)))
        else:
            octant.append((j, mode))
    return tuple(octant)


def fold_tables(table, geom: ArrayGeometry, grid: RoiGrid, fold: Fold, bit_width=None):
    """Keep only the stored rows of ``table`` (a DelayTable or (N, n*m) array)."""
    fold = Fold(fold)
    if isinstance(table, DelayTable):
        values, width = table.delays, table.bit_width
    else:
        values, width = np.asarray(table), bit_width if bit_width is not None else 0
    if values.shape != (geom.num_sensors, grid.size):
        raise DimensionMismatch(
            f"table shape {values.shape} != ({geom.num_sensors}, {grid.size})")
    mapping = fold_mapping(geom, grid, fold)
    stored = tuple(range(fold.stored_count(geom.num_sensors)))
    return FoldedTableSet(stored, values[list(stored)].copy(), fold, mapping,
                          grid.shape, width)


def amu_lookup(folded: FoldedTableSet, sensor, pixel):
    n, m = folded.grid_shape
    r, c = pixel
    if not 0 <= sensor < folded.num_sensors:
        raise IndexError(f"sensor {sensor} out of range")
    if not (0 <= r < n and 0 <= c < m):
        raise IndexError(f"pixel {pixel} outside {n}x{m} grid")
    stored, mode = folded.mapping[sensor]
    r2, c2 = mode.map_pixel(r, c, n, m)
    return int(folded.tables[stored, int(r2) * m + int(c2)])


@dataclass(frozen=True)
class StorageBudget:
    num_sensors: int
    stored_sensor_count: int
    pixels: int
    delay_bits: int
    phase_bits: int
    amplitude_bits: int
    fold: Fold = Fold.NONE
    total_bits: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_bits",
                           self.delay_bits + self.phase_bits + self.amplitude_bits)

    @property
    def savings_ratio(self):
        return Fraction(self.num_sensors, self.stored_sensor_count)

    @staticmethod
    def megabits(bits):
        """Decimal megabits (10**6 bits), the unit the storage figures use."""
        return bits / 1e6

    @staticmethod
    def mebibits(bits):
        return bits / 2**20

    def rows(self):
        return [("delay", self.delay_bits), ("phase", self.phase_bits),
                ("amplitude", self.amplitude_bits), ("total", self.total_bits)]


def storage_budget(num_sensors, n, m, delay_bits=10, phase_bits=10, amp_bits=8,
                   fold=Fold.NONE):
    if min(delay_bits, phase_bits, amp_bits) < 1:
        raise ValueError("entry widths must be >= 1")
    fold = Fold(fold)
    stored = fold.stored_count(num_sensors)
    entries = stored * n * m
    return StorageBudget(num_sensors, stored, n * m, entries * delay_bits,
                         entries * phase_bits, entries * amp_bits, fold)
