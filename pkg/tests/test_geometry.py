import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swaverecon.errors import IncompatibleSymmetry
from swaverecon.geometry import (AcousticConfig, AmuMode, ArrayGeometry, Fold, RoiGrid,
                                 amu_lookup, compute_delay_table, distance_matrix, fold_mapping,
                                 fold_tables, round_half_away, sensor_positions, storage_budget)


def test_ring_of_four_positions():
    pos = sensor_positions(ArrayGeometry.ring(4, 0.03))
    np.testing.assert_allclose(pos, [[0.03, 0], [0, 0.03], [-0.03, 0], [0, -0.03]], atol=1e-18)


def test_ring_128_sensor_32_on_y_axis():
    pos = sensor_positions(ArrayGeometry.ring(128, 0.03))
    assert tuple(pos[32]) == (0.0, 0.03)


def test_ring_positions_follow_angles():
    geom = ArrayGeometry.ring(128, 0.03, center=(0.001, -0.002))
    pos = sensor_positions(geom)
    theta = 2 * np.pi * np.arange(128) / 128
    np.testing.assert_allclose(pos[:, 0], 0.001 + 0.03 * np.cos(theta), atol=1e-15)
    np.testing.assert_allclose(pos[:, 1], -0.002 + 0.03 * np.sin(theta), atol=1e-15)


def test_linear_positions_symmetric():
    pos = sensor_positions(ArrayGeometry.linear(3, 0.01))
    np.testing.assert_allclose(pos[:, 0], [-0.01, 0.0, 0.01])


def test_grid_mirror_symmetry():
    grid = RoiGrid(5, 7, 0.01, 0.014)
    c = grid.relative_centers().reshape(5, 7, 2)
    assert np.array_equal(c, -c[::-1, ::-1])


def test_round_half_away():
    assert list(round_half_away([0.5, 1.5, -0.5, -1.5, 2.4])) == [1, 2, -1, -2, 2]


def test_delay_800_samples_at_40mhz():
    geom = ArrayGeometry.ring(4, 0.03)
    grid = RoiGrid(1, 1, 0.001, 0.001)
    table = compute_delay_table(geom, grid, AcousticConfig(1500, 40e6, 1024))
    assert np.all(table.delays == 800)
    assert table.overflow_count == 0


def test_delay_overflow_clamps_and_counts():
    geom = ArrayGeometry.ring(4, 0.03)
    grid = RoiGrid(1, 1, 0.001, 0.001)
    table = compute_delay_table(geom, grid, AcousticConfig(1500, 80e6, 4096), bit_width=10)
    assert np.all(table.delays == 1023)
    assert table.overflow_count == 4


def test_pixel_on_sensor_has_zero_delay():
    geom = ArrayGeometry.linear(1, 0.001, center=(0.0, 0.0))
    grid = RoiGrid(1, 1, 0.001, 0.001)
    assert compute_delay_table(geom, grid, AcousticConfig()).delays[0, 0] == 0


def test_delays_monotone_in_distance():
    geom = ArrayGeometry.ring(16, 0.03)
    grid = RoiGrid(16, 16, 0.02, 0.02)
    ac = AcousticConfig()
    d = distance_matrix(geom, grid).ravel()
    t = compute_delay_table(geom, grid, ac).delays.ravel()
    order = np.argsort(d, kind="stable")
    assert np.all(np.diff(t[order]) >= 0)


def test_point_reflection_witness():
    geom = ArrayGeometry.ring(32, 0.03)
    grid = RoiGrid(12, 12, 0.02, 0.02)
    t = compute_delay_table(geom, grid, AcousticConfig()).delays.reshape(32, 12, 12)
    for i in range(32):
        assert np.array_equal(t[i], t[(i + 16) % 32][::-1, ::-1])


@pytest.mark.parametrize("mode", list(AmuMode))
def test_amu_modes_are_permutations(mode):
    perm = mode.pixel_permutation(6, 6)
    assert sorted(perm) == list(range(36))


@pytest.mark.parametrize("mode", [AmuMode.IDENTITY, AmuMode.COL_MIRROR,
                                  AmuMode.POINT_REFLECT, AmuMode.ROW_MIRROR])
def test_quarter_modes_are_involutions(mode):
    perm = mode.pixel_permutation(5, 7)
    assert np.array_equal(perm[perm], np.arange(35))


def test_amu_mode_pixel_mapping():
    n, m = 4, 6
    assert AmuMode.COL_MIRROR.map_pixel(1, 2, n, m) == (1, 3)
    assert AmuMode.POINT_REFLECT.map_pixel(1, 2, n, m) == (2, 3)
    assert AmuMode.ROW_MIRROR.map_pixel(1, 2, n, m) == (2, 2)


def test_quarter_mapping_rule():
    geom = ArrayGeometry.ring(128, 0.03)
    grid = RoiGrid(128, 128, 0.02, 0.02)
    mapping = fold_mapping(geom, grid, Fold.QUARTER)
    assert mapping[40] == (24, AmuMode.COL_MIRROR)
    for i in range(33):
        assert mapping[i] == (i, AmuMode.IDENTITY)
    for i in range(65, 97):
        assert mapping[i] == (i - 64, AmuMode.POINT_REFLECT)
    for i in range(97, 128):
        assert mapping[i] == (128 - i, AmuMode.ROW_MIRROR)


@pytest.mark.parametrize("fold,stored", [(Fold.HALF, 65), (Fold.QUARTER, 33), (Fold.OCTANT, 17)])
def test_stored_counts(fold, stored):
    geom = ArrayGeometry.ring(128, 0.03)
    grid = RoiGrid(16, 16, 0.02, 0.02)
    table = compute_delay_table(geom, grid, AcousticConfig())
    folded = fold_tables(table, geom, grid, fold)
    assert len(folded.stored_sensor_ids) == stored
    assert np.array_equal(folded.unfold(), table.delays)


@pytest.mark.parametrize("fold", list(Fold))
@pytest.mark.parametrize("num_sensors,n", [(24, 6), (8, 5), (64, 33)])
def test_fold_exact_small(fold, num_sensors, n):
    geom = ArrayGeometry.ring(num_sensors, 0.03)
    grid = RoiGrid(n, n, 0.02, 0.02)
    table = compute_delay_table(geom, grid, AcousticConfig())
    folded = fold_tables(table, geom, grid, fold)
    assert np.array_equal(folded.unfold(), table.delays)


def test_amu_lookup_n24_exhaustive():
    geom = ArrayGeometry.ring(24, 0.03)
    grid = RoiGrid(6, 6, 0.02, 0.02)
    table = compute_delay_table(geom, grid, AcousticConfig())
    folded = fold_tables(table, geom, grid, Fold.QUARTER)
    for i in range(24):
        for r in range(6):
            for c in range(6):
                assert amu_lookup(folded, i, (r, c)) == table.delays[i, r * 6 + c]


def test_amu_sensor_64_is_point_reflection_of_sensor_0():
    geom = ArrayGeometry.ring(128, 0.03)
    grid = RoiGrid(32, 32, 0.02, 0.02)
    table = compute_delay_table(geom, grid, AcousticConfig())
    folded = fold_tables(table, geom, grid, Fold.QUARTER)
    for r, c in [(0, 0), (3, 17), (31, 5), (16, 16)]:
        assert amu_lookup(folded, 64, (r, c)) == folded.tables[0, (31 - r) * 32 + (31 - c)]


def test_amu_lookup_rejects_out_of_range():
    geom = ArrayGeometry.ring(8, 0.03)
    grid = RoiGrid(4, 4, 0.02, 0.02)
    folded = fold_tables(compute_delay_table(geom, grid, AcousticConfig()), geom, grid, Fold.QUARTER)
    with pytest.raises(IndexError):
        amu_lookup(folded, 8, (0, 0))
    with pytest.raises(IndexError):
        amu_lookup(folded, 0, (4, 0))


def test_linear_half_fold():
    geom = ArrayGeometry.linear(10, 0.002, center=(0.0, -0.02))
    grid = RoiGrid(6, 7, 0.02, 0.02)
    table = compute_delay_table(geom, grid, AcousticConfig())
    folded = fold_tables(table, geom, grid, Fold.HALF)
    assert np.array_equal(folded.unfold(), table.delays)


def test_incompatible_folds():
    ring = ArrayGeometry.ring(128, 0.03)
    table = compute_delay_table(ring, RoiGrid(8, 6, 0.02, 0.02), AcousticConfig())
    with pytest.raises(IncompatibleSymmetry):
        fold_tables(table, ring, RoiGrid(8, 6, 0.02, 0.02), Fold.QUARTER)
    with pytest.raises(IncompatibleSymmetry):
        fold_mapping(ArrayGeometry.ring(10, 0.03), RoiGrid(4, 4, 0.02, 0.02), Fold.QUARTER)
    with pytest.raises(IncompatibleSymmetry):
        fold_mapping(ring, RoiGrid(4, 4, 0.02, 0.02, center=(0.001, 0.0)), Fold.HALF)
    with pytest.raises(IncompatibleSymmetry):
        fold_mapping(ArrayGeometry.ring(128, 0.03, angular_offset=0.1),
                     RoiGrid(4, 4, 0.02, 0.02), Fold.QUARTER)
    with pytest.raises(IncompatibleSymmetry):
        fold_mapping(ArrayGeometry.linear(8, 0.001), RoiGrid(4, 4, 0.02, 0.02), Fold.QUARTER)


def test_storage_budget_full_size():
    b = storage_budget(128, 128, 128)
    assert b.delay_bits == 20_971_520
    assert b.phase_bits == 20_971_520
    assert b.amplitude_bits == 16_777_216
    assert b.total_bits == 58_720_256
    assert round(b.megabits(b.delay_bits)) == 21
    assert round(b.megabits(b.amplitude_bits)) == 17
    assert round(b.megabits(b.total_bits)) == 59
    assert b.mebibits(b.delay_bits) == 20.0


def test_storage_budget_fold_ratios():
    none = storage_budget(128, 128, 128)
    quarter = storage_budget(128, 128, 128, fold=Fold.QUARTER)
    octant = storage_budget(128, 128, 128, fold=Fold.OCTANT)
    assert quarter.savings_ratio == Fraction(128, 33) and quarter.savings_ratio > 3
    assert octant.savings_ratio == Fraction(128, 17) and octant.savings_ratio > 7
    assert Fraction(none.total_bits, quarter.total_bits) == Fraction(128, 33)


@settings(max_examples=40, deadline=None)
@given(k=st.integers(1, 8), n=st.integers(1, 9), fold=st.sampled_from(list(Fold)))
def test_fold_exactness_property(k, n, fold):
    num_sensors = 8 * k
    geom = ArrayGeometry.ring(num_sensors, 0.03)
    grid = RoiGrid(n, n, 0.02, 0.02)
    table = compute_delay_table(geom, grid, AcousticConfig(1500, 20e6, 1024))
    folded = fold_tables(table, geom, grid, fold)
    assert np.array_equal(folded.unfold(), table.delays)
    assert len(folded.stored_sensor_ids) == fold.stored_count(num_sensors)
