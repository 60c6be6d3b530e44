"""ROM budget of the per-sensor tables and what symmetry folding saves.

Prints the unfolded budget for the default 128-sensor, 128 x 128 setup,
then folds a real delay table and checks that reading every sensor through
the address mapping reproduces the full table.

    python demos/storage_folding.py
"""

import numpy as np

from swaverecon import (AcousticConfig, ArrayGeometry, Fold, RoiGrid, compute_delay_table,
                        fold_tables, storage_budget)

geom = ArrayGeometry.ring(128, 0.03)
grid = RoiGrid(128, 128, 0.02, 0.02)

print(f"{'fold':8s} {'stored':>6s} {'delay Mb':>9s} {'phase Mb':>9s} {'amp Mb':>8s} {'total Mb':>9s} ratio")
for fold in Fold:
    b = storage_budget(128, 128, 128, fold=fold)
    print(f"{fold.value:8s} {b.stored_sensor_count:6d} {b.megabits(b.delay_bits):9.3f} "
          f"{b.megabits(b.phase_bits):9.3f} {b.megabits(b.amplitude_bits):8.3f} "
          f"{b.megabits(b.total_bits):9.3f} {float(b.savings_ratio):.3f}")

table = compute_delay_table(geom, grid, AcousticConfig())
for fold in (Fold.QUARTER, Fold.OCTANT):
    folded = fold_tables(table, geom, grid, fold)
    exact = np.array_equal(folded.unfold(), table.delays)
    modes = sorted({mode.name for _, mode in folded.mapping})
    print(f"{fold.value}: {len(folded.stored_sensor_ids)} stored rows, modes {modes}, exact={exact}")
