"""Acceptance criteria 1-9, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the "acceptance criteria" section of the terminal summary.
"""

import json
import time

import numpy as np
import pytest
from scipy.ndimage import maximum_filter

from swaverecon.backward import das_cf_reconstruct, das_reconstruct, dmas_reconstruct, normalize_image
from swaverecon.cli import main as cli_main
from swaverecon.geometry import (AcousticConfig, ArrayGeometry, Fold, RoiGrid, amu_lookup,
                                 compute_delay_table, fold_tables, storage_budget)
from swaverecon.hwmodel import ExecSchedule, HardwareEmulator, cycle_model, hw_das, quantize_tables
from swaverecon.iterate import ModelBasedReconstructor, ReconConfig
from swaverecon.metrics import ssim
from swaverecon.phantom import NoiseSpec, PhantomSpec, Target, apply_noise, gen_phantom, oracle_forward
from swaverecon.swave import swave_forward
from swaverecon.waveform import PulseParams, analytic_standard_waveform

GEOM = ArrayGeometry.ring(128, 0.03)
GRID = RoiGrid(128, 128, 0.02, 0.02)
ACOUSTIC = AcousticConfig(1500.0, 20e6, 1024)


@pytest.fixture(scope="module")
def full_size():
    """Standard waveform and backward gain for the 128-sensor, 128 x 128 setup."""
    s = analytic_standard_waveform(ACOUSTIC, GEOM, GRID)
    beta = ModelBasedReconstructor(GEOM, GRID, ACOUSTIC, s).backward_gain
    return s, beta


def _pixel_point(r, c, intensity=1.0):
    x, y = GRID.pixel_centers()[r * GRID.m + c]
    return Target.point(x, y, intensity)


PHANTOMS = {
    "points": PhantomSpec([_pixel_point(30, 40), _pixel_point(64, 64, 0.7), _pixel_point(95, 90, 0.9)]),
    "disc": PhantomSpec([Target.disc(0.0, 0.0, 0.004)]),
    "mixed": PhantomSpec([_pixel_point(32, 42), Target.disc(0.003, -0.004, 0.0017, 0.5)]),
    "points+noise": PhantomSpec([_pixel_point(20, 100), _pixel_point(100, 30, 0.8)], NoiseSpec(0.01)),
    "discs+noise": PhantomSpec([Target.disc(-0.004, 0.004, 0.002), Target.disc(0.004, -0.003, 0.0025, 0.6)],
                               NoiseSpec(0.01)),
    "mixed+noise": PhantomSpec([_pixel_point(64, 30), Target.disc(0.002, 0.003, 0.0015, 0.7)], NoiseSpec(0.01)),
}


def _data(spec, s, seed=0):
    S = swave_forward(gen_phantom(spec, GRID), s, GEOM, GRID, ACOUSTIC)
    return apply_noise(S, spec.noise, np.random.default_rng(seed))


def test_criterion_1_storage(acceptance, tmp_path, capsys):
    t0 = time.perf_counter()
    none = storage_budget(128, 128, 128)
    quarter = storage_budget(128, 128, 128, fold=Fold.QUARTER)
    octant = storage_budget(128, 128, 128, fold=Fold.OCTANT)
    assert cli_main(["budget", "--out", str(tmp_path), "--quiet"]) == 0
    rows = [json.loads(x) for x in (tmp_path / "budget.jsonl").read_text().splitlines()]
    elapsed = time.perf_counter() - t0
    cli_none = {r["table"]: r["bits"] for r in rows if r["fold"] == "none"}
    ok = (none.delay_bits == 128 * 128 * 128 * 10 == 20_971_520
          and none.phase_bits == 20_971_520
          and none.amplitude_bits == 128 * 128 * 128 * 8
          and round(none.megabits(none.delay_bits)) == 21
          and round(none.megabits(none.amplitude_bits)) == 17
          and 58 <= none.megabits(none.total_bits) <= 60
          and quarter.savings_ratio > 3 and octant.savings_ratio > 7
          and cli_none == {"delay": none.delay_bits, "phase": none.phase_bits,
                           "amplitude": none.amplitude_bits, "total": none.total_bits}
          and elapsed < 1.0)
    detail = (f"delay {none.delay_bits} b, phase {none.phase_bits} b, amplitude {none.amplitude_bits} b, "
              f"total {none.total_bits} b ({none.megabits(none.total_bits):.2f} Mb); "
              f"quarter {quarter.savings_ratio} = {float(quarter.savings_ratio):.3f}, "
              f"octant {octant.savings_ratio} = {float(octant.savings_ratio):.3f}; {elapsed:.3f} s")
    assert acceptance(1, "storage arithmetic", ok, detail)


def test_criterion_2_amu_exactness(acceptance):
    t0 = time.perf_counter()
    checked, mismatches = 0, 0
    for n_sensors, n in ((128, 128), (24, 6)):
        geom = ArrayGeometry.ring(n_sensors, 0.03)
        grid = RoiGrid(n, n, 0.02, 0.02)
        table = compute_delay_table(geom, grid, ACOUSTIC)
        for fold in (Fold.HALF, Fold.QUARTER, Fold.OCTANT):
            folded = fold_tables(table, geom, grid, fold)
            for i in range(n_sensors):
                mismatches += int(np.count_nonzero(folded.row(i) != table.delays[i]))
            checked += table.delays.size
        folded = fold_tables(table, geom, grid, Fold.QUARTER)
        if n_sensors == 24:
            for i in range(24):
                for r in range(n):
                    for c in range(n):
                        mismatches += amu_lookup(folded, i, (r, c)) != table.delays[i, r * n + c]
                        checked += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 30
    assert acceptance(2, "AMU exactness", ok,
                      f"{checked} (sensor, pixel) lookups over half/quarter/octant folds, "
                      f"{mismatches} mismatches; {elapsed:.1f} s")


def test_criterion_3_oracle(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst, cases = 0.0, 0
    for _ in range(120):
        n_sensors = int(rng.choice([8, 16, 24, 32]))
        n = int(rng.integers(4, 24))
        depth = int(rng.choice([256, 512]))
        geom = ArrayGeometry.ring(n_sensors, float(rng.uniform(0.02, 0.04)))
        grid = RoiGrid(n, n, 0.02, 0.02)
        ac = AcousticConfig(1500.0, float(rng.choice([5e6, 10e6])), depth)
        s = analytic_standard_waveform(ac, geom, grid, PulseParams(float(rng.uniform(2, 6))))
        centers = grid.pixel_centers()
        picks = rng.choice(len(centers), size=int(rng.integers(1, 5)), replace=False)
        spec = PhantomSpec([Target.point(*centers[j], float(rng.uniform(0.1, 3))) for j in picks])
        a = oracle_forward(spec, geom, ac, s)
        b = swave_forward(gen_phantom(spec, grid), s, geom, grid, ac)
        worst = max(worst, float(np.abs(a - b).max() / np.abs(a).max()))
        cases += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and cases >= 100 and elapsed < 60
    assert acceptance(3, "forward-model oracle equivalence", ok,
                      f"{cases} cases, worst relative error {worst:.2e}; {elapsed:.1f} s")


def test_criterion_4_hardware_fidelity(acceptance, full_size):
    s, beta = full_size
    t0 = time.perf_counter()
    emu = HardwareEmulator(GEOM, GRID, ACOUSTIC, s, cfg=ReconConfig(backward_gain=beta))
    ref = ModelBasedReconstructor(GEOM, GRID, ACOUSTIC, s,
                                  cfg=ReconConfig(backward_gain=beta, normalize=True))
    scores = {}
    for name, spec in PHANTOMS.items():
        S = _data(spec, s)
        hw = emu.run(S)
        img, _ = ref.run(S)
        scores[name] = ssim(normalize_image(hw.image), normalize_image(img))
    elapsed = time.perf_counter() - t0
    ok = len(scores) >= 5 and min(scores.values()) >= 0.95 and elapsed < 300
    listing = ", ".join(f"{k} {v:.4f}" for k, v in scores.items())
    assert acceptance(4, "hardware/reference fidelity", ok,
                      f"SSIM {listing}; mean {np.mean(list(scores.values())):.4f}; {elapsed:.1f} s")


def test_criterion_5_quantization_bound(acceptance):
    t0 = time.perf_counter()
    tables = quantize_tables(GEOM, GRID, ACOUSTIC)
    delays = tables.delay.unfold()
    schedule = ExecSchedule()
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(1000):
        S = rng.integers(-2047, 2048, size=(128, 1024))
        res = hw_das(S, tables, schedule)
        mag = np.abs(das_reconstruct(S.astype(np.float64), delays, GRID.shape))
        exact = mag * 256.0 / mag.max()
        worst = max(worst, float(np.abs(res.image - exact).max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1.0 and elapsed < 120
    assert acceptance(5, "hw_das quantization bound", ok,
                      f"1000 trials, worst |hw - exact| = {worst:.4f} codes; {elapsed:.1f} s")


def _peaks(image, count):
    local = (image == maximum_filter(image, size=5)) & (image > 0)
    idx = np.flatnonzero(local)
    top = idx[np.argsort(image.ravel()[idx])[::-1][:count]]
    return [divmod(int(j), image.shape[1]) for j in top]


def test_criterion_6_iterative_behaviour(acceptance, full_size):
    s, beta = full_size
    t0 = time.perf_counter()
    results = []
    for name in ("points", "mixed", "disc"):
        spec = PHANTOMS[name]
        S = _data(spec, s)
        cfg = ReconConfig(learning_rate=0.1, max_iterations=20, backward_gain=beta)
        image, trace = ModelBasedReconstructor(GEOM, GRID, ACOUSTIC, s, cfg=cfg).run(S)
        losses = trace.losses
        monotone = bool(np.all(np.diff(losses[:6]) <= 0))
        ratio = losses[-1] / losses[0]
        truth = [GRID.nearest_pixel(*t.center) for t in spec.targets if t.shape.value == "point"]
        if name == "points":
            found = _peaks(image, len(truth))
        else:
            found = []
            for r, c in truth:
                win = image[r - 3:r + 4, c - 3:c + 4]
                dr, dc = np.unravel_index(win.argmax(), win.shape)
                found.append((r - 3 + dr, c - 3 + dc))
        offsets = [min(max(abs(r - fr), abs(c - fc)) for fr, fc in found) for r, c in truth]
        results.append((name, monotone, ratio, max(offsets, default=0), len(losses) - 1))
    elapsed = time.perf_counter() - t0
    ok = all(m and q < 0.5 and off <= 1 for _, m, q, off, _ in results) and elapsed < 120
    listing = "; ".join(f"{n}: monotone={m}, final/initial={q:.3f}, max offset={o}px, iterations={k}"
                        for n, m, q, o, k in results)
    assert acceptance(6, "iterative behaviour", ok, f"{listing}; {elapsed:.1f} s")


CLI_CONFIG = """
mode = "hardware"
[recon]
backward_gain = {beta!r}
[schedule]
lane_order = {order}
[[phantom.targets]]
shape = "point"
center = [0.004, -0.003]
[[phantom.targets]]
shape = "disc"
center = [-0.004, 0.002]
radius = 0.002
intensity = 0.6
[phantom.noise]
sigma = 0.01
"""


def test_criterion_7_determinism(acceptance, full_size, tmp_path):
    _, beta = full_size
    t0 = time.perf_counter()
    identity = list(range(32))
    shuffled = list(np.random.default_rng(7).permutation(32))
    files = ("image.csv", "image.pgm", "trace.csv", "cycles.jsonl")
    outputs = []
    for run, order in (("a", identity), ("b", identity), ("c", shuffled)):
        cfg = tmp_path / f"{run}.toml"
        cfg.write_text(CLI_CONFIG.format(beta=beta, order=[int(x) for x in order]))
        if run == "a":
            assert cli_main(["gen-phantom", "--config", str(cfg), "--out", str(tmp_path / "data"),
                             "--seed", "11", "--quiet"]) == 0
        assert cli_main(["reconstruct", str(tmp_path / "data" / "data.padf"), "--algo", "model-based",
                         "--mode", "hardware", "--config", str(cfg), "--out", str(tmp_path / run),
                         "--quiet"]) == 0
        outputs.append({f: (tmp_path / run / f).read_bytes() for f in files})
    elapsed = time.perf_counter() - t0
    repeat = outputs[0] == outputs[1]
    shuffle = outputs[0] == outputs[2]
    assert acceptance(7, "determinism", repeat and shuffle,
                      f"repeat run identical={repeat}, lane-shuffled run identical={shuffle} "
                      f"({', '.join(files)}); {elapsed:.1f} s")


def test_criterion_8_throughput(acceptance, full_size):
    s, beta = full_size
    fps = [cycle_model(GRID, GEOM, ExecSchedule(), k, 1024).fps_at_clock(200e6) for k in range(1, 21)]
    emu = HardwareEmulator(GEOM, GRID, ACOUSTIC, s,
                           cfg=ReconConfig(backward_gain=beta, loss_threshold=0.0, max_iterations=3))
    res = emu.run(_data(PHANTOMS["mixed"], s))
    predicted = cycle_model(GRID, GEOM, ExecSchedule(), res.cycles.iterations_run, 1024)
    rel = abs(res.cycles.total_cycles - predicted.total_cycles) / predicted.total_cycles
    _, das_only = emu.das_frame(_data(PHANTOMS["disc"], s))
    rel0 = abs(das_only.total_cycles - emu.predicted_cycles(0).total_cycles) / das_only.total_cycles
    ok = all(1 <= f <= 100 for f in fps) and rel <= 0.01 and rel0 <= 0.01
    assert acceptance(8, "throughput sanity", ok,
                      f"FPS at 200 MHz {fps[0]:.2f} (1 iteration) to {fps[-1]:.2f} (20 iterations); "
                      f"emulator vs model: {res.cycles.total_cycles} vs {predicted.total_cycles} cycles "
                      f"(rel {rel:.1e}), DAS-only rel {rel0:.1e}")


def test_criterion_9_baselines(acceptance, full_size):
    s, _ = full_size
    delays = compute_delay_table(GEOM, GRID, ACOUSTIC)
    rng = np.random.default_rng(9)
    cf_ok, dmas_ok = True, True
    for spec in (PHANTOMS["mixed"], PHANTOMS["points+noise"]):
        S = _data(spec, s)
        cf_ok &= bool(np.all(np.abs(das_cf_reconstruct(S, delays)) <= np.abs(das_reconstruct(S, delays))))
    S = rng.normal(size=(128, 1024))
    cf_ok &= bool(np.all(np.abs(das_cf_reconstruct(S, delays)) <= np.abs(das_reconstruct(S, delays))))
    for channel in (0, 57, 127):
        single = np.zeros((128, 1024))
        single[channel] = rng.normal(size=1024)
        dmas_ok &= bool(np.all(dmas_reconstruct(single, delays) == 0.0))
    assert acceptance(9, "baseline behaviour", cf_ok and dmas_ok,
                      f"|DAS-CF| <= |DAS| everywhere: {cf_ok}; DMAS of single-channel input "
                      f"identically zero: {dmas_ok}")
