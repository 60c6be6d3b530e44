"""Run the fixed-point emulator next to the float reference.

Reports SSIM between the two, saturation counts, the cycle breakdown of
one frame and the frame rate at the configured clock. Uses the full
128 x 128 setup, so it takes around ten seconds.

    python demos/hardware_emulation.py
"""

from swaverecon import normalize_image, ssim
from swaverecon.config import RunConfig
from swaverecon.pipeline import hardware_emulator, phantom_data, reconstruct
from swaverecon.phantom import NoiseSpec, PhantomSpec, Target

cfg = RunConfig(phantom=PhantomSpec([Target.point(0.004, -0.003),
                                     Target.disc(-0.004, 0.002, 0.002, 0.6)], NoiseSpec(0.01)))
_, S = phantom_data(cfg, seed=1)

emu = hardware_emulator(cfg)
hw = emu.run(S)
ref = reconstruct(S, cfg, "model-based", "reference")

print(f"backward gain {emu.backward_gain:.4g}, forward gain register "
      f"{hw.gain_register} >> {hw.gain_shift}, lr code {hw.lr_code}")
print(f"SSIM hardware vs float: {ssim(normalize_image(hw.image), normalize_image(ref.image)):.4f}")
print(f"saturations: {hw.saturation.total}")
for key, value in hw.cycles.as_dict().items():
    print(f"  {key:18s} {value}")
print(f"{hw.cycles.fps_at_clock(cfg.clock_hz):.2f} FPS at {cfg.clock_hz / 1e6:.0f} MHz")
for k in (0, 1, 5, 20):
    print(f"  predicted with {k:2d} iterations: {emu.predicted_cycles(k).fps_at_clock(cfg.clock_hz):6.2f} FPS")
