"""Command-line interface: ``swaverecon <subcommand> [options]``.

Every failure prints one JSON line ``{"error": <type>, "message": <text>}``
on stderr and exits with status 1; argument errors exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import metadata

import numpy as np

from .config import Mode, load_config
from .geometry import Fold, storage_budget
from .hwmodel.cycles import cycle_model
from .io import read_image, write_image, write_json, write_jsonl, write_trace
from .metrics import SsimParams, error_map, ssim
from .padf import read_padf, write_padf
from .backward import normalize_image
from .errors import ConfigError, IncompatibleSymmetry
from .hwmodel.fixed import quantize_samples
from .pipeline import ALGORITHMS, forward_data, phantom_data, reconstruct
from .phantom import apply_noise


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


class Context:
    def __init__(self, args):
        self.args = args
        self.cfg = load_config(args.config)
        self.out = args.out
        os.makedirs(self.out, exist_ok=True)

    def path(self, name):
        return os.path.join(self.out, name)

    def say(self, text):
        if not self.args.quiet:
            print(text)

    def metadata(self, **fields):
        record = {
            "command": self.args.command,
            "config_hash": self.cfg.digest(),
            "mode": self.cfg.mode.value,
            "seed": self.args.seed,
            "version": _version(),
            "defaults": {
                "pulse_shape": self.cfg.waveform.shape.value,
                "learning_rate": self.cfg.recon.learning_rate,
                "lr_dyadic": [self.cfg.fixed_point.lr_code(self.cfg.recon.learning_rate),
                              self.cfg.fixed_point.lr_shift],
                "fold": self.cfg.schedule.fold.value,
            },
        }
        record.update(fields)
        write_json(record, self.path("metadata.json"))


def _save_data(ctx, S, name, dtype):
    rate = ctx.cfg.acoustic.sample_rate
    if dtype == "i16le":
        S, scale = quantize_samples(S, ctx.cfg.fixed_point)
    write_padf(ctx.path(name), S, rate, dtype)


def cmd_gen_phantom(ctx):
    image, S = phantom_data(ctx.cfg, ctx.args.seed, oracle=ctx.args.oracle)
    write_image(image, ctx.path("phantom.csv"))
    write_image(normalize_image(image), ctx.path("phantom.pgm"))
    _save_data(ctx, S, "data.padf", ctx.args.dtype)
    ctx.metadata(forward="oracle" if ctx.args.oracle else "reference", dtype=ctx.args.dtype,
                 targets=len(ctx.cfg.phantom.targets))
    ctx.say(f"wrote phantom and channel data {S.shape} to {ctx.out}")


def cmd_forward(ctx):
    image = read_image(ctx.args.image)
    if image.shape != ctx.cfg.grid.shape:
        raise ConfigError(f"image {image.shape} does not match grid {ctx.cfg.grid.shape}")
    S = forward_data(image, ctx.cfg)
    S = apply_noise(S, ctx.cfg.phantom.noise, np.random.default_rng(ctx.args.seed))
    _save_data(ctx, S, "data.padf", ctx.args.dtype)
    ctx.metadata(source=os.path.basename(ctx.args.image), dtype=ctx.args.dtype)
    ctx.say(f"wrote channel data {S.shape} to {ctx.path('data.padf')}")


def cmd_reconstruct(ctx):
    args = ctx.args
    data = read_padf(args.data)
    mode = Mode(args.mode) if args.mode else ctx.cfg.mode
    samples = data.samples if mode is Mode.HARDWARE else data.samples.astype(np.float64)
    result = reconstruct(samples, ctx.cfg, args.algo, mode)
    display = result.display
    write_image(display, ctx.path("image.csv"))
    write_image(display, ctx.path("image.pgm"))
    fields = {"algo": args.algo, "mode": mode.value, "input": os.path.basename(args.data)}
    if result.trace is not None:
        write_trace(result.trace, ctx.path("trace.csv"))
        fields["iterations_run"] = result.trace.iterations_run
        fields["final_loss"] = result.trace.final_loss
    if result.cycles is not None:
        report = result.cycles.as_dict()
        report["fps_at_clock"] = result.cycles.fps_at_clock(ctx.cfg.clock_hz)
        report["clock_hz"] = ctx.cfg.clock_hz
        write_jsonl([report], ctx.path("cycles.jsonl"))
    fields.update(result.extra)
    ctx.metadata(**fields)
    ctx.say(f"{args.algo} ({mode.value}) image written to {ctx.path('image.csv')}")


def cmd_compare(ctx):
    args = ctx.args
    a, b = read_image(args.a), read_image(args.b)
    want_ssim = args.ssim or not args.error_map
    record = {"a": os.path.basename(args.a), "b": os.path.basename(args.b)}
    if want_ssim:
        record["ssim"] = ssim(a, b, SsimParams())
        if args.threshold is not None:
            record["threshold"] = args.threshold
            record["pass"] = record["ssim"] >= args.threshold
    if args.error_map:
        err = error_map(a, b)
        write_image(err, ctx.path("error_map.csv"))
        record["max_error"] = float(err.max(initial=0))
        record["mean_error"] = float(err.mean()) if err.size else 0.0
    write_jsonl([record], ctx.path("metrics.jsonl"))
    ctx.metadata(**{k: v for k, v in record.items() if k in ("ssim", "max_error")})
    print(json.dumps(record, sort_keys=True))
    return 0 if record.get("pass", True) else 1


def budget_rows(cfg):
    fp, g = cfg.fixed_point, cfg.grid
    rows = []
    for fold in Fold:
        try:
            b = storage_budget(cfg.geometry.num_sensors, g.n, g.m, fp.delay_bits,
                               fp.phase_bits, fp.amplitude_bits, fold)
        except IncompatibleSymmetry:
            continue
        for name, bits in b.rows():
            rows.append({"fold": fold.value, "table": name, "stored_rows": b.stored_sensor_count,
                         "bits": bits, "Mb": b.megabits(bits), "Mib": b.mebibits(bits),
                         "fold_ratio": float(b.savings_ratio),
                         "fold_ratio_exact": str(b.savings_ratio)})
    return rows


def cmd_budget(ctx):
    rows = budget_rows(ctx.cfg)
    write_jsonl(rows, ctx.path("budget.jsonl"))
    ctx.metadata(rows=len(rows))
    if not ctx.args.quiet:
        print(f"{'fold':<8}{'table':<11}{'rows':>5}{'bits':>13}{'Mb':>9}{'Mib':>9}{'ratio':>9}")
        for r in rows:
            print(f"{r['fold']:<8}{r['table']:<11}{r['stored_rows']:>5}{r['bits']:>13}"
                  f"{r['Mb']:>9.2f}{r['Mib']:>9.2f}{r['fold_ratio_exact']:>9}")


def cmd_bench(ctx):
    cfg = ctx.cfg
    schedule = cfg.exec_schedule()
    records = []
    for k in ctx.args.iterations:
        rep = cycle_model(cfg.grid, cfg.geometry, schedule, k, cfg.acoustic.sample_depth,
                          cfg.cycles)
        rec = rep.as_dict()
        rec["fps_at_clock"] = rep.fps_at_clock(cfg.clock_hz)
        rec["clock_hz"] = cfg.clock_hz
        records.append(rec)
        ctx.say(f"iterations={k:>3}  cycles={rep.total_cycles:>11}  "
                f"fps@{cfg.clock_hz / 1e6:g}MHz={rec['fps_at_clock']:.2f}")
    if ctx.args.time:
        _, S = phantom_data(cfg, ctx.args.seed)
        for algo in ("das", "model-based"):
            for mode in Mode:
                t0 = time.perf_counter()
                reconstruct(S, cfg, algo, mode)
                dt = time.perf_counter() - t0
                records.append({"algo": algo, "mode": mode.value, "wall_seconds": dt})
                ctx.say(f"{algo:<12}{mode.value:<10}{dt:8.2f} s")
    write_jsonl(records, ctx.path("bench.jsonl"))
    ctx.metadata(iterations=list(ctx.args.iterations), timed=bool(ctx.args.time))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, default=0, help="noise seed (default: 0)")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    parser = argparse.ArgumentParser(prog="swaverecon",
                                     description="Photoacoustic DAS and s-Wave model-based reconstruction")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-phantom", parents=[common], help="rasterize the configured phantom")
    p.add_argument("--oracle", action="store_true", help="use the point-source oracle forward")
    p.add_argument("--dtype", choices=["f64le", "i16le"], default="f64le")
    p.set_defaults(func=cmd_gen_phantom)

    p = sub.add_parser("forward", parents=[common], help="project an image to channel data")
    p.add_argument("image", help="image file (.csv or .pgm)")
    p.add_argument("--dtype", choices=["f64le", "i16le"], default="f64le")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("reconstruct", parents=[common], help="reconstruct an image from PADF data")
    p.add_argument("data", help="PADF channel data")
    p.add_argument("--algo", choices=ALGORITHMS, default="das")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("compare", parents=[common], help="SSIM and error map of two images")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--ssim", action="store_true")
    p.add_argument("--error-map", action="store_true")
    p.add_argument("--threshold", type=float, default=None,
                   help="exit 1 when SSIM falls below this value")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("budget", parents=[common], help="table storage for each fold")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("bench", parents=[common], help="cycle model and optional wall-clock timing")
    p.add_argument("--iterations", type=int, nargs="+", default=[0, 1, 5, 10, 20])
    p.add_argument("--time", action="store_true", help="also time reference and emulated runs")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        ctx = Context(args)
        code = args.func(ctx)
    except Exception as exc:  # noqa: BLE001 - reported as a machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
