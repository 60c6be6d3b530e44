"""Image, trace and report writers. All writes are atomic."""

from __future__ import annotations

import io
import json

import numpy as np

from .errors import ConfigError
from .padf import atomic_write_bytes

PGM_MAX = 255
NORMALIZED_MAX = 256.0


def encode_pgm(image):
    """Binary P5 greymap; input must already lie in ``[0, 256]``."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("PGM needs a 2-D image")
    if not np.all(np.isfinite(img)) or img.min(initial=0) < 0 or img.max(initial=0) > NORMALIZED_MAX:
        raise ValueError("PGM output needs an image normalized to [0, 256]")
    pixels = np.minimum(np.rint(img), PGM_MAX).astype(np.uint8)
    rows, cols = img.shape
    return f"P5\n{cols} {rows}\n{PGM_MAX}\n".encode("ascii") + pixels.tobytes()


def decode_pgm(data: bytes):
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P5":
        raise ValueError("not a binary PGM")
    cols, rows, maxval = (int(t) for t in tokens[1:])
    if maxval > 255:
        raise ValueError("16-bit PGM is not supported")
    body = data[pos + 1:pos + 1 + rows * cols]
    if len(body) != rows * cols:
        raise ValueError("truncated PGM")
    return np.frombuffer(body, dtype=np.uint8).reshape(rows, cols).astype(np.float64)


def encode_csv(image):
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("CSV images must be 2-D")
    buf = io.StringIO()
    np.savetxt(buf, img, delimiter=",", fmt="%.17g")
    return buf.getvalue().encode("ascii")


def image_format(path, fmt=None):
    fmt = (fmt or str(path).rsplit(".", 1)[-1]).lower()
    if fmt not in ("pgm", "csv"):
        raise ConfigError(f"unknown image format {fmt!r}; use pgm or csv")
    return fmt


def write_image(image, path, fmt=None):
    """Write ``image`` as PGM or CSV (inferred from the suffix if ``fmt`` is None)."""
    fmt = image_format(path, fmt)
    atomic_write_bytes(path, encode_pgm(image) if fmt == "pgm" else encode_csv(image))


def read_image(path, fmt=None):
    fmt = image_format(path, fmt)
    with open(path, "rb") as fh:
        data = fh.read()
    if fmt == "pgm":
        return decode_pgm(data)
    return np.atleast_2d(np.loadtxt(io.StringIO(data.decode("ascii")), delimiter=",", ndmin=2))


def write_trace(trace, path):
    """Iteration trace as ``t,loss`` CSV."""
    lines = ["t,loss"] + [f"{r.t},{r.loss!r}" for r in trace.records]
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def read_trace(path):
    with open(path) as fh:
        rows = [line.strip().split(",") for line in fh.readlines()[1:] if line.strip()]
    return [(int(t), float(loss)) for t, loss in rows]


def jsonl_bytes(records):
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records).encode("utf-8")


def write_jsonl(records, path):
    atomic_write_bytes(path, jsonl_bytes(records))


def write_json(obj, path):
    atomic_write_bytes(path, (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8"))
