"""PADF: a minimal little-endian binary container for channel data.

Layout (all little-endian)::

    offset  size  field
    0       4     magic b"PADF"
    4       2     version (u16, currently 1)
    6       4     rows (u32)
    10      4     cols (u32)
    14      1     dtype code (0 = f64le, 1 = i16le)
    15      8     sample_rate (f64, Hz)
    23      ...   payload, row-major, rows * cols * itemsize bytes
"""

import os
import struct
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import BadMagic, PadfError, TruncatedPayload, UnsupportedDtype

MAGIC = b"PADF"
VERSION = 1
_HEADER = struct.Struct("<4sHIIBd")
HEADER_SIZE = _HEADER.size

DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<i2")}
DTYPE_CODES = {"f64le": 0, "i16le": 1}


@dataclass
class SensorData:
    """Channel samples (N x M) and their sampling rate in Hz."""

    samples: np.ndarray
    sample_rate: float

    @property
    def shape(self):
        return self.samples.shape


def atomic_write_bytes(path, data: bytes):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_padf(samples, sample_rate, dtype="f64le"):
    if dtype not in DTYPE_CODES:
        raise UnsupportedDtype(dtype)
    code = DTYPE_CODES[dtype]
    arr = np.atleast_2d(np.asarray(samples))
    if arr.ndim != 2:
        raise PadfError("PADF holds 2-D arrays only")
    if code == 1:
        if not np.issubdtype(arr.dtype, np.integer):
            raise PadfError("i16le payload requires integer samples")
        if arr.size and (arr.min() < -32768 or arr.max() > 32767):
            raise PadfError("samples exceed the int16 range")
    payload = np.ascontiguousarray(arr, dtype=DTYPES[code]).tobytes()
    header = _HEADER.pack(MAGIC, VERSION, arr.shape[0], arr.shape[1], code,
                          float(sample_rate))
    return header + payload


def write_padf(path, samples, sample_rate, dtype="f64le"):
    atomic_write_bytes(path, encode_padf(samples, sample_rate, dtype))


def decode_padf(data: bytes):
    if len(data) < HEADER_SIZE:
        raise TruncatedPayload("file shorter than the PADF header")
    magic, version, rows, cols, code, rate = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise PadfError(f"unsupported PADF version {version}")
    if code not in DTYPES:
        raise UnsupportedDtype(f"dtype code {code}")
    dtype = DTYPES[code]
    expected = rows * cols * dtype.itemsize
    payload = data[HEADER_SIZE:]
    if len(payload) < expected:
        raise TruncatedPayload(f"payload has {len(payload)} bytes, expected {expected}")
    if len(payload) > expected:
        raise PadfError(f"{len(payload) - expected} trailing bytes after payload")
    arr = np.frombuffer(payload, dtype=dtype).reshape(rows, cols)
    # i16 payloads stay integer for the fixed-point path
    arr = arr.astype(np.int64) if code == 1 else arr.astype(np.float64)
    return SensorData(arr, rate)


def read_padf(path):
    with open(path, "rb") as fh:
        return decode_padf(fh.read())
