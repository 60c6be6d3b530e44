"""Floating-point backward models: DAS plus the DMAS and DAS-CF baselines.

All three reconstructors gather ``v_i = S[i, delay(i, j)]`` for every sensor
``i`` and pixel ``j`` and then combine the gathered values per pixel. Results
are returned as ``(n, m)`` arrays; DAS returns the signed sum (callers apply
``abs`` where the iterative loop needs it).
"""

import numpy as np

from .errors import DimensionMismatch
from .geometry import DelayTable, FoldedTableSet


def _delay_rows(delays):
    """Return ``(table, grid_shape)`` for a DelayTable, FoldedTableSet or array."""
    if isinstance(delays, FoldedTableSet):
        return delays.unfold(), delays.grid_shape
    if isinstance(delays, DelayTable):
        return delays.delays, delays.grid_shape
    table = np.asarray(delays)
    return table, None


def gather(S, delays, grid_shape=None):
    """Delayed samples ``v`` with shape (N, n*m) plus the image shape."""
    S = np.asarray(S)
    table, shape = _delay_rows(delays)
    shape = shape or grid_shape or (1, table.shape[1])
    if table.ndim != 2 or S.ndim != 2 or table.shape[0] != S.shape[0]:
        raise DimensionMismatch(
            f"sensor data {S.shape} does not match delay table {table.shape}")
    if table.shape[1] != shape[0] * shape[1]:
        raise DimensionMismatch(f"delay table width {table.shape[1]} != grid {shape}")
    if table.size and (table.min() < 0 or table.max() >= S.shape[1]):
        raise DimensionMismatch(
            f"delay entries must index [0, {S.shape[1]}), got max {table.max()}")
    rows = np.arange(S.shape[0])[:, None]
    return S[rows, table], shape


def das_reconstruct(S, delays, grid_shape=None):
    """Delay-and-sum: pixel j is the sum over sensors of ``S[i, delay(i, j)]``."""
    v, shape = gather(S, delays, grid_shape)
    image = np.zeros(v.shape[1], dtype=np.result_type(v.dtype, np.float64))
    for row in v:  # ascending sensor order
        image += row
    return image.reshape(shape)


def dmas_reconstruct(S, delays, grid_shape=None):
    """Delay-multiply-and-sum.

    ``sum_{i<k} sign(v_i v_k) sqrt(|v_i v_k|)`` equals ``sum_{i<k} w_i w_k``
    with ``w = sign(v) sqrt(|v|)``, evaluated in O(N) per pixel as
    ``sum_k w_k * (w_0 + ... + w_{k-1})``. A single nonzero channel therefore
    gives exactly zero.
    """
    v, shape = gather(S, delays, grid_shape)
    w = np.sign(v) * np.sqrt(np.abs(v))
    image = np.zeros(w.shape[1], dtype=np.float64)
    prefix = np.zeros(w.shape[1], dtype=np.float64)
    for row in w:
        image += row * prefix
        prefix += row
    return image.reshape(shape)


def coherence_factor(v):
    """``|sum v|^2 / (N sum v^2)`` per column, 0 where all samples vanish."""
    num = v.sum(axis=0) ** 2
    den = v.shape[0] * (v * v).sum(axis=0)
    cf = np.zeros_like(num, dtype=np.float64)
    np.divide(num, den, out=cf, where=den > 0)
    return cf


def das_cf_reconstruct(S, delays, grid_shape=None):
    v, shape = gather(S, delays, grid_shape)
    return (coherence_factor(v) * v.sum(axis=0)).reshape(shape)


def normalize_image(image, full_scale=256.0):
    """Scale so the maximum becomes ``full_scale``; non-positive maxima pass through."""
    image = np.asarray(image, dtype=np.float64)
    peak = image.max() if image.size else 0.0
    if peak <= 0:
        return image.copy()
    return image * (full_scale / peak)
