"""Model-based iterative reconstruction alternating DAS and s-Wave.

The loop is::

    I_0 = g * DAS(S)
    R_1 = S - F(|I_0|)
    for t in 1..K:
        I_t = I_{t-1} + lr * g * DAS(R_t)
        R_{t+1} = S - F(|I_t|)
        stop if ||R_{t+1}||_2 < L

Raw DAS has a gain of order 1e4 against the s-Wave forward model, so a plain
``g = 1`` diverges for any useful ``lr``. ``g`` defaults to
``gain_headroom / rho`` where ``rho`` is the spectral radius of DAS o F
(power iteration), which makes ``lr * gain_headroom == 1`` a unit step on the
dominant mode and ``lr < 2 / gain_headroom`` the stable range.

``keep_magnitude`` stores ``|I_t|`` after each update (the image RAM holds
magnitudes); without it, negative pixels grow without bound through the
``abs`` that feeds the forward model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backward import das_reconstruct
from .errors import DimensionMismatch, NonFiniteLoss
from .geometry import AcousticConfig, ArrayGeometry, RoiGrid, compute_delay_table
from .swave import SwaveModel, SwaveParams
from .waveform import StandardWaveform


@dataclass(frozen=True)
class ReconConfig:
    learning_rate: float = 0.1
    max_iterations: int = 20
    # None -> 0.05 * ||S||_2
    loss_threshold: float | None = None
    record_trace: bool = True
    record_images: bool = False
    backward_gain: float | None = None
    gain_headroom: float = 10.0
    power_iterations: int = 30
    keep_magnitude: bool = True
    normalize: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.loss_threshold is not None and self.loss_threshold < 0:
            raise ValueError("loss_threshold must be >= 0")
        if self.backward_gain is not None and not self.backward_gain > 0:
            raise ValueError("backward_gain must be > 0")

    def threshold_for(self, S):
        if self.loss_threshold is not None:
            return float(self.loss_threshold)
        return 0.05 * loss_l2(S)


@dataclass
class IterationRecord:
    t: int
    loss: float
    image: np.ndarray | None = None


@dataclass
class IterationTrace:
    records: list[IterationRecord] = field(default_factory=list)
    signed_image: np.ndarray | None = None
    backward_gain: float = 1.0
    image_scale: float = 1.0
    iterations_run: int = 0
    final_loss: float = 0.0

    @property
    def losses(self):
        return np.array([r.loss for r in self.records])

    def __len__(self):
        return len(self.records)


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} != {b.shape}")


def residual(S, s_n):
    S, s_n = np.asarray(S), np.asarray(s_n)
    _check_same_shape(S, s_n)
    return S - s_n


def loss_l2(R):
    """Frobenius norm of the residual."""
    return float(np.sqrt(np.sum(np.square(np.asarray(R, dtype=np.float64)))))


def update_image(prev, correction, lr):
    prev, correction = np.asarray(prev), np.asarray(correction)
    _check_same_shape(prev, correction)
    return prev + lr * correction


def spectral_radius(apply, shape, iterations=30):
    """Power-iteration estimate of the dominant gain of a linear map on images."""
    x = np.ones(shape)
    x /= np.linalg.norm(x)
    rho = 0.0
    for _ in range(iterations):
        y = apply(x)
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        rho = norm
        x = y / norm
    return float(rho)


class ModelBasedReconstructor:
    """Holds the delay table, forward model and backward gain for one setup."""

    def __init__(self, geom: ArrayGeometry, grid: RoiGrid, acoustic: AcousticConfig,
                 s: StandardWaveform, params: SwaveParams = SwaveParams(),
                 cfg: ReconConfig = ReconConfig(), delays=None):
        self.grid = grid
        self.cfg = cfg
        self.delays = delays if delays is not None else compute_delay_table(geom, grid, acoustic)
        self.forward_model = SwaveModel(s, geom, grid, acoustic, params)
        self._gain = cfg.backward_gain

    def das(self, data):
        return das_reconstruct(data, self.delays, self.grid.shape)

    def forward(self, image):
        return self.forward_model.forward(image)

    @property
    def backward_gain(self):
        if self._gain is None:
            rho = spectral_radius(lambda x: self.das(self.forward(x)), self.grid.shape,
                                  self.cfg.power_iterations)
            self._gain = self.cfg.gain_headroom / rho if rho > 0 else 1.0
        return self._gain

    def run(self, S):
        cfg = self.cfg
        S = np.asarray(S, dtype=np.float64)
        gain = self.backward_gain
        threshold = cfg.threshold_for(S)
        trace = IterationTrace(backward_gain=gain)

        image = gain * self.das(S)
        if cfg.keep_magnitude:
            image = np.abs(image)
        scale = 1.0
        if cfg.normalize:
            peak = np.abs(image).max()
            scale = 256.0 / peak if peak > 0 else 1.0
            image = image * scale
        trace.image_scale = scale

        def forward(img):
            return self.forward(np.abs(img)) / scale

        R = residual(S, forward(image))
        if self._record(trace, 0, R, image) < threshold or trace.final_loss == 0:
            return self._finish(trace, image)

        for t in range(1, cfg.max_iterations + 1):
            correction = (scale * gain) * self.das(R)
            image = update_image(image, correction, cfg.learning_rate)
            if cfg.keep_magnitude:
                image = np.abs(image)
            R = residual(S, forward(image))
            if self._record(trace, t, R, image) < threshold:
                break
        return self._finish(trace, image)

    def _record(self, trace, t, R, image):
        loss = loss_l2(R)
        if not np.isfinite(loss):
            raise NonFiniteLoss(f"loss became {loss} at iteration {t}")
        trace.iterations_run = t
        trace.final_loss = loss
        if self.cfg.record_trace:
            snap = image.copy() if self.cfg.record_images else None
            trace.records.append(IterationRecord(t, loss, snap))
        return loss

    @staticmethod
    def _finish(trace, image):
        trace.signed_image = image.copy()
        return np.abs(image), trace


def model_based_reconstruct(S, geom, grid, acoustic, s, params=SwaveParams(),
                            cfg=ReconConfig(), delays=None):
    """Run the iterative loop; returns ``(|I_t|, trace)``."""
    return ModelBasedReconstructor(geom, grid, acoustic, s, params, cfg, delays).run(S)
