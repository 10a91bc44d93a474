"""Input generation, state harvesting and linear readout training.

The readout is the only trained part of the reservoir computer: a least
squares fit from observed reservoir channels (plus a constant bias column)
to the target signal. Training uses an SVD-based solver rather than the
normal equations; with an optional ridge penalty the channels' near
collinearity (the substrate channels track each other closely) can be
damped.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .reactor import ChemTrace, InfluxProfile

PRODUCT_ONLY = "product_only"
PRODUCT_AND_SUBSTRATE = "product_and_substrate"
READOUT_MODES = (PRODUCT_ONLY, PRODUCT_AND_SUBSTRATE)

_MODE_CHANNELS = {
    PRODUCT_ONLY: (("P1", "P2", "P3"), (0, 1, 2)),
    PRODUCT_AND_SUBSTRATE: (("P1", "P2", "P3", "S1", "S2", "S3"), (0, 1, 2, 3, 4, 5)),
}


def mode_channels(mode: str) -> tuple[tuple[str, ...], tuple[int, ...]]:
    if mode not in _MODE_CHANNELS:
        raise ValueError(f"unknown readout mode {mode!r}; expected one of {READOUT_MODES}")
    return _MODE_CHANNELS[mode]


def generate_input(seed, base: float, tau: float, start: float, end: float,
                   channel: int = 0) -> InfluxProfile:
    """Random piecewise-constant input: channel influx = base * R_k.

    The multipliers R_k are i.i.d. uniform on [0, 1) from numpy's PCG64
    generator seeded with `seed`, one per hold window; ceil((end-start)/tau)
    windows cover [start, end). The same seed always yields the same profile.
    """
    if not (end > start):
        raise ValueError(f"end={end} must exceed start={start}")
    if not (tau > 0):
        raise ValueError(f"tau must be > 0, got {tau}")
    n_windows = math.ceil((end - start) / tau)
    rng = np.random.default_rng(seed)
    values = rng.uniform(0.0, 1.0, n_windows)
    return InfluxProfile(
        base=(base, base, base),
        hold_time=tau,
        start_time=start,
        values=tuple(values),
        channel=channel,
    )


@dataclass(frozen=True)
class DesignMatrix:
    """Harvested reservoir observations, one row per sample time.

    X has one column per observed channel plus a trailing constant-1 bias
    column.
    """

    times: np.ndarray
    X: np.ndarray
    channel_names: tuple[str, ...]

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] != len(self.times):
            raise ValueError("X must have one row per sample time")
        if self.X.shape[1] != len(self.channel_names) + 1:
            raise ValueError("X must have one column per channel plus the bias column")
        if not np.all(self.X[:, -1] == 1.0):
            raise ValueError("last column of X must be constant 1")

    @property
    def n_channels(self) -> int:
        return self.X.shape[1] - 1

    def subset(self, keep: np.ndarray) -> "DesignMatrix":
        return DesignMatrix(self.times[keep], self.X[keep], self.channel_names)


def harvest(trace: ChemTrace, mode: str, t_from: float, t_to: float,
            stride_s: float) -> DesignMatrix:
    """Sample reservoir channels on [t_from, t_to) every stride_s seconds."""
    names, cols = mode_channels(mode)
    dt = trace.dt_sample
    t0 = trace.times[0]
    stride_k = round(stride_s / dt)
    if stride_k < 1 or abs(stride_s - stride_k * dt) > 1e-9:
        raise ValueError(f"stride_s={stride_s!r} is not a positive multiple of dt_sample={dt!r}")
    i_from = round((t_from - t0) / dt)
    if abs(t_from - (t0 + i_from * dt)) > 1e-9:
        raise ValueError(f"t_from={t_from!r} does not lie on the sample grid")
    i_to = math.ceil((t_to - t0) / dt - 1e-9)
    if i_from < 0 or i_to > len(trace) or i_from >= i_to:
        raise ValueError(
            f"window [{t_from}, {t_to}) is empty or outside the trace "
            f"[{t0}, {trace.times[-1]}]"
        )
    idx = np.arange(i_from, i_to, stride_k)
    X = np.hstack([trace.concentrations[idx][:, cols], np.ones((len(idx), 1))])
    return DesignMatrix(times=trace.times[idx], X=X, channel_names=names)


@dataclass(frozen=True)
class ReadoutWeights:
    """Trained linear readout: output = w . channels + w_b."""

    w: np.ndarray
    w_b: float
    rank_deficient: bool = False

    def __post_init__(self):
        if not (np.all(np.isfinite(self.w)) and math.isfinite(self.w_b)):
            raise ValueError("readout weights must be finite")

    def as_extended(self) -> np.ndarray:
        return np.concatenate([self.w, [self.w_b]])


def train_readout(X: DesignMatrix, y, ridge: float = 0.0,
                  ridge_bias: bool = False) -> ReadoutWeights:
    """Least-squares readout weights, optionally ridge-regularized.

    Minimizes ||X w' - y||^2 (+ ridge * ||w'||^2, bias excluded from the
    penalty unless ridge_bias). Solved via SVD (numpy lstsq), which matches
    the normal-equations pseudoinverse whenever X^T X is invertible and
    returns the minimum-norm solution (flagged rank_deficient) otherwise.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or len(y) != X.X.shape[0]:
        raise ValueError(f"y has length {y.shape}, expected {X.X.shape[0]} rows")
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")

    A, b = X.X, y
    if ridge > 0:
        n_pen = X.X.shape[1] if ridge_bias else X.n_channels
        penalty = math.sqrt(ridge) * np.eye(X.X.shape[1])[:n_pen]
        A = np.vstack([A, penalty])
        b = np.concatenate([y, np.zeros(n_pen)])

    w_ext, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    return ReadoutWeights(
        w=w_ext[:-1],
        w_b=float(w_ext[-1]),
        rank_deficient=bool(rank < X.X.shape[1]),
    )


def predict(weights: ReadoutWeights, X: DesignMatrix) -> np.ndarray:
    """Row-wise affine readout output."""
    if len(weights.w) != X.n_channels:
        raise ValueError(
            f"weight count {len(weights.w)} does not match channel count {X.n_channels}"
        )
    return X.X @ weights.as_extended()


def readout_to_json(weights: ReadoutWeights, mode: str, ridge: float) -> str:
    return json.dumps(
        {"w": list(weights.w), "w_b": weights.w_b, "mode": mode, "ridge": ridge}
    )


def readout_from_json(text: str) -> tuple[ReadoutWeights, str, float]:
    obj = json.loads(text)
    return (
        ReadoutWeights(w=np.asarray(obj["w"], dtype=float), w_b=float(obj["w_b"])),
        obj["mode"],
        float(obj["ridge"]),
    )
