"""Benchmark tasks, the NRMSE metric and the trial/benchmark protocol.

Both tasks ask the readout to reconstruct a function of past input values
from the present reservoir state. Task A combines the two most recent
inputs (lags of 1 and 2 units); Task B combines the inputs one and one and
a half hold times ago, looked up in continuous time:

    Task A:  y(t) = Sm1(t - 1) + 2 * Sm1(t - 2)
    Task B:  y(t) = Sm1(t - tau) + Sm1(t - 1.5 * tau) / 2

Task A's lag unit is configurable: "seconds" reads the lags literally
(1 s and 2 s), "windows" reads them as whole hold windows (tau and 2*tau).
Samples whose lags reach back before the fluctuation started carry a NaN
marker and are excluded from training and scoring.

A trial settles the reactor for settle_s seconds under constant influx,
then drives it with a seeded random input; the first train_s seconds of
the fluctuating regime are harvested for training the readout and the next
test_s seconds measure generalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .reactor import ChemTrace, InfluxProfile, IntegrationDivergedError, integrate
from .readout import (
    ReadoutWeights,
    generate_input,
    harvest,
    predict,
    train_readout,
)

TARGET_RANGE = "target_range"
OUTPUT_RANGE = "output_range"

# stream tag for the untrained-readout weight draw, separating it from the
# input-multiplier stream of the same trial seed
_UNTRAINED_STREAM = 1


@dataclass(frozen=True)
class TaskSpec:
    kind: str
    tau: float

    def __post_init__(self):
        if self.kind not in ("A", "B"):
            raise ValueError(f"task kind must be 'A' or 'B', got {self.kind!r}")
        if not (self.tau > 0):
            raise ValueError(f"tau must be > 0, got {self.tau}")


@dataclass(frozen=True)
class TrialResult:
    seed: int
    mode: str
    task: str
    nrmse_train: float
    nrmse_test: float
    untrained_rmse_ratio: float


@dataclass(frozen=True)
class CellStats:
    mode: str
    task: str
    mean: float
    std: float
    per_trial: tuple[float, ...]  # test NRMSE, trial order
    per_trial_train: tuple[float, ...] = ()


@dataclass(frozen=True)
class BenchmarkStats:
    n_trials: int
    master_seed: int
    cells: tuple[CellStats, ...]

    def cell(self, mode: str, task: str) -> CellStats:
        for c in self.cells:
            if c.mode == mode and c.task == task:
                return c
        raise KeyError((mode, task))


def task_a_target(profile: InfluxProfile, t, interp: str = "seconds") -> np.ndarray:
    """Task A target at time(s) t; NaN where the lags predate the input."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if interp == "windows":
        k = np.floor((t - profile.start_time) / profile.hold_time).astype(np.int64)
        v = profile.window_values()
        defined = k >= 2
        # past the profile's end the last window value is held, so clip each
        # lagged index independently
        k1 = np.clip(k - 1, 0, len(v) - 1)
        k2 = np.clip(k - 2, 0, len(v) - 1)
        out = np.where(defined, v[k1] + 2.0 * v[k2], np.nan)
    elif interp == "seconds":
        defined = t >= profile.start_time + 2.0
        out = np.where(
            defined,
            profile.channel_rate(t - 1.0) + 2.0 * profile.channel_rate(t - 2.0),
            np.nan,
        )
    else:
        raise ValueError(f"interp must be 'windows' or 'seconds', got {interp!r}")
    return out


def task_b_target(profile: InfluxProfile, t) -> np.ndarray:
    """Task B target at time(s) t; NaN before start_time + 1.5 * tau."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tau = profile.hold_time
    defined = t >= profile.start_time + 1.5 * tau
    return np.where(
        defined,
        profile.channel_rate(t - tau) + 0.5 * profile.channel_rate(t - 1.5 * tau),
        np.nan,
    )


def target_for(task: str, profile: InfluxProfile, t, taskA_interp: str = "seconds") -> np.ndarray:
    if task == "A":
        return task_a_target(profile, t, taskA_interp)
    if task == "B":
        return task_b_target(profile, t)
    raise ValueError(f"task must be 'A' or 'B', got {task!r}")


def nrmse(target, output, normalize_by: str = TARGET_RANGE) -> float:
    """Root-mean-square error divided by the range of target or output."""
    target = np.asarray(target, dtype=float)
    output = np.asarray(output, dtype=float)
    if target.shape != output.shape or target.ndim != 1:
        raise ValueError(f"shape mismatch: target {target.shape} vs output {output.shape}")
    if len(target) < 2:
        raise ValueError(f"need at least 2 samples, got {len(target)}")
    if np.isnan(target).any() or np.isnan(output).any():
        raise ValueError("undefined-target markers (NaN) must be excluded before scoring")
    if normalize_by == TARGET_RANGE:
        span = target.max() - target.min()
    elif normalize_by == OUTPUT_RANGE:
        span = output.max() - output.min()
    else:
        raise ValueError(f"normalize_by must be '{TARGET_RANGE}' or '{OUTPUT_RANGE}'")
    if span <= 0:
        raise ValueError(f"degenerate normalizer: {normalize_by} has zero range")
    return float(np.sqrt(np.mean((target - output) ** 2)) / span)


def trial_seed(master_seed: int, index: int) -> int:
    """Per-trial seed derived from (master_seed, trial_index)."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def simulate_trial(config: ExperimentConfig, seed: int) -> tuple[ChemTrace, InfluxProfile]:
    """Settle, then drive the reactor with the trial's random input."""
    profile = generate_input(
        seed,
        base=config.influx_base,
        tau=config.tau,
        start=config.settle_s,
        end=config.t_end,
    )
    try:
        trace = integrate(
            config.initial_state(),
            config.reactor,
            profile,
            t_end=config.t_end,
            dt=config.dt,
            dt_sample=config.dt_sample,
        )
    except IntegrationDivergedError as exc:
        raise RuntimeError(f"trial (seed={seed}) failed: {exc}") from exc
    return trace, profile


def _harvest_with_targets(config, trace, profile, mode, task, t_from, t_to):
    X = harvest(trace, mode, t_from, t_to, config.stride)
    y = target_for(task, profile, X.times, config.taskA_interp)
    keep = ~np.isnan(y)
    return X.subset(keep), y[keep]


def evaluate_cell(config: ExperimentConfig, trace: ChemTrace, profile: InfluxProfile,
                  mode: str, task: str, seed: int) -> TrialResult:
    """Train and score one (mode, task) readout on an already-run trial."""
    t_train_end = config.settle_s + config.train_s
    X_train, y_train = _harvest_with_targets(
        config, trace, profile, mode, task, config.settle_s, t_train_end)
    X_test, y_test = _harvest_with_targets(
        config, trace, profile, mode, task, t_train_end, config.t_end)

    weights = train_readout(X_train, y_train, ridge=config.ridge)
    nrmse_train = nrmse(y_train, predict(weights, X_train), config.normalize_by)
    nrmse_test = nrmse(y_test, predict(weights, X_test), config.normalize_by)

    rng = np.random.default_rng([seed, _UNTRAINED_STREAM])
    untrained = ReadoutWeights(w=rng.normal(0.0, 1.0, X_test.n_channels),
                               w_b=float(rng.normal()))
    rmse_trained = float(np.sqrt(np.mean((y_test - predict(weights, X_test)) ** 2)))
    rmse_untrained = float(np.sqrt(np.mean((y_test - predict(untrained, X_test)) ** 2)))
    ratio = rmse_untrained / rmse_trained if rmse_trained > 0 else np.inf

    return TrialResult(
        seed=seed,
        mode=mode,
        task=task,
        nrmse_train=nrmse_train,
        nrmse_test=nrmse_test,
        untrained_rmse_ratio=float(ratio),
    )


def run_trial(config: ExperimentConfig, seed: int) -> TrialResult:
    """One full trial of the configured (mode, task) cell."""
    trace, profile = simulate_trial(config, seed)
    return evaluate_cell(config, trace, profile, config.mode, config.task, seed)


def run_benchmark(config: ExperimentConfig, n_trials: int | None = None) -> BenchmarkStats:
    """All four (mode, task) cells over seeded trials.

    Each trial integrates the reactor once; the same trace and input are
    shared by all four cells, so mode and task comparisons are paired.
    Trials are reduced in index order, making the output deterministic.
    """
    n = config.n_trials if n_trials is None else n_trials
    if n < 2:
        raise ValueError(f"n_trials must be >= 2, got {n}")
    modes = ("product_only", "product_and_substrate")
    tasks = ("A", "B")
    per_cell: dict[tuple[str, str], list[TrialResult]] = {(m, k): [] for m in modes for k in tasks}
    for i in range(n):
        seed = trial_seed(config.master_seed, i)
        trace, profile = simulate_trial(config, seed)
        for m in modes:
            for k in tasks:
                per_cell[(m, k)].append(evaluate_cell(config, trace, profile, m, k, seed))
    cells = []
    for (m, k), results in per_cell.items():
        test = [r.nrmse_test for r in results]
        cells.append(CellStats(
            mode=m,
            task=k,
            mean=float(np.mean(test)),
            std=float(np.std(test, ddof=1)),
            per_trial=tuple(test),
            per_trial_train=tuple(r.nrmse_train for r in results),
        ))
    return BenchmarkStats(n_trials=n, master_seed=config.master_seed, cells=tuple(cells))
