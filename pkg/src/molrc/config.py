"""Experiment configuration: defaults, JSON loading, validation.

An empty config file yields the reference protocol: the reference reactor
constants, 500 s settling under constant influx, 2000 s of fluctuating
input harvested for training and another 2000 s for testing, tau = 100 s
hold windows, 100 benchmark trials.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .reactor import ChemState, ReactorParams
from .readout import READOUT_MODES

TASKS = ("A", "B")
TASK_A_INTERPS = ("windows", "seconds")
NORMALIZERS = ("target_range", "output_range")


@dataclass(frozen=True)
class ExperimentConfig:
    reactor: ReactorParams = field(default_factory=ReactorParams)
    initial_P: tuple[float, float, float] = (1000.0, 0.0, 0.0)
    initial_S: tuple[float, float, float] = (0.0, 0.0, 0.0)
    influx_base: float = 5.45e-6  # nmol/s
    tau: float = 100.0  # input hold time, s
    settle_s: float = 500.0
    train_s: float = 2000.0
    test_s: float = 2000.0
    dt: float = 0.05
    dt_sample: float = 1.0
    stride: float = 200.0  # readout sampling interval, s
    mode: str = "product_and_substrate"
    task: str = "B"
    taskA_interp: str = "seconds"
    normalize_by: str = "target_range"
    ridge: float = 0.0
    master_seed: int = 0
    n_trials: int = 100

    def __post_init__(self):
        _require(self.influx_base >= 0, "influx_base", "must be >= 0", self.influx_base)
        _require(self.tau > 0, "tau", "must be > 0", self.tau)
        for name in ("settle_s", "train_s", "test_s"):
            _require(getattr(self, name) > 0, name, "must be > 0", getattr(self, name))
        _require(self.dt > 0, "dt", "must be > 0", self.dt)
        _require(self.dt_sample > 0, "dt_sample", "must be > 0", self.dt_sample)
        _require(self.stride > 0, "stride", "must be > 0", self.stride)
        _require(self.mode in READOUT_MODES, "mode", f"must be one of {READOUT_MODES}", self.mode)
        _require(self.task in TASKS, "task", f"must be one of {TASKS}", self.task)
        _require(self.taskA_interp in TASK_A_INTERPS, "taskA_interp",
                 f"must be one of {TASK_A_INTERPS}", self.taskA_interp)
        _require(self.normalize_by in NORMALIZERS, "normalize_by",
                 f"must be one of {NORMALIZERS}", self.normalize_by)
        _require(self.ridge >= 0, "ridge", "must be >= 0", self.ridge)
        _require(self.n_trials >= 1, "n_trials", "must be >= 1", self.n_trials)

    @property
    def t_end(self) -> float:
        return self.settle_s + self.train_s + self.test_s

    def initial_state(self) -> ChemState:
        return ChemState(t=0.0, P=np.asarray(self.initial_P), S=np.asarray(self.initial_S))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["reactor"] = {"V": self.reactor.V, "e": self.reactor.e, "h": self.reactor.h,
                        "beta": self.reactor.beta, "G": list(self.reactor.G)}
        d["initial"] = {"P": list(self.initial_P), "S": list(self.initial_S)}
        del d["initial_P"], d["initial_S"]
        return d


def _require(cond: bool, key: str, constraint: str, value):
    if not cond:
        raise ConfigError(f"config key {key!r} {constraint} (got {value!r})")


class ConfigError(ValueError):
    pass


_REACTOR_KEYS = ("V", "e", "h", "beta", "G")
_INITIAL_KEYS = ("P", "S")


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from a (possibly partial) plain dict.

    Unknown keys are rejected so typos do not silently fall back to
    defaults; missing keys take the reference protocol values.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"config must be a JSON object, got {type(data).__name__}")
    known = {f.name for f in fields(ExperimentConfig)} - {"initial_P", "initial_S"}
    known |= {"initial"}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")

    kwargs = {}
    if "reactor" in data:
        sub = data["reactor"]
        for key in sub:
            if key not in _REACTOR_KEYS:
                raise ConfigError(f"unknown config key 'reactor.{key}'")
        try:
            kwargs["reactor"] = ReactorParams(**{k: sub[k] for k in _REACTOR_KEYS if k in sub})
        except ValueError as exc:
            raise ConfigError(f"config key 'reactor': {exc}") from exc
    if "initial" in data:
        sub = data["initial"]
        for key in sub:
            if key not in _INITIAL_KEYS:
                raise ConfigError(f"unknown config key 'initial.{key}'")
        if "P" in sub:
            kwargs["initial_P"] = tuple(float(x) for x in sub["P"])
        if "S" in sub:
            kwargs["initial_S"] = tuple(float(x) for x in sub["S"])

    for f in fields(ExperimentConfig):
        if f.name in ("reactor", "initial_P", "initial_S") or f.name not in data:
            continue
        value = data[f.name]
        if f.name in ("mode", "task", "taskA_interp", "normalize_by"):
            kwargs[f.name] = str(value)
        elif f.name in ("master_seed", "n_trials"):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"config key {f.name!r} must be an integer (got {value!r})")
            kwargs[f.name] = value
        else:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"config key {f.name!r} must be a number (got {value!r})")
            kwargs[f.name] = float(value)
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    """Load a JSON config file, filling missing keys with defaults."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def save_config(config: ExperimentConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")
