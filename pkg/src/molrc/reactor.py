"""Reduced deoxyribozyme oscillator network in an open microfluidic reactor.

Three immobilized gates cleave their substrates into products; each product
inhibits the next gate around the cycle (P3 -> gate 1, P1 -> gate 2,
P2 -> gate 3). The reactor is a continuously stirred open chamber: substrate
flows in at per-species rates Sm_i (nmol/s) and everything washes out at
efflux rate e. Concentrations are in nM, time in seconds.

Rates, for i = 1..3 with j the cyclic inhibitor index:

    dP_i/dt = h*beta*S_i*(G_i - P_j) - (e/V)*P_i
    dS_i/dt = KAPPA*Sm_i/V - h*beta*S_i*(G_i - P_j) - (e/V)*S_i

KAPPA converts the influx term to nM/s: Sm/V has units nmol/(nL*s) =
mol/(L*s), so KAPPA = 1e9 nM per (nmol/nL).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernel import rk4_integrate

# nM per (nmol/nL); see module docstring
KAPPA = 1e9

# gate i sees product INHIBITOR_OF_GATE[i] (0-based: P3->gate1, P1->gate2, P2->gate3)
INHIBITOR_OF_GATE = (2, 0, 1)


class IntegrationDivergedError(RuntimeError):
    """Raised when the fixed-step integration produces a non-finite value."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(
            f"integration produced a non-finite state at t={t:g} s "
            "(dt too large or invalid parameters)"
        )


def _as_vec3(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class ReactorParams:
    """Physical constants of the open reactor.

    Defaults are the reference microreactor values: V=7.54 nL, efflux
    e=8.8750e-2 nL/s, well-mixed fraction h=0.7849, gate-substrate rate
    constant beta=5e-7 1/(nM s), gate concentrations 2500 nM.
    """

    V: float = 7.54
    e: float = 8.8750e-2
    h: float = 0.7849
    beta: float = 5e-7
    G: tuple[float, float, float] = (2500.0, 2500.0, 2500.0)

    def __post_init__(self):
        object.__setattr__(self, "G", tuple(float(g) for g in _as_vec3(self.G, "G")))
        if not (self.V > 0):
            raise ValueError(f"ReactorParams.V must be > 0, got {self.V}")
        if not (self.e >= 0):
            raise ValueError(f"ReactorParams.e must be >= 0, got {self.e}")
        if not (0 < self.h <= 1):
            raise ValueError(f"ReactorParams.h must be in (0, 1], got {self.h}")
        if not (self.beta > 0):
            raise ValueError(f"ReactorParams.beta must be > 0, got {self.beta}")
        if not all(g > 0 for g in self.G):
            raise ValueError(f"ReactorParams.G entries must be > 0, got {self.G}")
        for name in ("V", "e", "h", "beta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"ReactorParams.{name} is not finite")

    @property
    def efflux_rate(self) -> float:
        """e/V in 1/s."""
        return self.e / self.V

    @property
    def hbeta(self) -> float:
        """h*beta in 1/(nM s)."""
        return self.h * self.beta


@dataclass(frozen=True)
class ChemState:
    """Concentrations of the three products and three substrates at time t."""

    t: float
    P: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "P", _as_vec3(self.P, "P"))
        object.__setattr__(self, "S", _as_vec3(self.S, "S"))

    @classmethod
    def initial(cls, p1: float = 1000.0) -> "ChemState":
        """Symmetry-breaking start: P = (p1, 0, 0) nM, substrates empty."""
        return cls(t=0.0, P=np.array([p1, 0.0, 0.0]), S=np.zeros(3))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.P, self.S])


@dataclass(frozen=True)
class InfluxProfile:
    """Piecewise-constant substrate-influx schedule (the input signal).

    Channels not selected by `channel` flow at their base rate at all times.
    The selected channel flows at base before start_time and at
    base * values[k] inside window k = floor((t - start_time)/hold_time);
    windows are left-closed, [start + k*hold, start + (k+1)*hold). Past the
    last window the final multiplier is held.
    """

    base: tuple[float, float, float]
    hold_time: float = 100.0
    start_time: float = 0.0
    values: tuple[float, ...] = ()
    channel: int = 0  # 0-based; channel 0 is substrate species 1

    def __post_init__(self):
        object.__setattr__(
            self, "base", tuple(float(b) for b in _as_vec3(self.base, "base"))
        )
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not (self.hold_time > 0):
            raise ValueError(f"InfluxProfile.hold_time must be > 0, got {self.hold_time}")
        if self.channel not in (0, 1, 2):
            raise ValueError(f"InfluxProfile.channel must be 0, 1 or 2, got {self.channel}")
        if any(b < 0 for b in self.base):
            raise ValueError(f"InfluxProfile.base entries must be >= 0, got {self.base}")
        if any(not (0.0 <= v <= 1.0) for v in self.values):
            raise ValueError("InfluxProfile.values must lie in [0, 1]")

    @classmethod
    def constant(cls, base) -> "InfluxProfile":
        """Constant influx at the base rates, no fluctuation."""
        b = _as_vec3(base, "base")
        return cls(base=tuple(b))

    def channel_rate(self, t):
        """Influx rate (nmol/s) of the fluctuated channel at time(s) t."""
        t = np.asarray(t, dtype=float)
        base = self.base[self.channel]
        if not self.values:
            return np.full(t.shape, base) if t.shape else float(base)
        k = np.floor((t - self.start_time) / self.hold_time).astype(np.int64)
        k = np.clip(k, 0, len(self.values) - 1)
        mult = np.where(t < self.start_time, 1.0, np.asarray(self.values)[k])
        out = base * mult
        return out if out.shape else float(out)

    def rate(self, t: float) -> np.ndarray:
        """All three influx rates (nmol/s) at time t."""
        out = np.array(self.base, dtype=float)
        out[self.channel] = self.channel_rate(float(t))
        return out

    def rates_on_grid(self, t0: float, dt: float, n_steps: int) -> np.ndarray:
        """(n_steps, 3) influx rates at the step start times t0 + k*dt."""
        t = t0 + dt * np.arange(n_steps)
        out = np.tile(np.asarray(self.base), (n_steps, 1))
        out[:, self.channel] = self.channel_rate(t)
        return out

    def window_values(self) -> np.ndarray:
        """Per-window influx values base * values[k] of the fluctuated channel."""
        return self.base[self.channel] * np.asarray(self.values)


@dataclass(frozen=True)
class ChemTrace:
    """Equally spaced samples of an integration run.

    times[k] = times[0] + k * dt_sample; concentrations[k] holds
    (P1, P2, P3, S1, S2, S3) in nM. guard_violations counts integration
    steps in which any gate-occupancy factor (G_i - P_j) was clamped at 0;
    negative_clamps counts concentration entries clamped up to 0.
    """

    dt_sample: float
    times: np.ndarray
    concentrations: np.ndarray
    guard_violations: int = 0
    negative_clamps: int = 0

    def __len__(self) -> int:
        return len(self.times)

    @property
    def P(self) -> np.ndarray:
        return self.concentrations[:, :3]

    @property
    def S(self) -> np.ndarray:
        return self.concentrations[:, 3:]

    def state(self, i: int) -> ChemState:
        return ChemState(
            t=float(self.times[i]),
            P=self.concentrations[i, :3].copy(),
            S=self.concentrations[i, 3:].copy(),
        )


def derivatives(state: ChemState, params: ReactorParams, influx) -> tuple[np.ndarray, int]:
    """Time derivatives (dP1, dP2, dP3, dS1, dS2, dS3) in nM/s.

    influx is the 3-vector of substrate influx rates in nmol/s. Negative
    gate-occupancy factors are clamped at 0; the number of clamped gates is
    returned alongside the rates.
    """
    influx = _as_vec3(influx, "influx")
    for name, vec in (("P", state.P), ("S", state.S), ("influx", influx)):
        bad = np.where(~np.isfinite(vec))[0]
        if bad.size:
            raise ValueError(f"non-finite value in {name}[{bad[0]}]")

    occupancy = np.asarray(params.G) - state.P[list(INHIBITOR_OF_GATE)]
    clamped = int(np.sum(occupancy < 0.0))
    occupancy = np.maximum(occupancy, 0.0)

    reaction = params.hbeta * state.S * occupancy
    e_over_v = params.efflux_rate
    dP = reaction - e_over_v * state.P
    dS = KAPPA * influx / params.V - reaction - e_over_v * state.S
    return np.concatenate([dP, dS]), clamped


def _check_grid_multiple(value: float, dt: float, name: str) -> int:
    n = round(value / dt)
    if n < 1 or abs(value - n * dt) > 1e-9:
        raise ValueError(f"{name}={value!r} is not a positive multiple of dt={dt!r}")
    return n


def integrate(
    state0: ChemState,
    params: ReactorParams,
    influx: InfluxProfile,
    t_end: float,
    dt: float = 0.05,
    dt_sample: float = 1.0,
) -> ChemTrace:
    """Integrate the network with classical fixed-step RK4.

    The influx profile is evaluated once per step, at the step's start time,
    so input windows (which must be aligned to the dt grid) never change in
    the middle of a step. After each step, negative concentrations are
    clamped to 0 and counted. The trace begins with state0 and stores one
    row every dt_sample seconds.
    """
    if not (dt > 0):
        raise ValueError(f"dt must be > 0, got {dt}")
    if not (t_end > state0.t):
        raise ValueError(f"t_end={t_end} must exceed the initial time {state0.t}")
    sample_every = _check_grid_multiple(dt_sample, dt, "dt_sample")
    n_steps = _check_grid_multiple(t_end - state0.t, dt, "t_end - t0")
    if n_steps % sample_every:
        raise ValueError(
            f"t_end - t0 = {t_end - state0.t!r} must be a multiple of dt_sample={dt_sample!r}"
        )
    if influx.values:
        for name, value in (("start_time", influx.start_time - state0.t),
                            ("hold_time", influx.hold_time)):
            if abs(value - round(value / dt) * dt) > 1e-9:
                raise ValueError(f"influx {name} is not aligned to the dt grid")

    influx_nm = KAPPA * influx.rates_on_grid(state0.t, dt, n_steps) / params.V
    samples, guard_steps, neg_clamps, fail_step = rk4_integrate(
        state0.as_vector(),
        influx_nm,
        dt,
        n_steps,
        sample_every,
        params.hbeta,
        params.efflux_rate,
        params.G[0],
        params.G[1],
        params.G[2],
    )
    if fail_step >= 0:
        raise IntegrationDivergedError(state0.t + (fail_step + 1) * dt)

    times = state0.t + dt_sample * np.arange(samples.shape[0])
    return ChemTrace(
        dt_sample=dt_sample,
        times=times,
        concentrations=samples,
        guard_violations=int(guard_steps),
        negative_clamps=int(neg_clamps),
    )


TRACE_CSV_HEADER = "t,P1,P2,P3,S1,S2,S3,Sm1"


def write_trace_csv(trace: ChemTrace, influx: InfluxProfile, fh, metadata: dict | None = None):
    """Write a trace as CSV: t, six concentrations, channel-1 influx.

    metadata entries, if given, are emitted first as '# key: value' comment
    lines so exported files are self-describing; the header line is the
    first non-comment line.
    """
    if metadata:
        for key, value in metadata.items():
            fh.write(f"# {key}: {value}\n")
    fh.write(TRACE_CSV_HEADER + "\n")
    if influx.channel == 0:
        sm1 = np.atleast_1d(influx.channel_rate(trace.times))
    else:
        sm1 = np.full(len(trace), influx.base[0])  # species 1 stays at base
    for i in range(len(trace)):
        row = [trace.times[i], *trace.concentrations[i], sm1[i]]
        fh.write(",".join(f"{x:.9g}" for x in row) + "\n")
