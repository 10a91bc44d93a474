"""Linearized analysis of the oscillator network.

The product dynamics linearized at substrate levels (S1, S2, S3) have a
3x3 Jacobian with -e/V on the diagonal and the cyclic gate couplings
-h*beta*S_i off it. Its eigenvalues in closed form, with
m = (S1*S2*S3)^(1/3):

    lambda_1   = -h*beta*m - e/V
    lambda_2,3 = h*beta*m/2 - e/V +- i*(sqrt(3)/2)*h*beta*m

The complex pair crosses the imaginary axis at the uniform substrate level
S* = 2*(e/V)/(h*beta): below it oscillations damp out, above they grow, at
it they are sustained with period 2*pi / ((sqrt(3)/2)*h*beta*m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .reactor import INHIBITOR_OF_GATE, ChemTrace, ReactorParams, _as_vec3

REGIME_DAMPED = "damped"
REGIME_SUSTAINED = "sustained"
REGIME_GROWING = "growing"
NO_OSCILLATION = "no_oscillation"

# |Re lambda_2| below this counts as sustained (1/s)
EPS_REGIME = 1e-5


@dataclass(frozen=True)
class EigenResult:
    """Closed-form eigenvalues of the linearized product dynamics."""

    lambda1: float
    lambda23_real: float
    lambda23_imag: float
    period: float
    regime: str


def jacobian(params: ReactorParams, S) -> np.ndarray:
    """3x3 Jacobian of the product rates at substrate levels S (rows P1..P3)."""
    S = _as_vec3(S, "S")
    if np.any(S < 0):
        raise ValueError(f"substrate levels must be >= 0, got {S}")
    J = -params.efflux_rate * np.eye(3)
    for i, j in enumerate(INHIBITOR_OF_GATE):
        J[i, j] = -params.hbeta * S[i]
    return J


def eigen_closed_form(params: ReactorParams, S, eps_regime: float = EPS_REGIME) -> EigenResult:
    """Closed-form eigenvalues, oscillation period and regime at levels S."""
    S = _as_vec3(S, "S")
    if np.any(S < 0):
        raise ValueError(f"substrate levels must be >= 0, got {S}")
    m = float(np.cbrt(S[0] * S[1] * S[2]))
    hbm = params.hbeta * m
    e_over_v = params.efflux_rate
    re = 0.5 * hbm - e_over_v
    im = (math.sqrt(3.0) / 2.0) * hbm
    period = 2.0 * math.pi / im if im > 0 else math.inf
    if re < -eps_regime:
        regime = REGIME_DAMPED
    elif re > eps_regime:
        regime = REGIME_GROWING
    else:
        regime = REGIME_SUSTAINED
    return EigenResult(
        lambda1=-hbm - e_over_v,
        lambda23_real=re,
        lambda23_imag=im,
        period=period,
        regime=regime,
    )


def sustained_substrate_level(params: ReactorParams) -> float:
    """Uniform substrate level S* (nM) with a zero-real-part complex pair."""
    return 2.0 * params.efflux_rate / params.hbeta


def find_peaks(trace: ChemTrace, discard_s: float = 500.0, species: int = 0):
    """Local maxima of one product channel after a discarded transient.

    A sample is a peak when it strictly exceeds both neighbours (3-sample
    window). Returns (peak_times, peak_values).
    """
    sel = trace.times >= trace.times[0] + discard_s
    t = trace.times[sel]
    x = trace.P[sel, species]
    if len(x) < 3:
        return np.empty(0), np.empty(0)
    mid = (x[1:-1] > x[:-2]) & (x[1:-1] > x[2:])
    idx = np.where(mid)[0] + 1
    return t[idx], x[idx]


def classify_regime(trace: ChemTrace, discard_s: float = 500.0, delta: float = 0.1) -> str:
    """Empirical regime of a trace from the trend of P1 peak heights.

    Compares the last detected peak to the first: a drop by more than delta
    classifies as damped, a rise by more than delta as growing, otherwise
    sustained. Fewer than two peaks means no oscillation was detected.
    """
    _, peaks = find_peaks(trace, discard_s)
    if len(peaks) < 2 or peaks[0] <= 0:
        return NO_OSCILLATION
    ratio = peaks[-1] / peaks[0]
    if ratio < 1.0 - delta:
        return REGIME_DAMPED
    if ratio > 1.0 + delta:
        return REGIME_GROWING
    return REGIME_SUSTAINED
