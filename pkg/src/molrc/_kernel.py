"""Compiled RK4 inner loop for the oscillator network.

Kept separate so the public module stays importable/readable without caring
about numba; everything here operates on plain float64 arrays.
"""

import numba
import numpy as np

# state layout: y = [P1, P2, P3, S1, S2, S3]
# gate i is occupied by the cyclically previous product: P3 -> gate 1,
# P1 -> gate 2, P2 -> gate 3.


@numba.njit(cache=True)
def rk4_integrate(y0, influx_nm, dt, n_steps, sample_every, hb, e_over_v, g1, g2, g3):
    """Fixed-step classical RK4 over n_steps.

    influx_nm holds the per-step influx already converted to nM/s, one row
    per step, evaluated at the step's start time (input windows are aligned
    to the step grid, so the value is constant across the four stages).

    Returns (samples, guard_steps, neg_clamps, fail_step); fail_step is -1
    on success, otherwise the index of the step that produced a non-finite
    value.
    """
    n_samples = n_steps // sample_every + 1
    out = np.empty((n_samples, 6))
    y = y0.copy()
    for i in range(6):
        out[0, i] = y[i]

    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    yt = np.empty(6)
    guard_steps = 0
    neg_clamps = 0
    idx = 1

    for step in range(n_steps):
        in1 = influx_nm[step, 0]
        in2 = influx_nm[step, 1]
        in3 = influx_nm[step, 2]
        gate_clamped = False

        for stage in range(4):
            if stage == 0:
                src = y
            elif stage == 1:
                for i in range(6):
                    yt[i] = y[i] + 0.5 * dt * k1[i]
                src = yt
            elif stage == 2:
                for i in range(6):
                    yt[i] = y[i] + 0.5 * dt * k2[i]
                src = yt
            else:
                for i in range(6):
                    yt[i] = y[i] + dt * k3[i]
                src = yt

            occ1 = g1 - src[2]
            occ2 = g2 - src[0]
            occ3 = g3 - src[1]
            if occ1 < 0.0:
                occ1 = 0.0
                gate_clamped = True
            if occ2 < 0.0:
                occ2 = 0.0
                gate_clamped = True
            if occ3 < 0.0:
                occ3 = 0.0
                gate_clamped = True

            r1 = hb * src[3] * occ1
            r2 = hb * src[4] * occ2
            r3 = hb * src[5] * occ3

            if stage == 0:
                dst = k1
            elif stage == 1:
                dst = k2
            elif stage == 2:
                dst = k3
            else:
                dst = k4
            dst[0] = r1 - e_over_v * src[0]
            dst[1] = r2 - e_over_v * src[1]
            dst[2] = r3 - e_over_v * src[2]
            dst[3] = in1 - r1 - e_over_v * src[3]
            dst[4] = in2 - r2 - e_over_v * src[4]
            dst[5] = in3 - r3 - e_over_v * src[5]

        for i in range(6):
            y[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not np.isfinite(y[i]):
                return out, guard_steps, neg_clamps, step
            if y[i] < 0.0:
                y[i] = 0.0
                neg_clamps += 1

        if gate_clamped:
            guard_steps += 1

        if (step + 1) % sample_every == 0:
            for i in range(6):
                out[idx, i] = y[i]
            idx += 1

    return out, guard_steps, neg_clamps, -1
