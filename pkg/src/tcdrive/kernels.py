"""Compiled hot loops: fixed-step integration of the TC and drivetrain.

All time-stepping lives here as scalar-arithmetic kernels compiled with
numba's ``@njit``.  Setting the environment variable ``TCDRIVE_NO_NUMBA=1``
before import replaces ``njit`` with a no-op decorator so the identical
source runs as pure Python/NumPy — useful on platforms without a working
numba toolchain and for A/B benchmarking (see :mod:`tcdrive.benchmark`).

Kernels take a flat float64 parameter vector ``pp`` (layout documented in
:func:`tcdrive.params.pack_parameters`) plus precomputed mass-matrix
inverses, so the loops touch no Python objects and no trig beyond the
per-step stator-angle tangent.

State vector layouts
--------------------
TC-only kernels use ``x = (ω_t, ω_i, V)``.

The integrated kernel uses, for ``M`` gearbox stages::

    x[0 : M-1]        mesh joint twists φ_j
    x[M-1 : 2M-1]     gear body speeds ω_1..ω_M
    x[2M-1]           coupler-1 twist (gearbox → impeller)
    x[2M]             ω_i
    x[2M+1]           ω_t
    x[2M+2]           V
    x[2M+3]           coupler-2 twist (turbine → generator)
    x[2M+4]           generator rotor angle deviation δ
    x[2M+5]           generator speed ω_g
    x[2M+6 : 2M+6+2M] optional translational (x_k, v_k per stage)

In ideal-bus mode the generator block (coupler-2 twist, δ, ω_g) and ω_t are
held constant and the turbine reaction torque is reported instead.
"""

from __future__ import annotations

import math
import os

import numpy as np

NUMBA_DISABLED = os.environ.get("TCDRIVE_NO_NUMBA", "") == "1"

if not NUMBA_DISABLED:
    from numba import njit
else:  # pragma: no cover - exercised via subprocess in the benchmark tests

    def njit(*args, **kwargs):
        """No-op stand-in for numba.njit (TCDRIVE_NO_NUMBA=1)."""

        def decorate(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return decorate


def py_func(kernel):
    """Uncompiled Python version of a kernel (the kernel itself if no numba)."""
    return getattr(kernel, "py_func", kernel)


# Integrator codes for the run kernels.
RK4 = 0
EULER = 1

# Status codes returned by run kernels.
OK = 0
NON_FINITE = 1


# ---------------------------------------------------------------------------
# TC closures on the packed layout
# ---------------------------------------------------------------------------


@njit(cache=True)
def tc_rhs(pp, minv, w_t, w_i, V, tau_i, tau_t, tan_as, sec2_as):
    """Derivatives (ω̇_t, ω̇_i, V̇) of the three-state TC model."""
    rho = pp[0]
    A = pp[1]
    R_i = pp[3]
    R_t = pp[4]
    R_s = pp[5]
    tan_ai = pp[6]
    tan_at = pp[7]
    tan_ai_in = pp[8]
    tan_at_in = pp[9]
    tan_as_in = pp[10]
    sec2_ai = pp[11]
    sec2_at = pp[12]

    rho_Q = rho * V * A
    tau_i0 = rho_Q * (w_i * R_i * R_i + V * (R_i * tan_ai - R_s * tan_as))
    tau_t0 = rho_Q * (w_t * R_t * R_t - w_i * R_i * R_i + V * (R_t * tan_at - R_i * tan_ai))

    v_sh_i = -R_s * w_i + V * (tan_as - tan_ai_in)
    v_sh_t = R_i * (w_i - w_t) + V * (tan_ai - tan_at_in)
    v_sh_s = R_t * w_t + V * (tan_at - tan_as_in)
    v2 = V * V
    psi = 0.5 * (
        pp[13] * v_sh_i * v_sh_i
        + pp[14] * v_sh_t * v_sh_t
        + pp[15] * v_sh_s * v_sh_s
        + pp[16] * v2 * (sec2_ai + sec2_at + sec2_as)
    )
    phi_val = (
        R_i * R_i * w_i * w_i
        + R_t * R_t * w_t * w_t
        - R_i * R_i * w_t * w_i
        + w_i * V * (R_i * tan_ai - R_s * tan_as)
        + w_t * V * (R_t * tan_at - R_i * tan_ai)
        - psi
    )

    b0 = tau_t - tau_t0
    b1 = tau_i - tau_i0
    b2 = phi_val
    d_wt = minv[0, 0] * b0 + minv[0, 1] * b1 + minv[0, 2] * b2
    d_wi = minv[1, 0] * b0 + minv[1, 1] * b1 + minv[1, 2] * b2
    d_V = minv[2, 0] * b0 + minv[2, 1] * b1 + minv[2, 2] * b2
    return d_wt, d_wi, d_V


@njit(cache=True)
def tc_steady_torques(pp, w_t, w_i, V, tan_as):
    """(τ_i0, τ_t0) on the packed layout."""
    rho_Q = pp[0] * V * pp[1]
    R_i = pp[3]
    R_t = pp[4]
    tau_i0 = rho_Q * (w_i * R_i * R_i + V * (R_i * pp[6] - pp[5] * tan_as))
    tau_t0 = rho_Q * (w_t * R_t * R_t - w_i * R_i * R_i + V * (R_t * pp[7] - R_i * pp[6]))
    return tau_i0, tau_t0


# ---------------------------------------------------------------------------
# TC-only runs
# ---------------------------------------------------------------------------


@njit(cache=True)
def tc_run_const(pp, minv, x0, tau_i, tau_t, alpha_s, dt, n_steps, decimation, method):
    """Integrate the TC with constant torques and stator angle.

    Returns ``(trace, status, bad_step)`` where ``trace`` has rows
    ``(t, ω_t, ω_i, V)`` every ``decimation`` steps (row 0 = initial state).
    """
    tan_as = math.tan(alpha_s)
    sec2_as = 1.0 + tan_as * tan_as
    w_t = x0[0]
    w_i = x0[1]
    V = x0[2]
    n_rec = n_steps // decimation + 1
    trace = np.empty((n_rec, 4), dtype=np.float64)
    trace[0, 0] = 0.0
    trace[0, 1] = w_t
    trace[0, 2] = w_i
    trace[0, 3] = V
    row = 1
    for k in range(n_steps):
        if method == EULER:
            k1 = tc_rhs(pp, minv, w_t, w_i, V, tau_i, tau_t, tan_as, sec2_as)
            w_t += dt * k1[0]
            w_i += dt * k1[1]
            V += dt * k1[2]
        else:
            k1 = tc_rhs(pp, minv, w_t, w_i, V, tau_i, tau_t, tan_as, sec2_as)
            k2 = tc_rhs(pp, minv, w_t + 0.5 * dt * k1[0], w_i + 0.5 * dt * k1[1],
                        V + 0.5 * dt * k1[2], tau_i, tau_t, tan_as, sec2_as)
            k3 = tc_rhs(pp, minv, w_t + 0.5 * dt * k2[0], w_i + 0.5 * dt * k2[1],
                        V + 0.5 * dt * k2[2], tau_i, tau_t, tan_as, sec2_as)
            k4 = tc_rhs(pp, minv, w_t + dt * k3[0], w_i + dt * k3[1],
                        V + dt * k3[2], tau_i, tau_t, tan_as, sec2_as)
            w_t += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
            w_i += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
            V += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        if not (math.isfinite(w_t) and math.isfinite(w_i) and math.isfinite(V)):
            return trace[:row], NON_FINITE, k
        if (k + 1) % decimation == 0 and row < n_rec:
            trace[row, 0] = (k + 1) * dt
            trace[row, 1] = w_t
            trace[row, 2] = w_i
            trace[row, 3] = V
            row += 1
    return trace[:row], OK, -1


@njit(cache=True)
def tc_run_sin(pp, minv, x0, tau_ie, amp, omega_f, tau_t, alpha_s, dt,
               n_settle, n_measure):
    """TC run with τ_i = τ_ie + amp·sin(ω_f·t); min/max over the tail window.

    The measure window is the final quarter of the post-settle span.  Returns
    ``(extrema, final_state, status, bad_step)`` with ``extrema`` =
    (ω_t_min, ω_t_max, ω_i_min, ω_i_max).
    """
    tan_as = math.tan(alpha_s)
    sec2_as = 1.0 + tan_as * tan_as
    w_t = x0[0]
    w_i = x0[1]
    V = x0[2]
    n_total = n_settle + n_measure
    meas_from = n_settle + (3 * n_measure) // 4
    wt_min = np.inf
    wt_max = -np.inf
    wi_min = np.inf
    wi_max = -np.inf
    for k in range(n_total):
        t = k * dt
        f1 = tau_ie + amp * math.sin(omega_f * t)
        f2 = tau_ie + amp * math.sin(omega_f * (t + 0.5 * dt))
        f4 = tau_ie + amp * math.sin(omega_f * (t + dt))
        k1 = tc_rhs(pp, minv, w_t, w_i, V, f1, tau_t, tan_as, sec2_as)
        k2 = tc_rhs(pp, minv, w_t + 0.5 * dt * k1[0], w_i + 0.5 * dt * k1[1],
                    V + 0.5 * dt * k1[2], f2, tau_t, tan_as, sec2_as)
        k3 = tc_rhs(pp, minv, w_t + 0.5 * dt * k2[0], w_i + 0.5 * dt * k2[1],
                    V + 0.5 * dt * k2[2], f2, tau_t, tan_as, sec2_as)
        k4 = tc_rhs(pp, minv, w_t + dt * k3[0], w_i + dt * k3[1],
                    V + dt * k3[2], f4, tau_t, tan_as, sec2_as)
        w_t += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        w_i += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        V += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        if not (math.isfinite(w_t) and math.isfinite(w_i) and math.isfinite(V)):
            extrema = np.array([wt_min, wt_max, wi_min, wi_max])
            final = np.array([w_t, w_i, V])
            return extrema, final, NON_FINITE, k
        if k >= meas_from:
            if w_t < wt_min:
                wt_min = w_t
            if w_t > wt_max:
                wt_max = w_t
            if w_i < wi_min:
                wi_min = w_i
            if w_i > wi_max:
                wi_max = w_i
    extrema = np.array([wt_min, wt_max, wi_min, wi_max])
    final = np.array([w_t, w_i, V])
    return extrema, final, OK, -1


@njit(cache=True)
def tc_hold_drift(pp, minv, x0, tau_i, tau_t, alpha_s, dt, n_steps):
    """Max relative drift of each state from x0 over a constant-input run.

    Returns ``(drift, status, bad_step)`` with ``drift`` the per-state
    max |x(t) − x0| / max(|x0|, tiny).
    """
    tan_as = math.tan(alpha_s)
    sec2_as = 1.0 + tan_as * tan_as
    w_t = x0[0]
    w_i = x0[1]
    V = x0[2]
    ref0 = abs(x0[0]) if abs(x0[0]) > 1e-9 else 1e-9
    ref1 = abs(x0[1]) if abs(x0[1]) > 1e-9 else 1e-9
    ref2 = abs(x0[2]) if abs(x0[2]) > 1e-9 else 1e-9
    drift = np.zeros(3, dtype=np.float64)
    for k in range(n_steps):
        k1 = tc_rhs(pp, minv, w_t, w_i, V, tau_i, tau_t, tan_as, sec2_as)
        k2 = tc_rhs(pp, minv, w_t + 0.5 * dt * k1[0], w_i + 0.5 * dt * k1[1],
                    V + 0.5 * dt * k1[2], tau_i, tau_t, tan_as, sec2_as)
        k3 = tc_rhs(pp, minv, w_t + 0.5 * dt * k2[0], w_i + 0.5 * dt * k2[1],
                    V + 0.5 * dt * k2[2], tau_i, tau_t, tan_as, sec2_as)
        k4 = tc_rhs(pp, minv, w_t + dt * k3[0], w_i + dt * k3[1],
                    V + dt * k3[2], tau_i, tau_t, tan_as, sec2_as)
        w_t += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        w_i += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        V += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        if not (math.isfinite(w_t) and math.isfinite(w_i) and math.isfinite(V)):
            return drift, NON_FINITE, k
        d0 = abs(w_t - x0[0]) / ref0
        d1 = abs(w_i - x0[1]) / ref1
        d2 = abs(V - x0[2]) / ref2
        if d0 > drift[0]:
            drift[0] = d0
        if d1 > drift[1]:
            drift[1] = d1
        if d2 > drift[2]:
            drift[2] = d2
    return drift, OK, -1


# ---------------------------------------------------------------------------
# Integrated drivetrain run
# ---------------------------------------------------------------------------

IDEAL_BUS = 0
SWING = 1

# Record-layout constants: fixed head columns, then per-model blocks.
HEAD_COLS = 8  # t, omega_i, omega_t, V, alpha_s, tau_rotor, tau_i_ext, tau_t_ext
GOV_COLS = 5  # err, p, i, d, raw


@njit(cache=True)
def _drivetrain_rhs(x, dx, t, M, Jg, rg, kj, cj, kc1, cc1, kc2, cc2,
                    Jgen, Dgen, Ksync, wsync, pp, minv, m2inv, mode,
                    tau_base, step_time, step_delta, sin_amp, sin_omega,
                    tan_as, sec2_as, with_tr, tr_m, tr_k, tr_c):
    """Fill dx in place; return (tau_rotor, T_c1, tau_t_applied)."""
    tau_rotor = tau_base + sin_amp * math.sin(sin_omega * t)
    if t >= step_time:
        tau_rotor += step_delta

    w_i = x[2 * M]
    w_t = x[2 * M + 1]
    V = x[2 * M + 2]

    # Coupler 1: gearbox stage-M output end -> impeller.
    slip_c1 = x[2 * M - 2] / rg[M - 1] - w_i
    T_c1 = kc1 * x[2 * M - 1] + cc1 * slip_c1
    dx[2 * M - 1] = slip_c1

    # Gear chain: joint j couples body j (via its output end) to body j+1.
    for j in range(M - 1):
        slip = x[M - 1 + j] / rg[j] - x[M + j]
        Tj = kj[j] * x[j] + cj[j] * slip
        dx[j] = slip
        dx[M - 1 + j] -= Tj / rg[j] / Jg[j]
        dx[M + j] += Tj / Jg[j + 1]
    dx[M - 1] += tau_rotor / Jg[0]
    dx[2 * M - 2] -= T_c1 / rg[M - 1] / Jg[M - 1]

    if mode == SWING:
        w_g = x[2 * M + 5]
        slip_c2 = w_t - w_g
        T_c2 = kc2 * x[2 * M + 3] + cc2 * slip_c2
        dx[2 * M + 3] = slip_c2
        tau_t_ext = -T_c2
        d = tc_rhs(pp, minv, w_t, w_i, V, T_c1, tau_t_ext, tan_as, sec2_as)
        dx[2 * M + 1] = d[0]
        dx[2 * M] = d[1]
        dx[2 * M + 2] = d[2]
        dx[2 * M + 4] = w_g - wsync
        tau_e = Ksync * x[2 * M + 4] + Dgen * (w_g - wsync)
        dx[2 * M + 5] = (T_c2 - tau_e) / Jgen
    else:
        # Ideal bus: ω_t pinned; reduced 2x2 solve for (ω_i, V).
        tau_i0, tau_t0 = tc_steady_torques(pp, w_t, w_i, V, tan_as)
        v_sh_i = -pp[5] * w_i + V * (tan_as - pp[8])
        v_sh_t = pp[3] * (w_i - w_t) + V * (pp[6] - pp[9])
        v_sh_s = pp[4] * w_t + V * (pp[7] - pp[10])
        v2 = V * V
        psi = 0.5 * (pp[13] * v_sh_i * v_sh_i + pp[14] * v_sh_t * v_sh_t
                     + pp[15] * v_sh_s * v_sh_s
                     + pp[16] * v2 * (pp[11] + pp[12] + sec2_as))
        phi_val = (pp[3] * pp[3] * w_i * w_i + pp[4] * pp[4] * w_t * w_t
                   - pp[3] * pp[3] * w_t * w_i
                   + w_i * V * (pp[3] * pp[6] - pp[5] * tan_as)
                   + w_t * V * (pp[4] * pp[7] - pp[3] * pp[6]) - psi)
        b0 = T_c1 - tau_i0
        dx[2 * M] = m2inv[0, 0] * b0 + m2inv[0, 1] * phi_val
        dx[2 * M + 2] = m2inv[1, 0] * b0 + m2inv[1, 1] * phi_val
        dx[2 * M + 1] = 0.0
        dx[2 * M + 3] = 0.0
        dx[2 * M + 4] = 0.0
        dx[2 * M + 5] = 0.0
        # Reaction torque holding ω_t: τ_t = τ_t0 + ρ·A·S_t·V̇.
        tau_t_ext = tau_t0 + pp[0] * pp[1] * pp[20] * dx[2 * M + 2]

    if with_tr == 1:
        base = 2 * M + 6
        for m in range(M):
            # Net mesh torque on body m drives its translational DOF
            # through a 1 m reference radius.
            F = 0.0
            if m > 0:
                F += kj[m - 1] * x[m - 1] + cj[m - 1] * (
                    x[M - 1 + m - 1] / rg[m - 1] - x[M + m - 1])
            if m < M - 1:
                F -= (kj[m] * x[m] + cj[m] * (x[M - 1 + m] / rg[m] - x[M + m])) / rg[m]
            xi = x[base + 2 * m]
            vi = x[base + 2 * m + 1]
            dx[base + 2 * m] = vi
            dx[base + 2 * m + 1] = (F - tr_k[m] * xi - tr_c[m] * vi) / tr_m[m]

    return tau_rotor, T_c1, tau_t_ext


@njit(cache=True)
def integrated_run(M, Jg, rg, kj, cj, kc1, cc1, kc2, cc2,
                   Jgen, Dgen, Ksync, wsync, pp, minv, m2inv, mode,
                   x0, tau_base, step_time, step_delta, sin_amp, sin_omega,
                   gov_enabled, kp, ki, kd, rate, amin, amax, alpha0, integ0,
                   dt, n_steps, decimation, method,
                   with_tr, tr_m, tr_k, tr_c):
    """Closed-loop drivetrain integration with a discrete per-step governor.

    Returns ``(trace, status, bad_step)``.  Trace columns: the fixed head
    (t, ω_i, ω_t, V, α_s, τ_rotor, τ_i_ext, τ_t_ext), then ω of each gear
    body (M), joint twists (M−1), coupler twists (2), δ, ω_g, governor
    internals (err, P, I, D, raw), then optional (x_k, v_k) per stage.
    """
    nx = x0.shape[0]
    x = x0.copy()
    dx = np.zeros(nx, dtype=np.float64)
    k1 = np.zeros(nx, dtype=np.float64)
    k2 = np.zeros(nx, dtype=np.float64)
    k3 = np.zeros(nx, dtype=np.float64)
    k4 = np.zeros(nx, dtype=np.float64)
    xs = np.zeros(nx, dtype=np.float64)

    ncols = HEAD_COLS + M + (M - 1) + 2 + 2 + GOV_COLS + (2 * M if with_tr == 1 else 0)
    n_rec = n_steps // decimation + 1
    trace = np.empty((n_rec, ncols), dtype=np.float64)

    # Governor discrete state.
    alpha = alpha0
    integ = integ0
    prev_err = 0.0
    d_filt = 0.0
    t_filt = 10.0 * dt
    gov_err = 0.0
    gov_raw = alpha0

    row = 0
    for k in range(n_steps + 1):
        t = k * dt

        # --- governor update (zero-order hold over the step) ---
        if gov_enabled == 1 and k > 0:
            err = x[2 * M + 1] - wsync
            d_raw = (err - prev_err) / dt
            d_filt += (dt / (t_filt + dt)) * (d_raw - d_filt)
            integ_cand = integ + ki * err * dt
            raw = integ_cand + kp * err + kd * d_filt
            lo_r = alpha - rate * dt
            hi_r = alpha + rate * dt
            cmd = raw
            if cmd < lo_r:
                cmd = lo_r
            if cmd > hi_r:
                cmd = hi_r
            if cmd < amin:
                cmd = amin
            if cmd > amax:
                cmd = amax
            # Clamping anti-windup: commit the integrator only while the
            # command is not pinned at a bound.
            if not ((cmd >= amax and raw > cmd) or (cmd <= amin and raw < cmd)):
                integ = integ_cand
            prev_err = err
            alpha = cmd
            gov_err = err
            gov_raw = raw
        tan_as = math.tan(alpha)
        sec2_as = 1.0 + tan_as * tan_as

        # --- record ---
        if k % decimation == 0 and row < n_rec:
            for i in range(nx):
                dx[i] = 0.0
            tau_rotor, T_c1, tau_t_ext = _drivetrain_rhs(
                x, dx, t, M, Jg, rg, kj, cj, kc1, cc1, kc2, cc2,
                Jgen, Dgen, Ksync, wsync, pp, minv, m2inv, mode,
                tau_base, step_time, step_delta, sin_amp, sin_omega,
                tan_as, sec2_as, with_tr, tr_m, tr_k, tr_c)
            c = 0
            trace[row, c] = t; c += 1
            trace[row, c] = x[2 * M]; c += 1
            trace[row, c] = x[2 * M + 1]; c += 1
            trace[row, c] = x[2 * M + 2]; c += 1
            trace[row, c] = alpha; c += 1
            trace[row, c] = tau_rotor; c += 1
            trace[row, c] = T_c1; c += 1
            trace[row, c] = tau_t_ext; c += 1
            for m in range(M):
                trace[row, c] = x[M - 1 + m]; c += 1
            for j in range(M - 1):
                trace[row, c] = x[j]; c += 1
            trace[row, c] = x[2 * M - 1]; c += 1
            trace[row, c] = x[2 * M + 3]; c += 1
            trace[row, c] = x[2 * M + 4]; c += 1
            trace[row, c] = x[2 * M + 5]; c += 1
            trace[row, c] = gov_err; c += 1
            trace[row, c] = kp * gov_err; c += 1
            trace[row, c] = integ; c += 1
            trace[row, c] = kd * d_filt; c += 1
            trace[row, c] = gov_raw; c += 1
            if with_tr == 1:
                base = 2 * M + 6
                for m in range(2 * M):
                    trace[row, c] = x[base + m]; c += 1
            row += 1
        if k == n_steps:
            break

        # --- integrate one step ---
        if method == EULER:
            for i in range(nx):
                k1[i] = 0.0
            _drivetrain_rhs(x, k1, t, M, Jg, rg, kj, cj, kc1, cc1, kc2, cc2,
                            Jgen, Dgen, Ksync, wsync, pp, minv, m2inv, mode,
                            tau_base, step_time, step_delta, sin_amp, sin_omega,
                            tan_as, sec2_as, with_tr, tr_m, tr_k, tr_c)
            for i in range(nx):
                x[i] += dt * k1[i]
        else:
            for i in range(nx):
                k1[i] = 0.0
            _drivetrain_rhs(x, k1, t, M, Jg, rg, kj, cj, kc1, cc1, kc2, cc2,
                            Jgen, Dgen, Ksync, wsync, pp, minv, m2inv, mode,
                            tau_base, step_time, step_delta, sin_amp, sin_omega,
                            tan_as, sec2_as, with_tr, tr_m, tr_k, tr_c)
            for i in range(nx):
                xs[i] = x[i] + 0.5 * dt * k1[i]
                k2[i] = 0.0
            _drivetrain_rhs(xs, k2, t + 0.5 * dt, M, Jg, rg, kj, cj, kc1, cc1,
                            kc2, cc2, Jgen, Dgen, Ksync, wsync, pp, minv, m2inv,
                            mode, tau_base, step_time, step_delta, sin_amp,
                            sin_omega, tan_as, sec2_as, with_tr, tr_m, tr_k, tr_c)
            for i in range(nx):
                xs[i] = x[i] + 0.5 * dt * k2[i]
                k3[i] = 0.0
            _drivetrain_rhs(xs, k3, t + 0.5 * dt, M, Jg, rg, kj, cj, kc1, cc1,
                            kc2, cc2, Jgen, Dgen, Ksync, wsync, pp, minv, m2inv,
                            mode, tau_base, step_time, step_delta, sin_amp,
                            sin_omega, tan_as, sec2_as, with_tr, tr_m, tr_k, tr_c)
            for i in range(nx):
                xs[i] = x[i] + dt * k3[i]
                k4[i] = 0.0
            _drivetrain_rhs(xs, k4, t + dt, M, Jg, rg, kj, cj, kc1, cc1,
                            kc2, cc2, Jgen, Dgen, Ksync, wsync, pp, minv, m2inv,
                            mode, tau_base, step_time, step_delta, sin_amp,
                            sin_omega, tan_as, sec2_as, with_tr, tr_m, tr_k, tr_c)
            for i in range(nx):
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        for i in range(nx):
            if not math.isfinite(x[i]):
                return trace[:row], NON_FINITE, k
    return trace[:row], OK, -1
