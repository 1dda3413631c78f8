"""Fixed-step simulation engine and canned experiments.

Four experiments cover the toolkit's studies:

* :func:`run_tc_transient` — the bare three-state TC under constant inputs;
* :func:`run_frequency_sweep` — TC-only response to sinusoidal impeller
  torque disturbances across a log-spaced frequency grid (low-pass
  validation);
* :func:`run_torque_ratio_curve` — the classic torque-ratio vs speed-ratio
  characteristic at a fixed stator angle;
* :func:`run_integrated` — the full gearbox + couplers + TC + generator
  chain with the discrete stator-vane governor in the loop.

All integration is explicit fixed-step (classic RK4 by default, forward
Euler selectable) and fully deterministic: identical configurations produce
bitwise-identical traces on one platform.  The ideal-bus generator boundary
assigns ``ω̇_t = 0`` and reports the implied reaction torque instead of
solving a DAE, introducing O(dt) constraint error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .drivetrain import DrivetrainConfig, EquilibriumInit, equilibrium_init, kernel_args
from .errors import NonFiniteState, NoPhysicalRoot, ValidationError
from .governor import GovernorConfig
from .params import TcParameters, TcState, pack_parameters
from .rootfind import bracketed_root, quadratic_roots
from .steady_state import SteadyPoint
from .tc_core import mass_matrix, steady_impeller_torque, steady_turbine_torque

__all__ = [
    "SimConfig",
    "SimTrace",
    "RotorProfile",
    "FrequencySweepSpec",
    "FrequencyPoint",
    "FrequencySweepResult",
    "TorqueCurvePoint",
    "TorqueCurveResult",
    "IntegratedResult",
    "step",
    "solve_flow_from_power_balance",
    "solve_torque_equilibrium",
    "frequency_grid",
    "run_tc_transient",
    "run_frequency_sweep",
    "run_torque_ratio_curve",
    "run_integrated",
    "steady_hold_drift",
]


@dataclass(frozen=True)
class SimConfig:
    """Fixed-step integration settings."""

    dt: float = 1e-4
    duration: float = 10.0
    integrator: str = "rk4"
    record_decimation: int = 1

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValidationError("dt", "must be positive")
        if not self.duration >= self.dt:
            raise ValidationError("duration", "must be at least one step")
        if self.integrator not in ("rk4", "euler"):
            raise ValidationError("integrator", f"unknown integrator {self.integrator!r}")
        if not (isinstance(self.record_decimation, int) and self.record_decimation >= 1):
            raise ValidationError("record_decimation", "must be an integer >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def method(self) -> int:
        return kernels.EULER if self.integrator == "euler" else kernels.RK4


@dataclass(frozen=True)
class SimTrace:
    """Uniform-grid record of named signal columns."""

    columns: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[1] != len(self.columns):
            raise ValidationError("data", "trace shape does not match column names")

    def column(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(f"trace has no column {name!r}") from None

    @property
    def t(self) -> np.ndarray:
        return self.data[:, 0]

    def to_csv(self, path) -> None:
        write_csv(path, self.columns, self.data)


def write_csv(path, columns: Sequence[str], rows) -> None:
    """CSV with '.' decimals, shortest round-trip floats, LF endings."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class RotorProfile:
    """Rotor (aerodynamic) torque profile applied to gearbox stage 1:
    ``τ(t) = base + step_delta·[t ≥ step_time] + sin_amp·sin(2π·f·t)``."""

    base: float
    step_time: float = math.inf
    step_delta: float = 0.0
    sin_amp: float = 0.0
    sin_freq_hz: float = 0.0

    def __post_init__(self):
        for name in ("base", "step_delta", "sin_amp", "sin_freq_hz"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(name, "must be finite")
        if self.sin_freq_hz < 0.0:
            raise ValidationError("sin_freq_hz", "must be nonnegative")

    def torque(self, t: float) -> float:
        tau = self.base + self.sin_amp * math.sin(2.0 * math.pi * self.sin_freq_hz * t)
        if t >= self.step_time:
            tau += self.step_delta
        return tau


def step(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    x: np.ndarray,
    t: float,
    dt: float,
    method: str = "rk4",
    step_index: int = 0,
) -> np.ndarray:
    """One explicit step of ``ẋ = rhs(t, x)``; the input state is not mutated.

    Raises :class:`NonFiniteState` (with ``step_index``) when the result is
    not finite.
    """
    if not dt > 0.0:
        raise ValidationError("dt", "must be positive")
    x = np.asarray(x, dtype=float)
    if method == "euler":
        x_new = x + dt * np.asarray(rhs(t, x))
    elif method == "rk4":
        k1 = np.asarray(rhs(t, x))
        k2 = np.asarray(rhs(t + 0.5 * dt, x + 0.5 * dt * k1))
        k3 = np.asarray(rhs(t + 0.5 * dt, x + 0.5 * dt * k2))
        k4 = np.asarray(rhs(t + dt, x + dt * k3))
        x_new = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    else:
        raise ValidationError("method", f"unknown integrator {method!r}")
    if not np.all(np.isfinite(x_new)):
        raise NonFiniteState(step_index, f"non-finite state at t={t + dt:.6g}")
    return x_new


# ---------------------------------------------------------------------------
# Steady solves used by the open-loop experiments
# ---------------------------------------------------------------------------


def solve_flow_from_power_balance(
    p: TcParameters,
    omega_i: float,
    omega_t: float,
    alpha_s: float,
) -> float:
    """Flow velocity from Φ(V) = 0 at fixed speeds and stator angle.

    Φ is quadratic in V.  The *larger* positive root is returned: it is the
    branch continuous across the speed-ratio range (the smaller root exits
    through V = 0 at low ν).  Raises :class:`NoPhysicalRoot` when no
    positive root exists.
    """
    g, fl = p.geometry, p.fluid
    tan_ai = math.tan(g.alpha_i)
    tan_at = math.tan(g.alpha_t)
    tan_as = math.tan(alpha_s)
    # Shock velocities are affine in V: V_sh = a + b·V.
    a_i, b_i = -g.R_s * omega_i, tan_as - math.tan(g.alpha_i_in)
    a_t, b_t = g.R_i * (omega_i - omega_t), tan_ai - math.tan(g.alpha_t_in)
    a_s, b_s = g.R_t * omega_t, tan_at - math.tan(g.alpha_s_in)
    sec_sum = (1.0 + tan_ai**2) + (1.0 + tan_at**2) + (1.0 + tan_as**2)

    c2 = -0.5 * (
        fl.C_sh_i * b_i**2 + fl.C_sh_t * b_t**2 + fl.C_sh_s * b_s**2 + fl.f * sec_sum
    )
    c1 = (
        omega_i * (g.R_i * tan_ai - g.R_s * tan_as)
        + omega_t * (g.R_t * tan_at - g.R_i * tan_ai)
        - (fl.C_sh_i * a_i * b_i + fl.C_sh_t * a_t * b_t + fl.C_sh_s * a_s * b_s)
    )
    c0 = (
        g.R_i**2 * omega_i**2
        + g.R_t**2 * omega_t**2
        - g.R_i**2 * omega_i * omega_t
        - 0.5 * (fl.C_sh_i * a_i**2 + fl.C_sh_t * a_t**2 + fl.C_sh_s * a_s**2)
    )
    roots = quadratic_roots(c2, c1, c0)
    positive = [r for r in roots if r > 0.0 and math.isfinite(r)]
    if not positive:
        raise NoPhysicalRoot(
            f"power balance has no positive flow root at omega_i={omega_i:.4f}, "
            f"omega_t={omega_t:.4f}"
        )
    return positive[-1]


def solve_torque_equilibrium(
    p: TcParameters,
    tau_ie: float,
    tau_te: float,
    alpha_s: float,
) -> TcState:
    """Equilibrium state for constant shaft torques at a fixed stator angle.

    Exploits the degree-2 homogeneity of the steady relations in
    (ω_i, ω_t, V): at unit impeller speed the torque ratio depends only on
    the speed ratio ν, so ν solves a scalar equation and the overall scale
    follows from ``τ_i0 ∝ scale²``.
    """
    if not tau_ie > 0.0:
        raise ValidationError("tau_ie", "impeller drive torque must be positive")
    if not tau_te < 0.0:
        raise ValidationError("tau_te", "turbine load torque must be negative")
    target = -tau_te / tau_ie

    def ratio_minus_target(nu: float) -> float:
        V = solve_flow_from_power_balance(p, 1.0, nu, alpha_s)
        s = TcState(omega_i=1.0, omega_t=nu, V=V)
        num = -steady_turbine_torque(p, s)
        den = steady_impeller_torque(p, s, alpha_s)
        return num / den - target

    nu = bracketed_root(ratio_minus_target, 1e-3, 0.999999, f_tol=1e-12)
    V1 = solve_flow_from_power_balance(p, 1.0, nu, alpha_s)
    s1 = TcState(omega_i=1.0, omega_t=nu, V=V1)
    lam = math.sqrt(tau_ie / steady_impeller_torque(p, s1, alpha_s))
    return TcState(omega_i=lam, omega_t=lam * nu, V=lam * V1)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

TC_TRACE_COLUMNS = ("t", "omega_i", "omega_t", "V")


def run_tc_transient(
    p: TcParameters,
    state0: TcState,
    tau_i: float,
    tau_t: float,
    alpha_s: float,
    sim: SimConfig,
) -> SimTrace:
    """Bare TC under constant torques and stator angle."""
    pp = pack_parameters(p)
    minv = np.linalg.inv(mass_matrix(p))
    x0 = np.array([state0.omega_t, state0.omega_i, state0.V])
    trace, status, bad = kernels.tc_run_const(
        pp, minv, x0, tau_i, tau_t, alpha_s,
        sim.dt, sim.n_steps, sim.record_decimation, sim.method,
    )
    if status != kernels.OK:
        raise NonFiniteState(bad, "TC transient diverged")
    data = np.column_stack([trace[:, 0], trace[:, 2], trace[:, 1], trace[:, 3]])
    return SimTrace(columns=TC_TRACE_COLUMNS, data=data)


@dataclass(frozen=True)
class FrequencySweepSpec:
    """Sinusoidal impeller-torque disturbance study on the bare TC.

    ``τ_i(t) = tau_ie + amplitude·sin(2πft)`` with constant ``tau_te``.
    Each frequency settles for ``max(settle_time, 10/f)`` seconds before a
    measure window of ``max(measure_time, 4/f)`` seconds; the amplitude is
    half the peak-to-peak over the final quarter of the measure window.
    """

    tau_ie: float = 100.0
    tau_te: float = -150.0
    amplitude: float = 10.0
    f_lo: float = 0.5
    f_hi: float = 100.0
    points_per_decade: int = 20
    settle_time: float = 5.0
    measure_time: float = 5.0

    def __post_init__(self):
        if not self.f_lo > 0.0:
            raise ValidationError("f_lo", "must be positive")
        if not self.f_hi > self.f_lo:
            raise ValidationError("f_hi", "must exceed f_lo")
        if self.points_per_decade < 1:
            raise ValidationError("points_per_decade", "must be >= 1")
        if not (self.settle_time > 0.0 and self.measure_time > 0.0):
            raise ValidationError("settle_time", "settle and measure times must be positive")
        if self.amplitude < 0.0:
            raise ValidationError("amplitude", "must be nonnegative")


@dataclass(frozen=True)
class FrequencyPoint:
    f_hz: float
    amp_omega_i: float
    amp_omega_t: float
    ratio_t_over_i: float


@dataclass(frozen=True)
class FrequencySweepResult:
    points: tuple[FrequencyPoint, ...]
    spec: FrequencySweepSpec
    initial_state: TcState

    CSV_HEADER = ("f_hz", "amp_omega_i", "amp_omega_t", "ratio_t_over_i")

    def to_csv(self, path) -> None:
        rows = [
            (q.f_hz, q.amp_omega_i, q.amp_omega_t, q.ratio_t_over_i)
            for q in self.points
        ]
        write_csv(path, self.CSV_HEADER, rows)

    def amplitude_at(self, f_hz: float) -> float:
        """Turbine-side amplitude at the grid point closest to ``f_hz``."""
        best = min(self.points, key=lambda q: abs(q.f_hz - f_hz))
        return best.amp_omega_t


def frequency_grid(f_lo: float, f_hi: float, points_per_decade: int) -> list[float]:
    """Log grid ``f_lo·10^(k/ppd)`` capped at ``f_hi`` (always included)."""
    out = []
    k = 0
    while True:
        f = f_lo * 10.0 ** (k / points_per_decade)
        if f >= f_hi * (1.0 - 1e-12):
            break
        out.append(f)
        k += 1
    out.append(f_hi)
    return out


def run_frequency_sweep(
    p: TcParameters,
    spec: FrequencySweepSpec,
    alpha_s: float,
    dt: float = 1e-4,
) -> FrequencySweepResult:
    """Disturbance-amplitude transfer across the frequency grid.

    Every run starts from the exact equilibrium of the nominal torques so
    the measure window sees only the forced response.
    """
    eq = solve_torque_equilibrium(p, spec.tau_ie, spec.tau_te, alpha_s)
    pp = pack_parameters(p)
    minv = np.linalg.inv(mass_matrix(p))
    x0 = np.array([eq.omega_t, eq.omega_i, eq.V])
    points = []
    for f in frequency_grid(spec.f_lo, spec.f_hi, spec.points_per_decade):
        n_settle = int(math.ceil(max(spec.settle_time, 10.0 / f) / dt))
        n_measure = int(math.ceil(max(spec.measure_time, 4.0 / f) / dt))
        extrema, _final, status, bad = kernels.tc_run_sin(
            pp, minv, x0, spec.tau_ie, spec.amplitude, 2.0 * math.pi * f,
            spec.tau_te, alpha_s, dt, n_settle, n_measure,
        )
        if status != kernels.OK:
            raise NonFiniteState(bad, f"frequency sweep diverged at f={f:.4g} Hz")
        amp_t = 0.5 * (extrema[1] - extrema[0])
        amp_i = 0.5 * (extrema[3] - extrema[2])
        ratio = amp_t / amp_i if amp_i > 0.0 else math.nan
        points.append(FrequencyPoint(f, amp_i, amp_t, ratio))
    return FrequencySweepResult(points=tuple(points), spec=spec, initial_state=eq)


@dataclass(frozen=True)
class TorqueCurvePoint:
    nu: float
    V: float
    tau_i0: float
    tau_t0: float
    torque_ratio: float
    feasible: bool


@dataclass(frozen=True)
class TorqueCurveResult:
    points: tuple[TorqueCurvePoint, ...]
    omega_i: float
    alpha_s: float

    CSV_HEADER = ("nu", "V", "tau_i0", "tau_t0", "torque_ratio", "feasible")

    def to_csv(self, path) -> None:
        rows = [
            (q.nu, q.V, q.tau_i0, q.tau_t0, q.torque_ratio, 1.0 if q.feasible else 0.0)
            for q in self.points
        ]
        write_csv(path, self.CSV_HEADER, rows)


def run_torque_ratio_curve(
    p: TcParameters,
    omega_i: float,
    alpha_s: float,
    nu_grid: Sequence[float],
) -> TorqueCurveResult:
    """Torque ratio |τ_t0|/τ_i0 vs speed ratio at fixed ω_i and stator angle.

    Per grid point the flow velocity solves the power balance Φ = 0; the
    torque ratio is reported as ``−τ_t0/τ_i0`` (positive in normal
    operation, > 1 in the torque-multiplication region).  Points with no
    physical flow root are recorded infeasible with NaN values.
    """
    if not omega_i > 0.0:
        raise ValidationError("omega_i", "must be positive")
    points = []
    for nu in nu_grid:
        if not 0.0 < nu <= 1.0:
            raise ValidationError("nu_grid", "speed ratios must lie in (0, 1]")
        omega_t = nu * omega_i
        try:
            V = solve_flow_from_power_balance(p, omega_i, omega_t, alpha_s)
        except NoPhysicalRoot:
            points.append(TorqueCurvePoint(nu, math.nan, math.nan, math.nan,
                                           math.nan, False))
            continue
        s = TcState(omega_i=omega_i, omega_t=omega_t, V=V)
        tau_i0 = steady_impeller_torque(p, s, alpha_s)
        tau_t0 = steady_turbine_torque(p, s)
        ratio = -tau_t0 / tau_i0 if tau_i0 != 0.0 else math.nan
        points.append(TorqueCurvePoint(nu, V, tau_i0, tau_t0, ratio, True))
    return TorqueCurveResult(points=tuple(points), omega_i=omega_i, alpha_s=alpha_s)


# ---------------------------------------------------------------------------
# Integrated closed-loop run
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegratedResult:
    trace: SimTrace
    init: EquilibriumInit


def _integrated_columns(dt_cfg: DrivetrainConfig) -> tuple[str, ...]:
    m = dt_cfg.gearbox.n_stages
    cols = ["t", "omega_i", "omega_t", "V", "alpha_s", "tau_rotor",
            "tau_c1", "tau_t_ext"]
    cols += [f"omega_stage_{k}" for k in range(1, m + 1)]
    cols += [f"phi_joint_{k}" for k in range(1, m)]
    cols += ["theta_c1", "theta_c2", "delta", "omega_gen"]
    cols += ["gov_error", "gov_p", "gov_i", "gov_d", "gov_raw"]
    if dt_cfg.gearbox.translational is not None:
        for k in range(1, m + 1):
            cols += [f"x_stage_{k}", f"v_stage_{k}"]
    return tuple(cols)


def run_integrated(
    tc: TcParameters,
    dt_cfg: DrivetrainConfig,
    point: SteadyPoint,
    profile: RotorProfile | None,
    sim: SimConfig,
    governor: GovernorConfig | None = None,
) -> IntegratedResult:
    """Closed-loop drivetrain run initialized at a steady operating point.

    ``profile=None`` applies the exact equilibrium rotor torque (hold test).
    With a governor config the discrete PID commands the stator angle once
    per step; otherwise the vane is frozen at the steady angle.
    """
    init = equilibrium_init(dt_cfg, tc, point)
    prof = profile or RotorProfile(base=init.tau_rotor)
    ka = kernel_args(dt_cfg, tc)

    if governor is not None and governor.enabled:
        gov_enabled = 1
        g = governor.gains
        kp, ki, kd = g.Kp, g.Ki, g.Kd
        rate = governor.rate_limit
        amin, amax = governor.alpha_s_min, governor.alpha_s_max
        alpha0 = governor.alpha_s_init
        integ0 = governor.integrator_init
    else:
        gov_enabled = 0
        kp = ki = kd = 0.0
        rate = 1.0
        amin, amax = -math.pi / 2 + 1e-6, math.pi / 2 - 1e-6
        alpha0 = init.alpha_s0
        integ0 = init.alpha_s0

    trace_arr, status, bad = kernels.integrated_run(
        ka["M"], ka["Jg"], ka["rg"], ka["kj"], ka["cj"],
        ka["kc1"], ka["cc1"], ka["kc2"], ka["cc2"],
        ka["Jgen"], ka["Dgen"], ka["Ksync"], ka["wsync"],
        ka["pp"], ka["minv"], ka["m2inv"], ka["mode"],
        init.x0, prof.base, prof.step_time, prof.step_delta,
        prof.sin_amp, 2.0 * math.pi * prof.sin_freq_hz,
        gov_enabled, kp, ki, kd, rate, amin, amax, alpha0, integ0,
        sim.dt, sim.n_steps, sim.record_decimation, sim.method,
        ka["with_tr"], ka["tr_m"], ka["tr_k"], ka["tr_c"],
    )
    if status != kernels.OK:
        raise NonFiniteState(bad, "integrated run diverged")
    return IntegratedResult(
        trace=SimTrace(columns=_integrated_columns(dt_cfg), data=trace_arr),
        init=init,
    )


def steady_hold_drift(
    p: TcParameters,
    point: SteadyPoint,
    duration: float = 10.0,
    dt: float = 1e-4,
) -> np.ndarray:
    """Max relative drift (ω_t, ω_i, V) holding a feasible steady point.

    Integrates the bare TC from the steady point under its own constant
    (τ_i, τ_t, α_s0) and returns each state's peak |x − x₀|/|x₀|.
    """
    if not point.feasible:
        raise NoPhysicalRoot(f"steady point at nu={point.nu:.4f} is infeasible")
    pp = pack_parameters(p)
    minv = np.linalg.inv(mass_matrix(p))
    x0 = np.array([point.omega_t, point.omega_i, point.V0])
    n = int(round(duration / dt))
    drift, status, bad = kernels.tc_hold_drift(
        pp, minv, x0, point.tau_i, point.tau_t, point.alpha_s0, dt, n
    )
    if status != kernels.OK:
        raise NonFiniteState(bad, "steady hold diverged")
    return drift
