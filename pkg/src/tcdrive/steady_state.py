"""Steady-state initialization: rated spec, torque schedule, sweep solver.

A steady operating point of the TC at a speed ratio ``ν = ω_t/ω_i`` holds the
turbine at synchronous speed, assigns the scheduled electromagnetic torque,
and solves two scalar equations in sequence:

1. the steady turbine-torque balance ``τ_t0(V) = τ_t`` — a quadratic in the
   charge-flow velocity ``V``;
2. the power-balance closure ``Φ(α_s) = 0`` — a bracketed scalar root for
   the stator-vane angle.

A point is *feasible* when both solves succeed and the resulting vane angle
lies inside the actuator's mechanical range.  Sweeping ν over the schedule
range yields the feasible operating band and the loss profile.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

from .errors import (
    NoBracket,
    NoPhysicalRoot,
    OutOfScheduleRange,
    ValidationError,
    ZeroOutputPower,
)
from .params import TcParameters, TcState
from .rootfind import bracketed_root, quadratic_roots
from .tc_core import phi, steady_impeller_torque, steady_turbine_torque

__all__ = [
    "RatedSpec",
    "SweepOptions",
    "SteadyPoint",
    "SweepResult",
    "synchronous_speed",
    "rated_torque",
    "turbine_torque_schedule",
    "solve_flow_velocity",
    "solve_stator_angle",
    "impeller_torque_at_steady",
    "power_loss_pct",
    "solve_point",
    "sweep",
    "write_sweep_csv",
    "SWEEP_CSV_HEADER",
]

SCHEDULE_NU_MIN = 0.87
SCHEDULE_NU_MAX = 1.67
PHI_TOL = 1e-10


@dataclass(frozen=True)
class RatedSpec:
    """Generator rating that anchors the torque schedule.

    Parameters
    ----------
    power_rated : float
        Rated electrical power in W.
    speed_rpm : float
        Synchronous generator speed in rpm.
    """

    power_rated: float
    speed_rpm: float

    def __post_init__(self):
        if not (self.power_rated > 0.0 and math.isfinite(self.power_rated)):
            raise ValidationError("power_rated", "must be a positive finite number")
        if not (self.speed_rpm > 0.0 and math.isfinite(self.speed_rpm)):
            raise ValidationError("speed_rpm", "must be a positive finite number")


@dataclass(frozen=True)
class SweepOptions:
    """Grid and solver bounds for the steady-state sweep.

    ``solver_lo_deg``/``solver_hi_deg`` bracket the stator-angle root solve;
    ``vane_lo_deg``/``vane_hi_deg`` are the actuator's mechanical limits that
    decide feasibility.  All angles in degrees.
    """

    nu_lo: float = SCHEDULE_NU_MIN
    nu_hi: float = SCHEDULE_NU_MAX
    nu_step: float = 0.001
    solver_lo_deg: float = 5.0
    solver_hi_deg: float = 85.0
    vane_lo_deg: float = 5.0
    vane_hi_deg: float = 85.0

    def __post_init__(self):
        if not self.nu_lo <= self.nu_hi:
            raise ValidationError("nu_lo", "nu_lo must not exceed nu_hi")
        if not self.nu_step > 0.0:
            raise ValidationError("nu_step", "must be positive")
        if not -90.0 < self.solver_lo_deg < self.solver_hi_deg < 90.0:
            raise ValidationError(
                "solver_lo_deg", "need -90 < solver_lo_deg < solver_hi_deg < 90"
            )
        if not self.vane_lo_deg < self.vane_hi_deg:
            raise ValidationError("vane_lo_deg", "vane_lo_deg must be below vane_hi_deg")


@dataclass(frozen=True)
class SteadyPoint:
    """One solved operating point of the sweep.

    Infeasible points keep NaN in the solved fields and name the failing
    stage in ``reason`` (``"no_positive_root"``, ``"no_bracket"``,
    ``"vane_range"`` or ``"residual"``).
    """

    nu: float
    omega_i: float
    omega_t: float
    V0: float
    alpha_s0: float
    tau_i: float
    tau_t: float
    p_loss_pct: float
    feasible: bool
    reason: str | None = None


@dataclass(frozen=True)
class SweepResult:
    """Ordered sweep output plus the rated quantities it was built from."""

    points: tuple[SteadyPoint, ...]
    spec: RatedSpec
    options: SweepOptions

    @property
    def feasible_points(self) -> tuple[SteadyPoint, ...]:
        return tuple(p for p in self.points if p.feasible)

    def feasible_band(self) -> tuple[float, float]:
        """(ν_min, ν_max) of the longest contiguous feasible run.

        Raises :class:`NoPhysicalRoot` when no point is feasible.
        """
        best: tuple[int, int] | None = None
        start = None
        for k, pt in enumerate(self.points):
            if pt.feasible and start is None:
                start = k
            if (not pt.feasible or k == len(self.points) - 1) and start is not None:
                end = k if pt.feasible else k - 1
                if best is None or end - start > best[1] - best[0]:
                    best = (start, end)
                start = None
        if best is None:
            raise NoPhysicalRoot("no feasible operating point in the sweep")
        return self.points[best[0]].nu, self.points[best[1]].nu

    def point_at(self, nu: float) -> SteadyPoint:
        """The sweep point whose ν is closest to `nu` (must be feasible)."""
        best = min(self.points, key=lambda p: abs(p.nu - nu))
        if not best.feasible:
            raise NoPhysicalRoot(f"nearest sweep point nu={best.nu:.4f} is infeasible")
        return best


def synchronous_speed(speed_rpm: float) -> float:
    """Synchronous speed ``N·120·π/3600`` in rad/s for N in rpm."""
    if not speed_rpm > 0.0:
        raise ValidationError("speed_rpm", "must be positive")
    return speed_rpm * 120.0 * math.pi / 3600.0


def rated_torque(power_rated: float, speed_rpm: float) -> float:
    """Rated torque ``30 P / (π N)`` in N·m.

    Algebraically identical to ``P / synchronous_speed(N)`` — the two rated
    formulas are mutually consistent, which the test suite asserts.
    """
    if not power_rated > 0.0:
        raise ValidationError("power_rated", "must be positive")
    if not speed_rpm > 0.0:
        raise ValidationError("speed_rpm", "must be positive")
    return 30.0 * power_rated / (math.pi * speed_rpm)


def turbine_torque_schedule(nu: float, tau_rated: float) -> float:
    """Scheduled (negative) turbine torque at speed ratio ν.

    Constant rated torque up to unity ratio, constant rated *power*
    (``τ ∝ 1/ν²``) above it; continuous at ν = 1.

    Raises
    ------
    OutOfScheduleRange
        If ν lies outside [0.87, 1.67].
    """
    if not SCHEDULE_NU_MIN <= nu <= SCHEDULE_NU_MAX:
        raise OutOfScheduleRange(
            f"speed ratio {nu:.4f} outside schedule range "
            f"[{SCHEDULE_NU_MIN}, {SCHEDULE_NU_MAX}]"
        )
    if nu <= 1.0:
        return -tau_rated
    return -tau_rated / (nu * nu)


def solve_flow_velocity(
    p: TcParameters,
    nu: float,
    omega_t: float,
    tau_t: float,
    prev_V: float | None = None,
) -> float:
    """Positive root V of the steady turbine-torque quadratic τ_t0(V) = τ_t.

    The impeller speed is ``ω_t/ν``.  When both roots are positive the one
    nearer ``prev_V`` is kept (continuity along a sweep); with no previous
    value the smaller root is taken.  Raises :class:`NoPhysicalRoot` if no
    positive root exists.
    """
    if not nu > 0.0:
        raise ValidationError("nu", "speed ratio must be positive")
    omega_i = omega_t / nu
    g = p.geometry
    rho_A = p.fluid.rho * g.A
    a = rho_A * (g.R_t * math.tan(g.alpha_t) - g.R_i * math.tan(g.alpha_i))
    b = rho_A * (omega_t * g.R_t**2 - omega_i * g.R_i**2)
    roots = quadratic_roots(a, b, -tau_t)
    positive = [r for r in roots if r > 0.0 and math.isfinite(r)]
    if not positive:
        raise NoPhysicalRoot(
            f"no positive flow velocity for nu={nu:.4f}, "
            f"omega_t={omega_t:.4f}, tau_t={tau_t:.4f}"
        )
    if len(positive) == 1 or prev_V is None:
        return positive[0]
    return min(positive, key=lambda r: abs(r - prev_V))


def solve_stator_angle(
    p: TcParameters,
    state: TcState,
    lo_deg: float = 5.0,
    hi_deg: float = 85.0,
) -> float:
    """Stator angle (rad) closing the power balance Φ(α_s) = 0.

    Bracketed root solve over [lo_deg, hi_deg]; |Φ| at the returned angle is
    within ``PHI_TOL``.  Raises :class:`NoBracket` when Φ does not change
    sign over the bracket.
    """
    lo = math.radians(lo_deg)
    hi = math.radians(hi_deg)
    return bracketed_root(lambda a: phi(p, state, a), lo, hi, f_tol=PHI_TOL)


def impeller_torque_at_steady(p: TcParameters, state: TcState, alpha_s0: float) -> float:
    """Impeller torque at a solved steady point (the steady closure itself)."""
    return steady_impeller_torque(p, state, alpha_s0)


def power_loss_pct(omega_i: float, tau_i: float, omega_t: float, tau_t: float) -> float:
    """Percent power loss ``100·(ω_i·τ_i − ω_t·|τ_t|)/(ω_t·|τ_t|)``.

    Raises :class:`ZeroOutputPower` when the output power ``ω_t·|τ_t|`` is 0.
    """
    p_out = omega_t * abs(tau_t)
    if p_out == 0.0:
        raise ZeroOutputPower("output power is zero; percent loss undefined")
    return 100.0 * (omega_i * tau_i - p_out) / p_out


def solve_point(
    p: TcParameters,
    nu: float,
    spec: RatedSpec,
    options: SweepOptions | None = None,
    prev_V: float | None = None,
) -> SteadyPoint:
    """Solve one steady operating point at speed ratio ν.

    The turbine is held at synchronous speed and the scheduled torque is
    applied.  Infeasible points (failed V root, failed Φ bracket, or a vane
    angle outside the actuator range) are returned with ``feasible=False``
    rather than raising.
    """
    opts = options or SweepOptions()
    omega_t = synchronous_speed(spec.speed_rpm)
    omega_i = omega_t / nu
    tau_rated = rated_torque(spec.power_rated, spec.speed_rpm)
    tau_t = turbine_torque_schedule(nu, tau_rated)

    nan = math.nan
    try:
        V0 = solve_flow_velocity(p, nu, omega_t, tau_t, prev_V=prev_V)
    except NoPhysicalRoot:
        return SteadyPoint(nu, omega_i, omega_t, nan, nan, nan, tau_t, nan,
                           False, "no_positive_root")
    state = TcState(omega_i=omega_i, omega_t=omega_t, V=V0)
    try:
        alpha_s0 = solve_stator_angle(
            p, state, lo_deg=opts.solver_lo_deg, hi_deg=opts.solver_hi_deg
        )
    except NoBracket:
        return SteadyPoint(nu, omega_i, omega_t, V0, nan, nan, tau_t, nan,
                           False, "no_bracket")

    tau_i = impeller_torque_at_steady(p, state, alpha_s0)
    # The solved state must also still satisfy the turbine balance.
    if abs(steady_turbine_torque(p, state) - tau_t) > 1e-6 * max(1.0, abs(tau_t)):
        return SteadyPoint(nu, omega_i, omega_t, V0, alpha_s0, tau_i, tau_t,
                           nan, False, "residual")
    loss = power_loss_pct(omega_i, tau_i, omega_t, tau_t)
    alpha_deg = math.degrees(alpha_s0)
    if not opts.vane_lo_deg <= alpha_deg <= opts.vane_hi_deg:
        return SteadyPoint(nu, omega_i, omega_t, V0, alpha_s0, tau_i, tau_t,
                           loss, False, "vane_range")
    return SteadyPoint(nu, omega_i, omega_t, V0, alpha_s0, tau_i, tau_t,
                       loss, True, None)


def sweep(
    p: TcParameters,
    spec: RatedSpec,
    options: SweepOptions | None = None,
) -> SweepResult:
    """Steady-state sweep over the ν grid.

    The grid is ``nu_lo, nu_lo + step, ...`` up to ``nu_hi`` (inclusive
    within half a step).  V-root continuity is maintained from the previous
    solved point.
    """
    opts = options or SweepOptions()
    n = int(round((opts.nu_hi - opts.nu_lo) / opts.nu_step))
    if opts.nu_lo + n * opts.nu_step > opts.nu_hi + 0.5 * opts.nu_step:
        n -= 1
    points = []
    prev_V: float | None = None
    for k in range(n + 1):
        nu = opts.nu_lo + k * opts.nu_step
        pt = solve_point(p, nu, spec, opts, prev_V=prev_V)
        if math.isfinite(pt.V0):
            prev_V = pt.V0
        points.append(pt)
    return SweepResult(points=tuple(points), spec=spec, options=opts)


SWEEP_CSV_HEADER = "nu,omega_i,omega_t,V0,alpha_s0_deg,tau_i,tau_t,p_loss_pct,feasible"


def write_sweep_csv(result: SweepResult, path) -> None:
    """Write the sweep as CSV (LF line endings, shortest round-trip floats)."""
    buf = io.StringIO()
    buf.write(SWEEP_CSV_HEADER + "\n")
    for pt in result.points:
        fields = [
            repr(pt.nu),
            repr(pt.omega_i),
            repr(pt.omega_t),
            repr(pt.V0),
            repr(math.degrees(pt.alpha_s0)) if math.isfinite(pt.alpha_s0) else "nan",
            repr(pt.tau_i),
            repr(pt.tau_t),
            repr(pt.p_loss_pct),
            "true" if pt.feasible else "false",
        ]
        buf.write(",".join(fields) + "\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())
