"""PID stator-vane speed governor.

The governor maps the turbine-side speed deviation ``e = ω_t − ω_sync`` to a
stator exit-angle command.  The sign convention follows the steady-state
sensitivity analysis: larger vane angles transmit less drive torque, so an
over-speed (positive error) must *increase* α_s and an under-speed must
decrease it.

Controller structure (discrete, one update per integration step):

* derivative term acts on the error through a first-order filter with time
  constant ``10·dt`` so step-to-step integration noise is not amplified;
* the command is rate-limited (vane actuator slew) and then clamped to the
  configured angle range;
* clamping anti-windup: the integrator is frozen whenever the clamped
  command sits pinned at a bound;
* bumpless start: the integrator is initialized to the steady-state vane
  angle, so zero error commands zero movement.

The default gains are untuned placeholders — chosen only to be stable and
correctly signed for the shipped configurations, not optimized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InfeasibleSolution, ValidationError
from .steady_state import SteadyPoint, SweepResult

__all__ = [
    "PidGains",
    "GovernorConfig",
    "GovernorState",
    "DEFAULT_GAINS",
    "DEFAULT_RATE_LIMIT",
    "bounds_from_sweep",
    "init_from_steady",
    "update",
]

#: Default gains (Kp: rad per rad/s, Ki: rad per rad, Kd: rad·s per rad/s).
#:
#: Integral-dominant by design.  The vane-to-turbine-speed channel has no DC
#: authority (the grid's synchronizing spring owns the steady speed) and its
#: lightly damped swing mode responds to vane motion with a sign that makes
#: plain proportional or derivative speed feedback *reduce* the mode's
#: damping; integral action arrives with the phase that adds damping.
#: Kp is kept small for a prompt initial response, Kd is off by default.
#: Tuned against the linearized closed loop and verified on step transients
#: (see tests): Ki much above ~1 drives the commanded vane into its travel
#: limit on a 10 % torque step, losing most of the benefit to anti-windup.
DEFAULT_GAINS_TUPLE = (0.002, 0.8, 0.0)

#: Default vane slew limit: 30°/s.
DEFAULT_RATE_LIMIT = math.radians(30.0)


@dataclass(frozen=True)
class PidGains:
    """Proportional/integral/derivative gains on the speed error."""

    Kp: float
    Ki: float
    Kd: float

    def __post_init__(self):
        for name in ("Kp", "Ki", "Kd"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(name, "gain must be finite")
        if self.Ki < 0.0:
            raise ValidationError("Ki", "integral gain must be nonnegative")


DEFAULT_GAINS = PidGains(*DEFAULT_GAINS_TUPLE)


@dataclass(frozen=True)
class GovernorConfig:
    """Gains plus actuator limits and initialization (angles in radians)."""

    gains: PidGains
    alpha_s_min: float
    alpha_s_max: float
    rate_limit: float = DEFAULT_RATE_LIMIT
    alpha_s_init: float = 0.0
    integrator_init: float = 0.0
    enabled: bool = True

    def __post_init__(self):
        half_pi = math.pi / 2
        if not -half_pi < self.alpha_s_min < self.alpha_s_max < half_pi:
            raise ValidationError(
                "alpha_s_min", "need -90 deg < alpha_s_min < alpha_s_max < 90 deg"
            )
        if not self.rate_limit > 0.0:
            raise ValidationError("rate_limit", "must be positive")
        if not self.alpha_s_min <= self.alpha_s_init <= self.alpha_s_max:
            raise ValidationError(
                "alpha_s_init", "initial angle must lie within [alpha_s_min, alpha_s_max]"
            )
        if not math.isfinite(self.integrator_init):
            raise ValidationError("integrator_init", "must be finite")


@dataclass(frozen=True)
class GovernorState:
    """Discrete controller state plus the last update's breakdown.

    ``alpha_s_cmd`` is always within the configured bounds.  The ``p/i/d``,
    ``error`` and ``raw_cmd`` fields record the most recent update for
    tracing.
    """

    integrator: float
    prev_error: float
    alpha_s_cmd: float
    d_filt: float = 0.0
    error: float = 0.0
    p_term: float = 0.0
    d_term: float = 0.0
    raw_cmd: float = 0.0


def bounds_from_sweep(
    result: SweepResult,
    margin_deg: float = 1.0,
) -> tuple[float, float]:
    """(α_min, α_max) in radians from the feasible sweep's vane extremes.

    The observed feasible α_s0 range is widened by ``margin_deg`` on each
    side and clamped to the sweep's configured vane actuation limits.
    """
    feas = result.feasible_points
    if not feas:
        raise InfeasibleSolution("sweep has no feasible points to derive bounds from")
    lo = min(p.alpha_s0 for p in feas)
    hi = max(p.alpha_s0 for p in feas)
    margin = math.radians(margin_deg)
    vane_lo = math.radians(result.options.vane_lo_deg)
    vane_hi = math.radians(result.options.vane_hi_deg)
    return max(lo - margin, vane_lo), min(hi + margin, vane_hi)


def init_from_steady(
    point: SteadyPoint,
    bounds: tuple[float, float],
    gains: PidGains = DEFAULT_GAINS,
    rate_limit: float = DEFAULT_RATE_LIMIT,
    enabled: bool = True,
) -> tuple[GovernorConfig, GovernorState]:
    """Governor configured for bumpless start at a feasible steady point.

    The initial command and the integrator are both set to the point's
    steady vane angle, so the first update with zero error changes nothing.
    """
    if not point.feasible:
        raise InfeasibleSolution(
            f"cannot initialize the governor from an infeasible point "
            f"(nu={point.nu:.4f}, reason={point.reason})"
        )
    cfg = GovernorConfig(
        gains=gains,
        alpha_s_min=bounds[0],
        alpha_s_max=bounds[1],
        rate_limit=rate_limit,
        alpha_s_init=point.alpha_s0,
        integrator_init=point.alpha_s0,
        enabled=enabled,
    )
    state = GovernorState(
        integrator=cfg.integrator_init,
        prev_error=0.0,
        alpha_s_cmd=cfg.alpha_s_init,
    )
    return cfg, state


def update(
    state: GovernorState,
    cfg: GovernorConfig,
    speed_error: float,
    dt: float,
) -> GovernorState:
    """One discrete PID update; returns the successor state.

    ``speed_error`` is ``ω_t − ω_sync`` in rad/s.  The arithmetic matches
    the compiled in-loop governor in :mod:`tcdrive.kernels` step for step.
    """
    if not dt > 0.0:
        raise ValidationError("dt", "must be positive")
    g = cfg.gains
    t_filt = 10.0 * dt
    d_raw = (speed_error - state.prev_error) / dt
    d_filt = state.d_filt + (dt / (t_filt + dt)) * (d_raw - state.d_filt)
    integ_cand = state.integrator + g.Ki * speed_error * dt
    p_term = g.Kp * speed_error
    d_term = g.Kd * d_filt
    raw = integ_cand + p_term + d_term

    lo_r = state.alpha_s_cmd - cfg.rate_limit * dt
    hi_r = state.alpha_s_cmd + cfg.rate_limit * dt
    cmd = min(max(raw, lo_r), hi_r)
    cmd = min(max(cmd, cfg.alpha_s_min), cfg.alpha_s_max)

    # Clamping anti-windup: keep the integrator only while the command is
    # not pinned at an angle bound.
    saturated = (cmd >= cfg.alpha_s_max and raw > cmd) or (
        cmd <= cfg.alpha_s_min and raw < cmd
    )
    integrator = state.integrator if saturated else integ_cand
    return GovernorState(
        integrator=integrator,
        prev_error=speed_error,
        alpha_s_cmd=cmd,
        d_filt=d_filt,
        error=speed_error,
        p_term=p_term,
        d_term=d_term,
        raw_cmd=raw,
    )
