"""Torsional couplers, lumped gearbox chain, and the generator boundary.

The mechanical path of the integrated model is::

    rotor torque → [stage 1 | stage 2 | ... | stage M] → coupler 1 →
        impeller ⇝ (fluid) ⇝ turbine → coupler 2 → generator → grid

Each gearbox stage is a lumped inertia with an internal ideal gear of ratio
``r`` ("output speed = input speed / ratio", so speed-increasing stages have
r < 1).  Neighboring stages are joined by the downstream stage's mesh
spring/damper acting on the joint twist ``φ_j = θ_j/r_j − θ_{j+1}``; the
first stage's mesh constants are therefore structurally unused (there is no
joint upstream of stage 1).  Twist angles are integrated directly rather
than recovered from absolute angles, which avoids catastrophic cancellation
after many revolutions.

Couplers follow the spring–damper law ``T_r = K_s·θ_rel + C_s·(ω₂ − ω₁)``
with ``θ̇_rel = ω₂ − ω₁``, where body 2 is the upstream (driving) side; the
torque is applied +T_r downstream and −T_r upstream (action–reaction).

The generator boundary is either an ideal bus (turbine speed pinned at
synchronous; the implied reaction torque is reported) or a swing model
``J·ω̇_g = T_c2 − K_sync·δ − D·(ω_g − ω_sync)`` with ``δ̇ = ω_g − ω_sync``.

Numeric defaults for the gearbox, couplers, and generator are engineering
placeholders chosen to put the generator–grid torsional mode near 2 Hz and
all mesh modes well inside the integrator's stable range at dt = 1e-4 s;
they are not measurements of any particular machine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InfeasibleInitialization,
    ValidationError,
)
from .params import TcParameters, pack_parameters
from .steady_state import SteadyPoint, synchronous_speed
from .tc_core import mass_matrix

__all__ = [
    "CouplerParams",
    "CouplerState",
    "coupler_torque",
    "GearStage",
    "TranslationalDof",
    "GearboxConfig",
    "gearbox_derivatives",
    "GeneratorBoundary",
    "generator_torque",
    "ideal_bus_reaction",
    "DrivetrainConfig",
    "EquilibriumInit",
    "equilibrium_init",
    "kernel_args",
    "DEFAULT_GEARBOX",
    "DEFAULT_COUPLER_ROTOR",
    "DEFAULT_COUPLER_GEN",
    "DEFAULT_GENERATOR",
]


@dataclass(frozen=True)
class CouplerParams:
    """Spring–damper shaft coupler: stiffness K_s (N·m/rad), damping C_s
    (N·m·s/rad); at least one of the two must be positive."""

    K_s: float
    C_s: float

    def __post_init__(self):
        if self.K_s < 0.0 or self.C_s < 0.0:
            raise ValidationError("K_s", "coupler constants must be nonnegative")
        if self.K_s == 0.0 and self.C_s == 0.0:
            raise ValidationError("K_s", "coupler needs nonzero stiffness or damping")


@dataclass
class CouplerState:
    """Relative twist angle θ_rel (rad) between the coupled bodies."""

    theta_rel: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.theta_rel):
            raise ValidationError("theta_rel", "must be finite")


def coupler_torque(p: CouplerParams, st: CouplerState,
                   omega_1: float, omega_2: float) -> float:
    """Transmitted torque ``K_s·θ_rel + C_s·(ω₂ − ω₁)``.

    ω₂ is the upstream (driving) side.  The twist evolves as
    ``θ̇_rel = ω₂ − ω₁``; apply +T_r to body 1 and −T_r to body 2.
    """
    return p.K_s * st.theta_rel + p.C_s * (omega_2 - omega_1)


@dataclass(frozen=True)
class GearStage:
    """One lumped gearbox stage: inertia (kg·m²), internal ideal ratio
    (output speed = input speed / ratio), and the mesh spring/damper of the
    joint on this stage's *input* side (unused for the first stage)."""

    inertia: float
    ratio: float
    mesh_k: float
    mesh_c: float

    def __post_init__(self):
        if not self.inertia > 0.0:
            raise ValidationError("inertia", "must be positive")
        if not self.ratio > 0.0:
            raise ValidationError("ratio", "must be positive")
        if not self.mesh_k > 0.0:
            raise ValidationError("mesh_k", "must be positive")
        if self.mesh_c < 0.0:
            raise ValidationError("mesh_c", "must be nonnegative")


@dataclass(frozen=True)
class TranslationalDof:
    """Optional per-stage translational DOF: lumped mass (kg) on a bearing
    spring (N/m) and damper (N·s/m), driven by the net mesh reaction force
    at a 1 m reference radius."""

    mass: float
    bearing_k: float
    bearing_c: float

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValidationError("mass", "must be positive")
        if not self.bearing_k > 0.0:
            raise ValidationError("bearing_k", "must be positive")
        if self.bearing_c < 0.0:
            raise ValidationError("bearing_c", "must be nonnegative")


@dataclass(frozen=True)
class GearboxConfig:
    """Ordered stage chain (rotor side first) with optional translational
    DOFs (one per stage when enabled)."""

    stages: tuple[GearStage, ...]
    translational: tuple[TranslationalDof, ...] | None = None

    def __post_init__(self):
        if len(self.stages) < 1:
            raise ValidationError("stages", "need at least one gearbox stage")
        if self.translational is not None and len(self.translational) != len(self.stages):
            raise ValidationError(
                "translational", "need exactly one translational DOF per stage"
            )

    @property
    def n_stages(self) -> int:
        return len(self.stages)

    @property
    def overall_ratio(self) -> float:
        """Product of stage ratios (output speed = input speed / this)."""
        r = 1.0
        for s in self.stages:
            r *= s.ratio
        return r

    def state_size(self) -> int:
        """Torsional state size: (M−1) joint twists + M body speeds."""
        m = self.n_stages
        n = 2 * m - 1
        if self.translational is not None:
            n += 2 * m
        return n


def gearbox_derivatives(
    cfg: GearboxConfig,
    state: Sequence[float],
    tau_in: float,
    tau_out: float,
) -> np.ndarray:
    """Reference (pure Python) derivatives of the standalone gearbox chain.

    ``state`` = [φ_1..φ_{M−1}, ω_1..ω_M] (+ [x_1, v_1, ..] when translational
    DOFs are configured).  ``tau_in`` acts on stage 1; ``tau_out`` acts on
    stage M's output end (so it enters reflected by stage M's ratio, the
    same way a downstream coupler would).  Used as an oracle/fallback; the
    simulation engine integrates the compiled equivalent.
    """
    m = cfg.n_stages
    x = np.asarray(state, dtype=float)
    if x.shape != (cfg.state_size(),):
        raise DimensionMismatch(
            f"state has {x.shape[0] if x.ndim == 1 else 'bad'} entries, "
            f"expected {cfg.state_size()}"
        )
    dx = np.zeros_like(x)
    J = [s.inertia for s in cfg.stages]
    r = [s.ratio for s in cfg.stages]
    # Joint j (0-based) couples body j's output end to body j+1 and uses
    # the downstream stage's mesh constants.
    joint_T = []
    for j in range(m - 1):
        k_j = cfg.stages[j + 1].mesh_k
        c_j = cfg.stages[j + 1].mesh_c
        slip = x[m - 1 + j] / r[j] - x[m + j]
        T = k_j * x[j] + c_j * slip
        joint_T.append(T)
        dx[j] = slip
        dx[m - 1 + j] -= T / r[j] / J[j]
        dx[m + j] += T / J[j + 1]
    dx[m - 1] += tau_in / J[0]
    dx[2 * m - 2] += tau_out / r[m - 1] / J[m - 1]

    if cfg.translational is not None:
        base = 2 * m - 1
        for i in range(m):
            F = 0.0
            if i > 0:
                F += joint_T[i - 1]
            if i < m - 1:
                F -= joint_T[i] / r[i]
            td = cfg.translational[i]
            xi = x[base + 2 * i]
            vi = x[base + 2 * i + 1]
            dx[base + 2 * i] = vi
            dx[base + 2 * i + 1] = (F - td.bearing_k * xi - td.bearing_c * vi) / td.mass
    return dx


IDEAL_BUS = "ideal-bus"
SWING = "swing"


@dataclass(frozen=True)
class GeneratorBoundary:
    """Grid-side boundary: ``ideal-bus`` pins the turbine shaft at
    synchronous speed; ``swing`` is a rotor-angle model against a stiff bus.

    ``speed_rpm`` sets the synchronous speed; J/D/K_sync are used in swing
    mode only.
    """

    mode: str
    speed_rpm: float
    J: float = 112.6
    D: float = 56.0
    K_sync: float = 1.59e4

    def __post_init__(self):
        if self.mode not in (IDEAL_BUS, SWING):
            raise ValidationError("mode", f"unknown generator mode {self.mode!r}")
        if not self.speed_rpm > 0.0:
            raise ValidationError("speed_rpm", "must be positive")
        if self.mode == SWING:
            if not self.J > 0.0:
                raise ValidationError("J", "swing-mode inertia must be positive")
            if self.D < 0.0:
                raise ValidationError("D", "damping must be nonnegative")
            if not self.K_sync > 0.0:
                raise ValidationError("K_sync", "synchronizing coefficient must be positive")

    @property
    def omega_sync(self) -> float:
        return synchronous_speed(self.speed_rpm)

    def small_signal_frequency(self) -> float:
        """Undamped swing frequency ``sqrt(K_sync/J)/2π`` in Hz."""
        if self.mode != SWING:
            raise ValidationError("mode", "small-signal frequency needs swing mode")
        return math.sqrt(self.K_sync / self.J) / (2.0 * math.pi)


def generator_torque(g: GeneratorBoundary, omega_g: float, delta: float) -> float:
    """Swing-mode air-gap torque ``K_sync·δ + D·(ω_g − ω_sync)``.

    In ideal-bus mode the reaction torque is an algebraic consequence of
    the TC state; use :func:`ideal_bus_reaction` instead.
    """
    if g.mode != SWING:
        raise ValidationError(
            "mode", "generator_torque applies to swing mode; "
            "use ideal_bus_reaction for the pinned-speed boundary"
        )
    return g.K_sync * delta + g.D * (omega_g - g.omega_sync)


def ideal_bus_reaction(
    p: TcParameters,
    omega_i: float,
    omega_t: float,
    V: float,
    alpha_s: float,
    tau_i_ext: float,
) -> tuple[float, float, float]:
    """(τ_t reaction, ω̇_i, V̇) with the turbine speed pinned (ω̇_t = 0).

    Solves the reduced 2×2 system in (ω̇_i, V̇) and back-substitutes the
    turbine row: ``τ_t = τ_t0 + ρ·A·S_t·V̇``.
    """
    from .params import TcState
    from .tc_core import phi as phi_fn
    from .tc_core import steady_impeller_torque, steady_turbine_torque

    s = TcState(omega_i=omega_i, omega_t=omega_t, V=V)
    g = p.geometry
    rho_A = p.fluid.rho * g.A
    m = np.array([
        [p.inertias.I_i, rho_A * g.S_i],
        [g.S_i, g.L_f],
    ])
    b = np.array([
        tau_i_ext - steady_impeller_torque(p, s, alpha_s),
        phi_fn(p, s, alpha_s),
    ])
    d_wi, d_V = np.linalg.solve(m, b)
    tau_t = steady_turbine_torque(p, s) + rho_A * g.S_t * d_V
    return tau_t, d_wi, d_V


@dataclass(frozen=True)
class DrivetrainConfig:
    """Everything mechanical around the TC: gearbox chain, the two couplers
    (rotor→impeller and turbine→generator), and the generator boundary."""

    gearbox: GearboxConfig
    coupler_rotor: CouplerParams
    coupler_gen: CouplerParams
    generator: GeneratorBoundary


@dataclass(frozen=True)
class EquilibriumInit:
    """Static equilibrium of the integrated model at a steady TC point.

    ``x0`` follows the integrated-state layout documented in
    :mod:`tcdrive.kernels`; the named fields record the back-substituted
    torques for reporting and as the matching constant rotor input.
    """

    x0: np.ndarray
    tau_rotor: float
    T_c1: float
    T_c2: float
    body_speeds: np.ndarray
    joint_twists: np.ndarray
    alpha_s0: float


def equilibrium_init(
    dt_cfg: DrivetrainConfig,
    tc: TcParameters,
    point: SteadyPoint,
) -> EquilibriumInit:
    """Back-substitute a steady TC point through the mechanical chain.

    With every slip zero, the coupler and joint torques follow from the
    steady impeller/turbine torques reflected through the gear ratios, and
    each spring's twist is torque/stiffness.  Raises
    :class:`InfeasibleInitialization` when the point is infeasible, the
    turbine is not at synchronous speed, or a required stiffness is zero.
    """
    if not point.feasible:
        raise InfeasibleInitialization(
            f"steady point at nu={point.nu:.4f} is infeasible ({point.reason})"
        )
    gen = dt_cfg.generator
    if abs(point.omega_t - gen.omega_sync) > 1e-9 * max(1.0, gen.omega_sync):
        raise InfeasibleInitialization(
            "steady point turbine speed does not match the generator's "
            f"synchronous speed ({point.omega_t:.6f} vs {gen.omega_sync:.6f} rad/s)"
        )
    gb = dt_cfg.gearbox
    m = gb.n_stages
    r = [s.ratio for s in gb.stages]

    if dt_cfg.coupler_rotor.K_s <= 0.0 or dt_cfg.coupler_gen.K_s <= 0.0:
        raise InfeasibleInitialization(
            "static equilibrium needs positive coupler stiffness on both couplers"
        )

    T_c1 = point.tau_i
    theta_c1 = T_c1 / dt_cfg.coupler_rotor.K_s

    # Speeds: zero slip everywhere.
    body_speeds = np.empty(m)
    body_speeds[m - 1] = r[m - 1] * point.omega_i
    for j in range(m - 2, -1, -1):
        body_speeds[j] = r[j] * body_speeds[j + 1]

    # Joint torques: zero acceleration on every body.
    joint_T = np.empty(max(m - 1, 0))
    if m > 1:
        joint_T[m - 2] = T_c1 / r[m - 1]
        for j in range(m - 3, -1, -1):
            joint_T[j] = joint_T[j + 1] / r[j + 1]
        tau_rotor = joint_T[0] / r[0]
    else:
        tau_rotor = T_c1 / r[0]
    joint_twists = np.array([
        joint_T[j] / gb.stages[j + 1].mesh_k for j in range(m - 1)
    ])

    T_c2 = -point.tau_t  # turbine torque is negative; the coupler carries |τ_t|
    theta_c2 = T_c2 / dt_cfg.coupler_gen.K_s
    if gen.mode == SWING:
        delta0 = T_c2 / gen.K_sync
    else:
        theta_c2 = 0.0
        delta0 = 0.0

    n = 2 * m + 6
    with_tr = gb.translational is not None
    if with_tr:
        n += 2 * m
    x0 = np.zeros(n)
    x0[0:m - 1] = joint_twists
    x0[m - 1:2 * m - 1] = body_speeds
    x0[2 * m - 1] = theta_c1
    x0[2 * m] = point.omega_i
    x0[2 * m + 1] = point.omega_t
    x0[2 * m + 2] = point.V0
    x0[2 * m + 3] = theta_c2
    x0[2 * m + 4] = delta0
    x0[2 * m + 5] = gen.omega_sync
    if with_tr:
        base = 2 * m + 6
        for i in range(m):
            F = 0.0
            if i > 0:
                F += joint_T[i - 1]
            if i < m - 1:
                F -= joint_T[i] / r[i]
            x0[base + 2 * i] = F / gb.translational[i].bearing_k
            x0[base + 2 * i + 1] = 0.0
    return EquilibriumInit(
        x0=x0,
        tau_rotor=tau_rotor,
        T_c1=T_c1,
        T_c2=T_c2,
        body_speeds=body_speeds,
        joint_twists=joint_twists,
        alpha_s0=point.alpha_s0,
    )


def kernel_args(dt_cfg: DrivetrainConfig, tc: TcParameters) -> dict:
    """Flat array arguments for :func:`tcdrive.kernels.integrated_run`."""
    from . import kernels

    gb = dt_cfg.gearbox
    m = gb.n_stages
    g = tc.geometry
    rho_A = tc.fluid.rho * g.A
    minv = np.linalg.inv(mass_matrix(tc))
    m2 = np.array([
        [tc.inertias.I_i, rho_A * g.S_i],
        [g.S_i, g.L_f],
    ])
    m2inv = np.linalg.inv(m2)
    with_tr = 1 if gb.translational is not None else 0
    if with_tr:
        tr_m = np.array([t.mass for t in gb.translational])
        tr_k = np.array([t.bearing_k for t in gb.translational])
        tr_c = np.array([t.bearing_c for t in gb.translational])
    else:
        tr_m = np.ones(m)
        tr_k = np.ones(m)
        tr_c = np.zeros(m)
    return dict(
        M=m,
        Jg=np.array([s.inertia for s in gb.stages]),
        rg=np.array([s.ratio for s in gb.stages]),
        kj=np.array([s.mesh_k for s in gb.stages[1:]]),
        cj=np.array([s.mesh_c for s in gb.stages[1:]]),
        kc1=dt_cfg.coupler_rotor.K_s,
        cc1=dt_cfg.coupler_rotor.C_s,
        kc2=dt_cfg.coupler_gen.K_s,
        cc2=dt_cfg.coupler_gen.C_s,
        Jgen=dt_cfg.generator.J,
        Dgen=dt_cfg.generator.D,
        Ksync=dt_cfg.generator.K_sync,
        wsync=dt_cfg.generator.omega_sync,
        pp=pack_parameters(tc),
        minv=minv,
        m2inv=m2inv,
        mode=kernels.SWING if dt_cfg.generator.mode == SWING else kernels.IDEAL_BUS,
        with_tr=with_tr,
        tr_m=tr_m,
        tr_k=tr_k,
        tr_c=tr_c,
    )


# Documented example values (not from any published machine): a 3-stage
# speed-increasing chain with overall ratio ≈ 1/120.8, mesh modes near
# 65–105 Hz, and a generator–grid swing mode near 1.9 Hz.
DEFAULT_GEARBOX = GearboxConfig(
    stages=(
        GearStage(inertia=1200.0, ratio=1.0 / 6.0, mesh_k=4.0e6, mesh_c=2.0e3),
        GearStage(inertia=85.0, ratio=1.0 / 5.0, mesh_k=4.0e6, mesh_c=2.0e3),
        GearStage(inertia=14.0, ratio=1.0 / 4.0268, mesh_k=1.2e6, mesh_c=8.0e2),
    )
)
DEFAULT_COUPLER_ROTOR = CouplerParams(K_s=2.0e5, C_s=150.0)
DEFAULT_COUPLER_GEN = CouplerParams(K_s=2.6e5, C_s=200.0)
# Ideal bus by default: the TC analyses hold the turbine at synchronous
# speed.  Swing mode (same J/D/K_sync placeholders) exists for governor
# studies.
DEFAULT_GENERATOR = GeneratorBoundary(
    mode=IDEAL_BUS, speed_rpm=1800.0, J=112.6, D=56.0, K_sync=1.59e4
)
