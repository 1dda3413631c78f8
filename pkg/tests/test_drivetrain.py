"""Couplers, gearbox chain, generator boundary, and static initialization."""

import dataclasses
import math

import numpy as np
import pytest

from tcdrive import (
    CouplerParams,
    DimensionMismatch,
    DrivetrainConfig,
    GearboxConfig,
    GearStage,
    GeneratorBoundary,
    InfeasibleInitialization,
    ValidationError,
    equilibrium_init,
    gearbox_derivatives,
)
from tcdrive import kernels
from tcdrive.drivetrain import (
    DEFAULT_COUPLER_GEN,
    DEFAULT_COUPLER_ROTOR,
    DEFAULT_GEARBOX,
    DEFAULT_GENERATOR,
    SWING,
    CouplerState,
    TranslationalDof,
    coupler_torque,
    generator_torque,
    ideal_bus_reaction,
    kernel_args,
)

TAU_ROTOR_REF = 1348049.7746227495


@pytest.fixture(scope="module")
def swing_config():
    return DrivetrainConfig(
        gearbox=DEFAULT_GEARBOX,
        coupler_rotor=DEFAULT_COUPLER_ROTOR,
        coupler_gen=DEFAULT_COUPLER_GEN,
        generator=GeneratorBoundary(mode=SWING, speed_rpm=1800.0),
    )


@pytest.fixture(scope="module")
def bus_config():
    return DrivetrainConfig(
        gearbox=DEFAULT_GEARBOX,
        coupler_rotor=DEFAULT_COUPLER_ROTOR,
        coupler_gen=DEFAULT_COUPLER_GEN,
        generator=DEFAULT_GENERATOR,
    )


@pytest.fixture(scope="module")
def unity_point(type5_sweep):
    return type5_sweep.point_at(1.0)


def test_coupler_validation():
    with pytest.raises(ValidationError):
        CouplerParams(K_s=-1.0, C_s=0.0)
    with pytest.raises(ValidationError):
        CouplerParams(K_s=0.0, C_s=0.0)
    CouplerParams(K_s=0.0, C_s=10.0)  # damping-only coupler is legal
    with pytest.raises(ValidationError):
        CouplerState(theta_rel=math.nan)


def test_coupler_torque_formula():
    p = CouplerParams(K_s=1000.0, C_s=5.0)
    st = CouplerState(theta_rel=0.02)
    assert coupler_torque(p, st, 10.0, 12.5) == pytest.approx(
        1000.0 * 0.02 + 5.0 * 2.5, rel=1e-15
    )


def test_gear_stage_validation():
    with pytest.raises(ValidationError):
        GearStage(inertia=0.0, ratio=0.5, mesh_k=1e6, mesh_c=0.0)
    with pytest.raises(ValidationError):
        GearStage(inertia=1.0, ratio=-0.5, mesh_k=1e6, mesh_c=0.0)
    with pytest.raises(ValidationError):
        GearStage(inertia=1.0, ratio=0.5, mesh_k=0.0, mesh_c=0.0)
    with pytest.raises(ValidationError):
        GearStage(inertia=1.0, ratio=0.5, mesh_k=1e6, mesh_c=-1.0)


def test_gearbox_config_validation():
    with pytest.raises(ValidationError):
        GearboxConfig(stages=())
    stage = GearStage(inertia=1.0, ratio=0.5, mesh_k=1e6, mesh_c=0.0)
    dof = TranslationalDof(mass=10.0, bearing_k=1e7, bearing_c=100.0)
    with pytest.raises(ValidationError):
        GearboxConfig(stages=(stage, stage), translational=(dof,))


def test_overall_ratio_and_state_size():
    gb = DEFAULT_GEARBOX
    assert gb.n_stages == 3
    assert gb.overall_ratio == pytest.approx(
        (1.0 / 6.0) * (1.0 / 5.0) * (1.0 / 4.0268), rel=1e-15
    )
    assert gb.state_size() == 5
    dof = TranslationalDof(mass=10.0, bearing_k=1e7, bearing_c=100.0)
    gb_tr = GearboxConfig(stages=gb.stages, translational=(dof,) * 3)
    assert gb_tr.state_size() == 11


def test_gearbox_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        gearbox_derivatives(DEFAULT_GEARBOX, [0.0, 0.0, 1.0], 0.0, 0.0)


def test_gearbox_static_equilibrium():
    # Zero slip, joint torques balancing the end torques: all rates vanish.
    gb = GearboxConfig(stages=(
        GearStage(inertia=100.0, ratio=0.25, mesh_k=5e5, mesh_c=300.0),
        GearStage(inertia=8.0, ratio=0.2, mesh_k=2e5, mesh_c=100.0),
    ))
    tau_in = 4.0e4
    T0 = tau_in * 0.25                       # joint torque for zero stage-1 accel
    tau_out = -T0 * 0.2                      # reflected load closing stage 2
    w1 = 3.0
    state = [T0 / 2e5, w1, w1 / 0.25]
    dx = gearbox_derivatives(gb, state, tau_in, tau_out)
    assert np.max(np.abs(dx)) < 1e-9


def test_gearbox_energy_conservation_zero_damping():
    # With no mesh damping and no end torques the chain is conservative:
    # E = ½Σ J ω² + ½Σ k φ².
    stages = tuple(dataclasses.replace(s, mesh_c=0.0) for s in DEFAULT_GEARBOX.stages)
    gb = GearboxConfig(stages=stages)
    ks = [s.mesh_k for s in stages[1:]]
    Js = [s.inertia for s in stages]

    def energy(x):
        return 0.5 * sum(k * f * f for k, f in zip(ks, x[:2])) + \
               0.5 * sum(J * w * w for J, w in zip(Js, x[2:]))

    x = np.array([1e-4, -2e-4, 10.0, 55.0, 260.0])
    e0 = energy(x)
    dt = 1e-5
    for _ in range(2000):
        k1 = gearbox_derivatives(gb, x, 0.0, 0.0)
        k2 = gearbox_derivatives(gb, x + 0.5 * dt * k1, 0.0, 0.0)
        k3 = gearbox_derivatives(gb, x + 0.5 * dt * k2, 0.0, 0.0)
        k4 = gearbox_derivatives(gb, x + dt * k3, 0.0, 0.0)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    assert abs(energy(x) - e0) / e0 < 1e-10


def test_translational_dof_derivatives():
    stage = GearStage(inertia=50.0, ratio=0.25, mesh_k=5e5, mesh_c=300.0)
    stage2 = GearStage(inertia=4.0, ratio=0.2, mesh_k=2e5, mesh_c=100.0)
    dof = TranslationalDof(mass=20.0, bearing_k=4e6, bearing_c=500.0)
    gb = GearboxConfig(stages=(stage, stage2), translational=(dof, dof))
    phi0, w1, w2 = 3e-4, 5.0, 18.0
    x1, v1, x2, v2 = 2e-5, 0.01, -1e-5, -0.02
    state = [phi0, w1, w2, x1, v1, x2, v2]
    dx = gearbox_derivatives(gb, state, 100.0, -5.0)
    slip = w1 / 0.25 - w2
    T0 = 2e5 * phi0 + 100.0 * slip
    # Stage 1 feels the reaction −T0/r1; stage 2 feels +T0 (1 m lever arm).
    assert dx[3] == v1
    assert dx[4] == pytest.approx((-T0 / 0.25 - 4e6 * x1 - 500.0 * v1) / 20.0, rel=1e-12)
    assert dx[5] == v2
    assert dx[6] == pytest.approx((T0 - 4e6 * x2 - 500.0 * v2) / 20.0, rel=1e-12)


def test_generator_validation_and_swing_frequency():
    with pytest.raises(ValidationError):
        GeneratorBoundary(mode="flux-capacitor", speed_rpm=1800.0)
    with pytest.raises(ValidationError):
        GeneratorBoundary(mode=SWING, speed_rpm=1800.0, J=0.0)
    g = GeneratorBoundary(mode=SWING, speed_rpm=1800.0)
    f = g.small_signal_frequency()
    assert f == pytest.approx(math.sqrt(g.K_sync / g.J) / (2.0 * math.pi), rel=1e-15)
    assert f == pytest.approx(1.8912, abs=2e-4)
    with pytest.raises(ValidationError):
        DEFAULT_GENERATOR.small_signal_frequency()


def test_generator_torque_swing_and_bus_guard():
    g = GeneratorBoundary(mode=SWING, speed_rpm=1800.0)
    tau = generator_torque(g, g.omega_sync + 0.5, 0.01)
    assert tau == pytest.approx(g.K_sync * 0.01 + g.D * 0.5, rel=1e-14)
    with pytest.raises(ValidationError):
        generator_torque(DEFAULT_GENERATOR, 188.0, 0.0)


def test_ideal_bus_reaction_at_steady_point(type5, unity_point):
    pt = unity_point
    tau_t, d_wi, d_V = ideal_bus_reaction(
        type5, pt.omega_i, pt.omega_t, pt.V0, pt.alpha_s0, pt.tau_i
    )
    assert abs(d_wi) < 1e-8
    assert abs(d_V) < 1e-8
    assert tau_t == pytest.approx(pt.tau_t, rel=1e-9)


def test_equilibrium_init_swing(swing_config, type5, unity_point):
    init = equilibrium_init(swing_config, type5, unity_point)
    pt = unity_point
    gb = swing_config.gearbox
    r = [s.ratio for s in gb.stages]

    assert init.T_c1 == pt.tau_i
    assert init.T_c2 == -pt.tau_t
    assert init.tau_rotor == pytest.approx(TAU_ROTOR_REF, rel=1e-12)
    assert init.tau_rotor == pytest.approx(pt.tau_i / gb.overall_ratio, rel=1e-12)

    # Zero-slip speed ladder from the impeller back to the rotor.
    assert init.body_speeds[2] == r[2] * pt.omega_i
    assert init.body_speeds[0] == pytest.approx(gb.overall_ratio * pt.omega_i,
                                                rel=1e-15)
    # Twists carry the static joint torques.
    joint_T = [init.joint_twists[j] * gb.stages[j + 1].mesh_k for j in range(2)]
    assert joint_T[1] == pytest.approx(pt.tau_i / r[2], rel=1e-14)
    assert joint_T[0] == pytest.approx(joint_T[1] / r[1], rel=1e-14)

    m = gb.n_stages
    x0 = init.x0
    assert x0.shape == (2 * m + 6,)
    assert x0[2 * m] == pt.omega_i
    assert x0[2 * m + 1] == pt.omega_t
    assert x0[2 * m + 2] == pt.V0
    assert x0[2 * m - 1] == init.T_c1 / swing_config.coupler_rotor.K_s
    assert x0[2 * m + 3] == init.T_c2 / swing_config.coupler_gen.K_s
    assert x0[2 * m + 4] == init.T_c2 / swing_config.generator.K_sync
    assert x0[2 * m + 5] == swing_config.generator.omega_sync
    assert init.alpha_s0 == pt.alpha_s0


def test_equilibrium_init_ideal_bus(bus_config, type5, unity_point):
    init = equilibrium_init(bus_config, type5, unity_point)
    m = bus_config.gearbox.n_stages
    # No generator twist or rotor angle in bus mode.
    assert init.x0[2 * m + 3] == 0.0
    assert init.x0[2 * m + 4] == 0.0


@pytest.mark.parametrize("mode_name", ["swing", "ideal"])
def test_equilibrium_rhs_is_stationary(swing_config, bus_config, type5,
                                       unity_point, mode_name):
    cfg = swing_config if mode_name == "swing" else bus_config
    init = equilibrium_init(cfg, type5, unity_point)
    ka = kernel_args(cfg, type5)
    tan_as = math.tan(init.alpha_s0)
    x = init.x0.copy()
    dx = np.zeros_like(x)
    tau_rotor, T_c1, tau_t = kernels._drivetrain_rhs(
        x, dx, 0.0,
        ka["M"], ka["Jg"], ka["rg"], ka["kj"], ka["cj"],
        ka["kc1"], ka["cc1"], ka["kc2"], ka["cc2"],
        ka["Jgen"], ka["Dgen"], ka["Ksync"], ka["wsync"],
        ka["pp"], ka["minv"], ka["m2inv"], ka["mode"],
        init.tau_rotor, math.inf, 0.0, 0.0, 0.0,
        tan_as, 1.0 + tan_as * tan_as,
        ka["with_tr"], ka["tr_m"], ka["tr_k"], ka["tr_c"],
    )
    assert tau_rotor == init.tau_rotor
    assert T_c1 == pytest.approx(init.T_c1, rel=1e-12)
    assert tau_t == pytest.approx(-init.T_c2, rel=1e-12)
    assert np.max(np.abs(dx)) < 1e-8


def test_equilibrium_init_rejections(swing_config, type5, type5_sweep,
                                     unity_point):
    bad_point = next(p for p in type5_sweep.points if not p.feasible)
    with pytest.raises(InfeasibleInitialization):
        equilibrium_init(swing_config, type5, bad_point)

    off_sync = dataclasses.replace(unity_point, omega_t=190.0)
    with pytest.raises(InfeasibleInitialization):
        equilibrium_init(swing_config, type5, off_sync)

    soft = dataclasses.replace(
        swing_config, coupler_rotor=CouplerParams(K_s=0.0, C_s=150.0)
    )
    with pytest.raises(InfeasibleInitialization):
        equilibrium_init(soft, type5, unity_point)


def test_kernel_args_layout(swing_config, type5):
    ka = kernel_args(swing_config, type5)
    assert ka["M"] == 3
    assert len(ka["kj"]) == 2 and len(ka["cj"]) == 2
    assert ka["mode"] == kernels.SWING
    assert ka["with_tr"] == 0
    bus = kernel_args(
        dataclasses.replace(swing_config, generator=DEFAULT_GENERATOR), type5
    )
    assert bus["mode"] == kernels.IDEAL_BUS
