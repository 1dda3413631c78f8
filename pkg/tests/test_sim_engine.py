"""Simulation engine: stepper, steady solves, and the canned experiments."""

import math

import numpy as np
import pytest

from tcdrive import (
    DrivetrainConfig,
    GeneratorBoundary,
    NonFiniteState,
    NoPhysicalRoot,
    TcState,
    ValidationError,
)
from tcdrive.drivetrain import (
    DEFAULT_COUPLER_GEN,
    DEFAULT_COUPLER_ROTOR,
    DEFAULT_GEARBOX,
    DEFAULT_GENERATOR,
    SWING,
)
from tcdrive.sim_engine import (
    TC_TRACE_COLUMNS,
    FrequencySweepSpec,
    RotorProfile,
    SimConfig,
    SimTrace,
    frequency_grid,
    run_frequency_sweep,
    run_integrated,
    run_tc_transient,
    run_torque_ratio_curve,
    solve_flow_from_power_balance,
    solve_torque_equilibrium,
    steady_hold_drift,
    step,
    write_csv,
)

import oracles

ALPHA_HONDA = math.radians(55.62)

# Frozen equilibrium of the automotive unit at (τ_ie, τ_te) = (100, −150).
EQ_REF = (213.55779625724983, 95.62297647179348, 6.822553185715062)

# Frozen torque-ratio anchors for the automotive unit at ω_i = 200 rad/s.
RATIO_LOW_NU_REF = 1.863529240922113    # ν = 0.02
RATIO_MID_NU_REF = 1.4452960988524557   # ν = 0.5
RATIO_UNITY_REF = 0.8491567166109237    # ν = 1.0

# Frozen turbine-speed disturbance amplitudes (5 Hz and 10 Hz, short windows).
AMP_5HZ_REF = 5.312747418907371
AMP_10HZ_REF = 1.6767190188485301


# -- SimConfig / SimTrace ---------------------------------------------------


def test_sim_config_validation():
    with pytest.raises(ValidationError):
        SimConfig(dt=0.0)
    with pytest.raises(ValidationError):
        SimConfig(dt=1e-2, duration=1e-3)
    with pytest.raises(ValidationError):
        SimConfig(integrator="rk45")
    with pytest.raises(ValidationError):
        SimConfig(record_decimation=0)
    cfg = SimConfig(dt=1e-4, duration=0.5, record_decimation=10)
    assert cfg.n_steps == 5000
    import tcdrive.kernels as kernels
    assert SimConfig(integrator="euler").method == kernels.EULER
    assert SimConfig(integrator="rk4").method == kernels.RK4


def test_sim_trace_access_and_shape_guard():
    data = np.array([[0.0, 1.0], [0.1, 2.0]])
    tr = SimTrace(columns=("t", "y"), data=data)
    assert np.array_equal(tr.t, [0.0, 0.1])
    assert np.array_equal(tr.column("y"), [1.0, 2.0])
    with pytest.raises(KeyError):
        tr.column("z")
    with pytest.raises(ValidationError):
        SimTrace(columns=("t",), data=data)


def test_write_csv_format(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, ("a", "b"), [(1.0, 0.1), (2.5, -3.0)])
    raw = path.read_bytes().decode()
    assert "\r" not in raw
    assert raw.splitlines()[0] == "a,b"
    assert raw.splitlines()[1] == "1.0,0.1"
    # Shortest-repr floats survive the round trip bit for bit.
    assert float(raw.splitlines()[1].split(",")[1]) == 0.1


def test_rotor_profile_torque():
    prof = RotorProfile(base=100.0, step_time=1.0, step_delta=10.0,
                        sin_amp=2.0, sin_freq_hz=0.5)
    assert prof.torque(0.5) == pytest.approx(100.0 + 2.0 * math.sin(math.pi * 0.5))
    assert prof.torque(2.0) == pytest.approx(110.0 + 2.0 * math.sin(2.0 * math.pi))
    with pytest.raises(ValidationError):
        RotorProfile(base=math.nan)
    with pytest.raises(ValidationError):
        RotorProfile(base=0.0, sin_freq_hz=-1.0)


# -- Stepper ------------------------------------------------------------------


def test_step_euler_exact_growth():
    lam = -3.0
    x = np.array([2.0])
    out = step(lambda t, y: lam * y, x, 0.0, 0.1, method="euler")
    assert out[0] == 2.0 * (1.0 + lam * 0.1)
    assert x[0] == 2.0  # input untouched


def test_step_rk4_taylor_growth():
    lam = -3.0
    h = 0.1
    out = step(lambda t, y: lam * y, np.array([2.0]), 0.0, h, method="rk4")
    z = lam * h
    growth = 1.0 + z + z**2 / 2.0 + z**3 / 6.0 + z**4 / 24.0
    assert out[0] == pytest.approx(2.0 * growth, rel=1e-15)


def test_step_rejects_unknown_method():
    with pytest.raises(ValidationError):
        step(lambda t, y: y, np.array([1.0]), 0.0, 0.1, method="heun")
    with pytest.raises(ValidationError):
        step(lambda t, y: y, np.array([1.0]), 0.0, 0.0)


def test_step_raises_on_non_finite():
    with pytest.raises(NonFiniteState) as exc:
        step(lambda t, y: y * math.inf, np.array([1.0]), 0.0, 0.1,
             method="euler", step_index=7)
    assert exc.value.step_index == 7


# -- Steady solves ------------------------------------------------------------


@pytest.mark.parametrize("w_i,w_t,alpha_deg", [
    (100.0, 20.0, 55.62),
    (200.0, 150.0, 30.0),
    (150.0, 149.0, 60.0),
])
def test_flow_from_power_balance_matches_oracle(honda, w_i, w_t, alpha_deg):
    alpha = math.radians(alpha_deg)
    V = solve_flow_from_power_balance(honda, w_i, w_t, alpha)
    roots = [r for r in oracles.flow_roots(oracles.HONDA, w_i, w_t, alpha)
             if r > 0.0]
    assert V == pytest.approx(max(roots), rel=1e-10)


def test_flow_from_power_balance_no_root(honda):
    with pytest.raises(NoPhysicalRoot):
        solve_flow_from_power_balance(honda, 1.0, 300.0, math.radians(80.0))


def test_torque_equilibrium_frozen_point(honda):
    eq = solve_torque_equilibrium(honda, 100.0, -150.0, ALPHA_HONDA)
    assert eq.omega_i == pytest.approx(EQ_REF[0], rel=1e-12)
    assert eq.omega_t == pytest.approx(EQ_REF[1], rel=1e-12)
    assert eq.V == pytest.approx(EQ_REF[2], rel=1e-12)


def test_torque_equilibrium_zeroes_derivatives(honda):
    from tcdrive.params import TcInput
    from tcdrive.tc_core import derivatives
    eq = solve_torque_equilibrium(honda, 100.0, -150.0, ALPHA_HONDA)
    u = TcInput(tau_i=100.0, tau_t=-150.0, alpha_s=ALPHA_HONDA)
    d = derivatives(honda, eq, u)
    assert np.max(np.abs(np.asarray(d))) < 1e-8


def test_torque_equilibrium_homogeneity(honda):
    # Degree-2 homogeneity: ×4 torques → exactly ×2 speeds and flow.
    a = solve_torque_equilibrium(honda, 100.0, -150.0, ALPHA_HONDA)
    b = solve_torque_equilibrium(honda, 400.0, -600.0, ALPHA_HONDA)
    assert b.omega_i == 2.0 * a.omega_i
    assert b.omega_t == 2.0 * a.omega_t
    assert b.V == 2.0 * a.V


def test_torque_equilibrium_sign_guards(honda):
    with pytest.raises(ValidationError):
        solve_torque_equilibrium(honda, -100.0, -150.0, ALPHA_HONDA)
    with pytest.raises(ValidationError):
        solve_torque_equilibrium(honda, 100.0, 150.0, ALPHA_HONDA)


# -- Bare-TC transient --------------------------------------------------------


def test_tc_transient_trace_layout(honda):
    s0 = TcState(omega_i=100.0, omega_t=90.0, V=2.0)
    sim = SimConfig(dt=1e-4, duration=0.01, record_decimation=5)
    tr = run_tc_transient(honda, s0, 100.0, -150.0, ALPHA_HONDA, sim)
    assert tr.columns == TC_TRACE_COLUMNS
    assert tr.data.shape == (sim.n_steps // 5 + 1, 4)
    assert tr.data[0].tolist() == [0.0, 100.0, 90.0, 2.0]
    assert np.allclose(np.diff(tr.t), 5e-4, atol=1e-15)


def test_tc_transient_diverges_cleanly(honda):
    s0 = TcState(omega_i=100.0, omega_t=90.0, V=2.0)
    sim = SimConfig(dt=1e-2, duration=10.0)
    with pytest.raises(NonFiniteState):
        run_tc_transient(honda, s0, 1e12, -1e12, ALPHA_HONDA, sim)


def test_tc_transient_approaches_equilibrium(honda):
    # From a perturbed start the state relaxes toward the torque equilibrium.
    eq = solve_torque_equilibrium(honda, 100.0, -150.0, ALPHA_HONDA)
    s0 = TcState(omega_i=eq.omega_i * 1.05, omega_t=eq.omega_t * 0.95, V=eq.V)
    tr = run_tc_transient(honda, s0, 100.0, -150.0, ALPHA_HONDA,
                          SimConfig(dt=1e-4, duration=5.0, record_decimation=100))
    end = tr.data[-1]
    assert end[1] == pytest.approx(eq.omega_i, rel=1e-3)
    assert end[2] == pytest.approx(eq.omega_t, rel=1e-3)


# -- Frequency sweep ----------------------------------------------------------


def test_frequency_grid_values():
    assert frequency_grid(0.5, 100.0, 1) == [0.5, 5.0, 50.0, 100.0]
    g = frequency_grid(1.0, 10.0, 2)
    assert g[0] == 1.0 and g[-1] == 10.0
    assert len(g) == 3  # 1, 10^0.5, then the cap
    # The cap is not duplicated when the grid lands on it exactly.
    assert frequency_grid(1.0, 10.0, 1) == [1.0, 10.0]


def test_frequency_sweep_spec_validation():
    with pytest.raises(ValidationError):
        FrequencySweepSpec(f_lo=0.0)
    with pytest.raises(ValidationError):
        FrequencySweepSpec(f_lo=10.0, f_hi=5.0)
    with pytest.raises(ValidationError):
        FrequencySweepSpec(points_per_decade=0)
    with pytest.raises(ValidationError):
        FrequencySweepSpec(amplitude=-1.0)
    with pytest.raises(ValidationError):
        FrequencySweepSpec(settle_time=0.0)


def test_frequency_sweep_small(honda, tmp_path):
    spec = FrequencySweepSpec(f_lo=5.0, f_hi=10.0, points_per_decade=1,
                              settle_time=0.2, measure_time=0.5)
    res = run_frequency_sweep(honda, spec, ALPHA_HONDA)
    assert [q.f_hz for q in res.points] == [5.0, 10.0]
    eq = solve_torque_equilibrium(honda, spec.tau_ie, spec.tau_te, ALPHA_HONDA)
    assert res.initial_state == eq

    assert res.points[0].amp_omega_t == pytest.approx(AMP_5HZ_REF, rel=1e-9)
    assert res.points[1].amp_omega_t == pytest.approx(AMP_10HZ_REF, rel=1e-9)
    # Low-pass behavior and the convenience accessor.
    assert res.amplitude_at(10.0) < res.amplitude_at(5.0)
    assert res.amplitude_at(5.0) == res.points[0].amp_omega_t
    for q in res.points:
        assert q.ratio_t_over_i == pytest.approx(q.amp_omega_t / q.amp_omega_i,
                                                 rel=1e-12)

    path = tmp_path / "sweep.csv"
    res.to_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == ",".join(res.CSV_HEADER)
    assert len(lines) == 3
    assert float(lines[1].split(",")[2]) == res.points[0].amp_omega_t


# -- Torque-ratio curve -------------------------------------------------------


def test_torque_curve_matches_oracle(honda):
    grid = [0.02, 0.5, 1.0]
    res = run_torque_ratio_curve(honda, 200.0, ALPHA_HONDA, grid)
    for q in res.points:
        ref = oracles.torque_ratio(oracles.HONDA, 200.0, q.nu, ALPHA_HONDA)
        assert q.torque_ratio == pytest.approx(ref, rel=1e-10)
    assert res.points[0].torque_ratio == pytest.approx(RATIO_LOW_NU_REF, rel=1e-12)
    assert res.points[1].torque_ratio == pytest.approx(RATIO_MID_NU_REF, rel=1e-12)
    assert res.points[2].torque_ratio == pytest.approx(RATIO_UNITY_REF, rel=1e-12)
    assert res.points[0].torque_ratio > 1.0       # torque multiplication
    assert res.points[2].torque_ratio < 1.0       # coupling-region decay


def test_torque_curve_marks_infeasible_points(honda):
    res = run_torque_ratio_curve(honda, 200.0, math.radians(-85.0),
                                 [0.02, 0.5, 1.0])
    first = res.points[0]
    assert not first.feasible
    assert math.isnan(first.torque_ratio) and math.isnan(first.V)
    assert res.points[1].feasible and res.points[2].feasible


def test_torque_curve_validation(honda):
    with pytest.raises(ValidationError):
        run_torque_ratio_curve(honda, 0.0, ALPHA_HONDA, [0.5])
    with pytest.raises(ValidationError):
        run_torque_ratio_curve(honda, 200.0, ALPHA_HONDA, [0.0])
    with pytest.raises(ValidationError):
        run_torque_ratio_curve(honda, 200.0, ALPHA_HONDA, [1.2])


def test_torque_curve_csv(honda, tmp_path):
    res = run_torque_ratio_curve(honda, 200.0, ALPHA_HONDA, [0.5, 1.0])
    path = tmp_path / "curve.csv"
    res.to_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == ",".join(res.CSV_HEADER)
    assert float(lines[1].split(",")[4]) == res.points[0].torque_ratio


# -- Hold drift and the integrated run ---------------------------------------


def test_steady_hold_drift_short(type5, type5_sweep):
    pt = type5_sweep.point_at(1.0)
    drift = steady_hold_drift(type5, pt, duration=0.05, dt=1e-4)
    assert drift.shape == (3,)
    assert np.max(drift) < 1e-9


def test_steady_hold_drift_rejects_infeasible(type5, type5_sweep):
    bad = next(p for p in type5_sweep.points if not p.feasible)
    with pytest.raises(NoPhysicalRoot):
        steady_hold_drift(type5, bad)


def _drivetrain(generator):
    return DrivetrainConfig(
        gearbox=DEFAULT_GEARBOX,
        coupler_rotor=DEFAULT_COUPLER_ROTOR,
        coupler_gen=DEFAULT_COUPLER_GEN,
        generator=generator,
    )


def test_integrated_hold_ideal_bus(type5, type5_sweep):
    pt = type5_sweep.point_at(1.0)
    cfg = _drivetrain(DEFAULT_GENERATOR)
    res = run_integrated(type5, cfg, pt, profile=None,
                         sim=SimConfig(dt=1e-4, duration=0.05))
    tr = res.trace
    assert tr.columns[:8] == ("t", "omega_i", "omega_t", "V", "alpha_s",
                              "tau_rotor", "tau_c1", "tau_t_ext")
    # Vane frozen, rotor torque constant, turbine speed pinned bitwise.
    assert np.all(tr.column("alpha_s") == res.init.alpha_s0)
    assert np.all(tr.column("tau_rotor") == res.init.tau_rotor)
    assert np.all(tr.column("omega_t") == pt.omega_t)
    # Remaining states stay at equilibrium to integrator precision.
    assert np.max(np.abs(tr.column("omega_i") - pt.omega_i)) < 1e-6
    assert np.max(np.abs(tr.column("V") - pt.V0)) < 1e-6


def test_integrated_hold_swing(type5, type5_sweep):
    pt = type5_sweep.point_at(1.0)
    cfg = _drivetrain(GeneratorBoundary(mode=SWING, speed_rpm=1800.0))
    res = run_integrated(type5, cfg, pt, profile=None,
                         sim=SimConfig(dt=1e-4, duration=0.05))
    tr = res.trace
    assert np.max(np.abs(tr.column("omega_t") - pt.omega_t)) < 1e-6
    assert np.max(np.abs(tr.column("omega_gen") - cfg.generator.omega_sync)) < 1e-6
    assert np.max(np.abs(tr.column("delta") - res.init.x0[2 * 3 + 4])) < 1e-8
