"""tcdrive — hydrodynamic torque-converter drivetrains for wind turbines.

A simulation toolkit for variable-ratio torque-converter drivetrains that
couple a wind-turbine rotor to a directly grid-connected synchronous
generator.  The package covers the three-state converter model, steady-state
initialization across the operating range, geometric scaling of a reference
automotive converter to turbine ratings, the gearbox/coupler/generator
chain, a discrete stator-vane governor, deterministic fixed-step transient
simulation, and a batch CLI.

Set ``TCDRIVE_NO_NUMBA=1`` before import to run the pure-NumPy kernel
fallback (identical results, no JIT warm-up; useful for debugging).
"""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatch,
    InfeasibleInitialization,
    InfeasibleSolution,
    NoBracket,
    NonFiniteState,
    NoPhysicalRoot,
    NumericalError,
    OutOfScheduleRange,
    ParseError,
    SingularMassMatrix,
    TcDriveError,
    ValidationError,
    ZeroOutputPower,
)
from .params import (
    TcFluidLoss,
    TcGeometry,
    TcInertias,
    TcInput,
    TcParameters,
    TcState,
)
from .tc_core import (
    derivatives,
    loss_term,
    mass_matrix,
    phi,
    shock_velocities,
    steady_impeller_torque,
    steady_turbine_torque,
    volume_flow,
)
from .steady_state import (
    RatedSpec,
    SteadyPoint,
    SweepOptions,
    SweepResult,
    rated_torque,
    solve_flow_velocity,
    solve_point,
    solve_stator_angle,
    sweep,
    synchronous_speed,
    turbine_torque_schedule,
)
from .scaling import (
    TYPE5_SCALING,
    GreedyResult,
    ScalingAdjustment,
    SearchSpace,
    apply_scaling,
    greedy_search,
    unity_point_objective,
)
from .drivetrain import (
    CouplerParams,
    DrivetrainConfig,
    EquilibriumInit,
    GearboxConfig,
    GearStage,
    GeneratorBoundary,
    TranslationalDof,
    equilibrium_init,
    gearbox_derivatives,
)
from .governor import GovernorConfig, GovernorState, PidGains, bounds_from_sweep, init_from_steady
from .sim_engine import (
    FrequencySweepSpec,
    RotorProfile,
    SimConfig,
    SimTrace,
    run_frequency_sweep,
    run_integrated,
    run_tc_transient,
    run_torque_ratio_curve,
    solve_torque_equilibrium,
    steady_hold_drift,
)
from .config import FullConfig, load_builtin, load_config, parse_config

__all__ = [
    "__version__",
    # errors
    "TcDriveError", "ValidationError", "ParseError", "NumericalError",
    "SingularMassMatrix", "NoPhysicalRoot", "NoBracket", "OutOfScheduleRange",
    "ZeroOutputPower", "InfeasibleSolution", "InfeasibleInitialization",
    "NonFiniteState", "DimensionMismatch",
    # parameters and core model
    "TcGeometry", "TcFluidLoss", "TcInertias", "TcParameters", "TcState", "TcInput",
    "volume_flow", "steady_impeller_torque", "steady_turbine_torque",
    "shock_velocities", "loss_term", "phi", "mass_matrix", "derivatives",
    # steady state
    "RatedSpec", "SweepOptions", "SteadyPoint", "SweepResult",
    "synchronous_speed", "rated_torque", "turbine_torque_schedule",
    "solve_flow_velocity", "solve_stator_angle", "solve_point", "sweep",
    # scaling
    "ScalingAdjustment", "SearchSpace", "GreedyResult", "TYPE5_SCALING",
    "apply_scaling", "unity_point_objective", "greedy_search",
    # drivetrain
    "CouplerParams", "GearStage", "TranslationalDof", "GearboxConfig",
    "GeneratorBoundary", "DrivetrainConfig", "EquilibriumInit",
    "gearbox_derivatives", "equilibrium_init",
    # governor
    "PidGains", "GovernorConfig", "GovernorState", "bounds_from_sweep",
    "init_from_steady",
    # simulation
    "SimConfig", "SimTrace", "RotorProfile", "FrequencySweepSpec",
    "run_tc_transient", "run_frequency_sweep", "run_torque_ratio_curve",
    "run_integrated", "solve_torque_equilibrium", "steady_hold_drift",
    # config
    "FullConfig", "load_config", "parse_config", "load_builtin",
]
