"""Algebraic closures and mass-matrix dynamics of the torque converter.

The model has three dynamic states in the fixed order (ω_t, ω_i, V) —
turbine speed, impeller speed, torus flow velocity — coupled through a
constant 3×3 mass matrix::

    | I_t   0     ρ·A·S_t |   | ω̇_t |   | τ_t − τ_t0 |
    | 0     I_i   ρ·A·S_i | · | ω̇_i | = | τ_i − τ_i0 |
    | S_t   S_i   L_f     |   | V̇   |   | Φ          |

τ_i0 and τ_t0 are the steady shaft torques, and Φ collects the flow-momentum
terms minus the shock/friction loss ψ.  At a true steady state the whole
right-hand side vanishes.

All functions here are pure; arrays are only allocated at the boundary.  The
compiled hot loops live in :mod:`tcdrive.kernels` and are verified against
these reference implementations.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from .errors import SingularMassMatrix
from .params import MASS_MATRIX_DET_FLOOR, TcInput, TcParameters, TcState

__all__ = [
    "volume_flow",
    "steady_impeller_torque",
    "steady_turbine_torque",
    "shock_velocities",
    "relative_velocities",
    "loss_term",
    "phi",
    "mass_matrix",
    "derivatives",
]


def volume_flow(V: float, A: float) -> float:
    """Axial torus volume flow Q = V·A (m³/s); sign follows V."""
    if A <= 0.0:
        raise ValueError("flow area must be positive")
    return V * A


def steady_impeller_torque(p: TcParameters, s: TcState, alpha_s: float) -> float:
    """Steady impeller torque τ_i0 = ρQ[ω_i·R_i² + V(R_i·tanα_i − R_s·tanα_s)]."""
    g = p.geometry
    Q = volume_flow(s.V, g.A)
    return p.fluid.rho * Q * (
        s.omega_i * g.R_i**2
        + s.V * (g.R_i * math.tan(g.alpha_i) - g.R_s * math.tan(alpha_s))
    )


def steady_turbine_torque(p: TcParameters, s: TcState) -> float:
    """Steady turbine torque τ_t0 = ρQ[ω_t·R_t² − ω_i·R_i² + V(R_t·tanα_t − R_i·tanα_i)]."""
    g = p.geometry
    Q = volume_flow(s.V, g.A)
    return p.fluid.rho * Q * (
        s.omega_t * g.R_t**2
        - s.omega_i * g.R_i**2
        + s.V * (g.R_t * math.tan(g.alpha_t) - g.R_i * math.tan(g.alpha_i))
    )


def shock_velocities(
    p: TcParameters, s: TcState, alpha_s: float
) -> Tuple[float, float, float]:
    """Shock (incidence) velocities at the impeller, turbine, and stator inlets.

    V_sh_i = −R_s·ω_i + V(tanα_s − tanα_i′)
    V_sh_t =  R_i(ω_i − ω_t) + V(tanα_i − tanα_t′)
    V_sh_s =  R_t·ω_t + V(tanα_t − tanα_s′)
    """
    g = p.geometry
    v_sh_i = -g.R_s * s.omega_i + s.V * (math.tan(alpha_s) - math.tan(g.alpha_i_in))
    v_sh_t = g.R_i * (s.omega_i - s.omega_t) + s.V * (
        math.tan(g.alpha_i) - math.tan(g.alpha_t_in)
    )
    v_sh_s = g.R_t * s.omega_t + s.V * (math.tan(g.alpha_t) - math.tan(g.alpha_s_in))
    return (v_sh_i, v_sh_t, v_sh_s)


def relative_velocities(
    p: TcParameters, alpha_s: float, V: float
) -> Tuple[float, float, float]:
    """Squared blade-relative velocities (V*² = V²·sec²α) at the three exits."""
    g = p.geometry
    sec2 = lambda a: 1.0 + math.tan(a) ** 2
    v2 = V * V
    return (v2 * sec2(g.alpha_i), v2 * sec2(g.alpha_t), v2 * sec2(alpha_s))


def loss_term(p: TcParameters, s: TcState, alpha_s: float) -> float:
    """Shock + friction loss ψ = ½(Σ C_sh·V_sh² + f·Σ V*²); always ≥ 0."""
    fl = p.fluid
    v_sh_i, v_sh_t, v_sh_s = shock_velocities(p, s, alpha_s)
    r_i, r_t, r_s = relative_velocities(p, alpha_s, s.V)
    return 0.5 * (
        fl.C_sh_i * v_sh_i**2
        + fl.C_sh_t * v_sh_t**2
        + fl.C_sh_s * v_sh_s**2
        + fl.f * (r_i + r_t + r_s)
    )


def phi(p: TcParameters, s: TcState, alpha_s: float) -> float:
    """Flow-momentum balance Φ; its zero locus defines steady flow.

    Φ = R_i²ω_i² + R_t²ω_t² − R_i²ω_tω_i
        + ω_i·V(R_i·tanα_i − R_s·tanα_s)
        + ω_t·V(R_t·tanα_t − R_i·tanα_i) − ψ
    """
    g = p.geometry
    return (
        g.R_i**2 * s.omega_i**2
        + g.R_t**2 * s.omega_t**2
        - g.R_i**2 * s.omega_t * s.omega_i
        + s.omega_i * s.V * (g.R_i * math.tan(g.alpha_i) - g.R_s * math.tan(alpha_s))
        + s.omega_t * s.V * (g.R_t * math.tan(g.alpha_t) - g.R_i * math.tan(g.alpha_i))
        - loss_term(p, s, alpha_s)
    )


def mass_matrix(p: TcParameters) -> np.ndarray:
    """3×3 mass matrix in state order (ω_t, ω_i, V).

    Raises
    ------
    SingularMassMatrix
        If |det M| falls below the construction-time floor (defensive; the
        parameter constructor already rejects such sets).
    """
    g, n = p.geometry, p.inertias
    rho_A = p.fluid.rho * g.A
    M = np.array(
        [
            [n.I_t, 0.0, rho_A * g.S_t],
            [0.0, n.I_i, rho_A * g.S_i],
            [g.S_t, g.S_i, g.L_f],
        ],
        dtype=np.float64,
    )
    if abs(np.linalg.det(M)) <= MASS_MATRIX_DET_FLOOR:
        raise SingularMassMatrix(
            f"|det M| = {abs(np.linalg.det(M)):.3e} below floor"
        )
    return M


def derivatives(p: TcParameters, s: TcState, u: TcInput) -> np.ndarray:
    """State derivatives (ω̇_t, ω̇_i, V̇) from M·ẋ = b.

    b = (τ_t − τ_t0, τ_i − τ_i0, Φ); at a steady state b = 0 and the result
    is exactly zero.
    """
    M = mass_matrix(p)
    b = np.array(
        [
            u.tau_t - steady_turbine_torque(p, s),
            u.tau_i - steady_impeller_torque(p, s, u.alpha_s),
            phi(p, s, u.alpha_s),
        ],
        dtype=np.float64,
    )
    return np.linalg.solve(M, b)
