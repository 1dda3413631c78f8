"""Torque-converter parameter and state containers.

All angles are stored in radians; file and CLI interfaces use degree-valued
fields with a ``_deg`` suffix and convert at the boundary (see
:mod:`tcdrive.config`).  Instances are frozen dataclasses: every operation on
them is a pure function, safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError

__all__ = [
    "TcGeometry",
    "TcFluidLoss",
    "TcInertias",
    "TcParameters",
    "TcState",
    "TcInput",
    "MASS_MATRIX_DET_FLOOR",
    "pack_parameters",
    "PACKED_SIZE",
]

# Below this |det M| the parameter set is rejected as non-physical.
MASS_MATRIX_DET_FLOOR = 1e-12

_HALF_PI = math.pi / 2.0


def _require(cond: bool, field: str, message: str) -> None:
    if not cond:
        raise ValidationError(field, message)


def _finite(value: float, field: str) -> float:
    value = float(value)
    _require(math.isfinite(value), field, "must be finite")
    return value


@dataclass(frozen=True)
class TcGeometry:
    """Geometric description of one torque converter.

    Radii and lengths in metres, areas in square metres, angles in radians.
    ``alpha_*`` are blade exit angles, ``alpha_*_in`` blade inlet angles;
    ``S_*`` are the characteristic design-area constants.
    """

    R_i: float
    R_t: float
    R_s: float
    A: float
    L_f: float
    alpha_i: float
    alpha_t: float
    alpha_i_in: float
    alpha_t_in: float
    alpha_s_in: float
    S_i: float
    S_t: float
    S_s: float

    def __post_init__(self):
        for name in ("R_i", "R_t", "R_s", "A", "L_f"):
            value = _finite(getattr(self, name), f"geometry.{name}")
            _require(value > 0.0, f"geometry.{name}", "must be strictly positive")
        for name in ("alpha_i", "alpha_t", "alpha_i_in", "alpha_t_in", "alpha_s_in"):
            value = _finite(getattr(self, name), f"geometry.{name}")
            _require(
                -_HALF_PI < value < _HALF_PI,
                f"geometry.{name}",
                "angle must lie strictly inside (-pi/2, pi/2)",
            )
        for name in ("S_i", "S_t", "S_s"):
            _finite(getattr(self, name), f"geometry.{name}")


@dataclass(frozen=True)
class TcFluidLoss:
    """Working-fluid density and loss coefficients."""

    rho: float
    f: float
    C_sh_i: float
    C_sh_t: float
    C_sh_s: float

    def __post_init__(self):
        _require(_finite(self.rho, "fluid.rho") > 0.0, "fluid.rho", "must be > 0")
        _require(_finite(self.f, "fluid.f") >= 0.0, "fluid.f", "must be >= 0")
        for name in ("C_sh_i", "C_sh_t", "C_sh_s"):
            value = _finite(getattr(self, name), f"fluid.{name}")
            _require(value >= 0.0, f"fluid.{name}", "must be >= 0")


@dataclass(frozen=True)
class TcInertias:
    """Rotating-element moments of inertia (kg·m²).

    The stator is fixed, so ``I_s`` (like ``S_s``) is carried for table
    fidelity but takes no part in the dynamics.
    """

    I_i: float
    I_t: float
    I_s: float

    def __post_init__(self):
        _require(_finite(self.I_i, "inertias.I_i") > 0.0, "inertias.I_i", "must be > 0")
        _require(_finite(self.I_t, "inertias.I_t") > 0.0, "inertias.I_t", "must be > 0")
        _require(_finite(self.I_s, "inertias.I_s") >= 0.0, "inertias.I_s", "must be >= 0")


@dataclass(frozen=True)
class TcParameters:
    """Complete parameter set: geometry + fluid losses + inertias.

    Construction validates the componentwise invariants and rejects
    parameter sets whose mass matrix is numerically singular.
    """

    geometry: TcGeometry
    fluid: TcFluidLoss
    inertias: TcInertias

    def __post_init__(self):
        det = self.mass_matrix_det()
        _require(
            abs(det) > MASS_MATRIX_DET_FLOOR,
            "tc",
            f"mass matrix is numerically singular (|det|={abs(det):.3e} "
            f"<= {MASS_MATRIX_DET_FLOOR:g})",
        )

    def mass_matrix_det(self) -> float:
        """Determinant of the 3x3 mass matrix in state order (ω_t, ω_i, V)."""
        g, n = self.geometry, self.inertias
        rho_A = self.fluid.rho * g.A
        # | I_t   0     rho*A*S_t |
        # | 0     I_i   rho*A*S_i |
        # | S_t   S_i   L_f       |
        return (
            n.I_t * (n.I_i * g.L_f - rho_A * g.S_i * g.S_i)
            - rho_A * g.S_t * n.I_i * g.S_t
        )

    def with_geometry(self, **changes) -> "TcParameters":
        """Copy with selected geometry fields replaced (re-validates)."""
        return TcParameters(
            geometry=replace(self.geometry, **changes),
            fluid=self.fluid,
            inertias=self.inertias,
        )


@dataclass(frozen=True)
class TcState:
    """Dynamic state: impeller speed, turbine speed (rad/s), flow velocity (m/s)."""

    omega_i: float
    omega_t: float
    V: float

    def __post_init__(self):
        for name in ("omega_i", "omega_t", "V"):
            _finite(getattr(self, name), f"state.{name}")


@dataclass(frozen=True)
class TcInput:
    """External inputs: shaft torques (N·m) and the stator exit angle (rad)."""

    tau_i: float
    tau_t: float
    alpha_s: float

    def __post_init__(self):
        _finite(self.tau_i, "input.tau_i")
        _finite(self.tau_t, "input.tau_t")
        alpha = _finite(self.alpha_s, "input.alpha_s")
        _require(
            -_HALF_PI < alpha < _HALF_PI,
            "input.alpha_s",
            "stator angle must lie strictly inside (-pi/2, pi/2)",
        )


# ---------------------------------------------------------------------------
# Packed layout for the compiled kernels
# ---------------------------------------------------------------------------
#
# Index map for the flat float64 parameter vector consumed by
# tcdrive.kernels.  Tangents/secants are precomputed so the hot loops touch
# no trig.
#
#  0 rho      3 R_i      6 tan(alpha_i)      11 sec^2(alpha_i)  17 I_i
#  1 A        4 R_t      7 tan(alpha_t)      12 sec^2(alpha_t)  18 I_t
#  2 L_f      5 R_s      8 tan(alpha_i_in)   13 C_sh_i          19 S_i
#                        9 tan(alpha_t_in)   14 C_sh_t          20 S_t
#                       10 tan(alpha_s_in)   15 C_sh_s
#                                            16 f
PACKED_SIZE = 21


def pack_parameters(p: TcParameters) -> np.ndarray:
    """Flatten a parameter set into the kernel layout described above."""
    g, fl, n = p.geometry, p.fluid, p.inertias
    out = np.empty(PACKED_SIZE, dtype=np.float64)
    out[0] = fl.rho
    out[1] = g.A
    out[2] = g.L_f
    out[3] = g.R_i
    out[4] = g.R_t
    out[5] = g.R_s
    out[6] = math.tan(g.alpha_i)
    out[7] = math.tan(g.alpha_t)
    out[8] = math.tan(g.alpha_i_in)
    out[9] = math.tan(g.alpha_t_in)
    out[10] = math.tan(g.alpha_s_in)
    out[11] = 1.0 + out[6] * out[6]
    out[12] = 1.0 + out[7] * out[7]
    out[13] = fl.C_sh_i
    out[14] = fl.C_sh_t
    out[15] = fl.C_sh_s
    out[16] = fl.f
    out[17] = n.I_i
    out[18] = n.I_t
    out[19] = g.S_i
    out[20] = g.S_t
    return out
