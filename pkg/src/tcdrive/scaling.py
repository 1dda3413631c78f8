"""Geometric scaling of a reference TC design and the design search.

A small automotive torque converter is scaled up to wind-turbine duty by a
six-component adjustment: one homothety factor ``K`` applied to the
flow-path lengths (radii and flow length, with the annulus area going as
``K²``) and five blade-angle offsets.  The signs of the offsets are part of
the design rule — opening some cascades while closing others:

====================  ==================
quantity              new value
====================  ==================
R_i, R_t, R_s, L_f    K · old
A                     K² · old
α_i (impeller exit)   old + b_i
α_t (turbine exit)    old − b_t
α_i′ (impeller inlet) old − b_i′
α_t′ (turbine inlet)  old + b_t′
α_s′ (stator inlet)   old + b_s′
====================  ==================

Inertias, fluid properties, and the momentum arms ``S`` are left untouched:
they describe the fluid ring's dynamic response, which the design search
does not tune.

The design objective is evaluated at the unity-speed-ratio rated point:
both rotors at synchronous speed, turbine reaction at rated torque, and the
impeller blade torque matched to rated drive torque.  The residual of the
power balance ``|Φ|`` is then exactly the hydraulic dissipation and can
never reach zero; the search minimizes it by cyclic coordinate descent over
per-component grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InfeasibleSolution, NoPhysicalRoot, ValidationError
from .params import TcParameters, TcState
from .rootfind import quadratic_roots
from .steady_state import RatedSpec, rated_torque, synchronous_speed
from .tc_core import phi

__all__ = [
    "ScalingAdjustment",
    "TYPE5_SCALING",
    "SearchSpace",
    "apply_scaling",
    "unity_point_objective",
    "greedy_search",
    "GreedyResult",
    "INFEASIBLE_PENALTY",
    "FIELD_ORDER",
]

#: Objective value assigned to adjustments whose rated point has no
#: physical solution, so the search can walk past infeasible regions.
INFEASIBLE_PENALTY = 1e12

FIELD_ORDER = ("K", "b_i", "b_t", "b_i_in", "b_t_in", "b_s_in")


@dataclass(frozen=True)
class ScalingAdjustment:
    """Six-component design adjustment (offsets in radians).

    ``K`` is the geometric scale factor; ``b_*`` are the blade-angle offsets
    applied with the signs documented in the module docstring.
    """

    K: float
    b_i: float
    b_t: float
    b_i_in: float
    b_t_in: float
    b_s_in: float

    def __post_init__(self):
        if not (self.K > 0.0 and math.isfinite(self.K)):
            raise ValidationError("K", "scale factor must be positive and finite")
        for name in FIELD_ORDER[1:]:
            v = getattr(self, name)
            if not (math.isfinite(v) and abs(v) < math.pi / 2):
                raise ValidationError(name, "angle offset must be finite and |b| < 90 deg")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in FIELD_ORDER)

    @staticmethod
    def identity() -> "ScalingAdjustment":
        return ScalingAdjustment(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def from_degrees(K: float, b_i: float, b_t: float, b_i_in: float,
                     b_t_in: float, b_s_in: float) -> "ScalingAdjustment":
        return ScalingAdjustment(
            K,
            math.radians(b_i),
            math.radians(b_t),
            math.radians(b_i_in),
            math.radians(b_t_in),
            math.radians(b_s_in),
        )


#: Published design adjustment producing the 2 MW Type-5 converter from the
#: automotive reference geometry.
TYPE5_SCALING = ScalingAdjustment.from_degrees(
    K=2.73,
    b_i=43.0693,
    b_t=3.3333,
    b_i_in=3.5588,
    b_t_in=0.0980,
    b_s_in=2.5098,
)


def _default_bounds(name: str) -> tuple[float, float, int]:
    if name == "K":
        return (1.0, 5.0, 401)
    return (0.0, math.radians(60.0), 613)


@dataclass(frozen=True)
class SearchSpace:
    """Per-component (lower, upper, grid count) bounds for the search.

    Angle bounds in radians.  Defaults: K on [1, 5] with 401 points, every
    angle offset on [0°, 60°] with 613 points.
    """

    K: tuple[float, float, int] = field(default_factory=lambda: _default_bounds("K"))
    b_i: tuple[float, float, int] = field(default_factory=lambda: _default_bounds("b_i"))
    b_t: tuple[float, float, int] = field(default_factory=lambda: _default_bounds("b_t"))
    b_i_in: tuple[float, float, int] = field(default_factory=lambda: _default_bounds("b_i_in"))
    b_t_in: tuple[float, float, int] = field(default_factory=lambda: _default_bounds("b_t_in"))
    b_s_in: tuple[float, float, int] = field(default_factory=lambda: _default_bounds("b_s_in"))

    def __post_init__(self):
        for name in FIELD_ORDER:
            lo, hi, n = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValidationError(name, "bounds must be finite")
            if n == 1:
                if lo != hi:
                    raise ValidationError(name, "single-point grid needs lower == upper")
            elif not (lo < hi and n >= 2):
                raise ValidationError(name, "need lower < upper and grid count >= 2")

    def grid(self, name: str) -> np.ndarray:
        lo, hi, n = getattr(self, name)
        return np.linspace(lo, hi, n)

    @staticmethod
    def single_point(adj: ScalingAdjustment) -> "SearchSpace":
        """Space collapsed to exactly one adjustment."""
        return SearchSpace(**{
            name: (getattr(adj, name), getattr(adj, name), 1) for name in FIELD_ORDER
        })


def apply_scaling(p: TcParameters, adj: ScalingAdjustment) -> TcParameters:
    """New parameter set with the adjustment applied to the geometry.

    Raises :class:`ValidationError` when a scaled angle leaves (−90°, 90°)
    or any other parameter invariant breaks.
    """
    g = p.geometry
    return p.with_geometry(
        R_i=g.R_i * adj.K,
        R_t=g.R_t * adj.K,
        R_s=g.R_s * adj.K,
        A=g.A * adj.K**2,
        L_f=g.L_f * adj.K,
        alpha_i=g.alpha_i + adj.b_i,
        alpha_t=g.alpha_t - adj.b_t,
        alpha_i_in=g.alpha_i_in - adj.b_i_in,
        alpha_t_in=g.alpha_t_in + adj.b_t_in,
        alpha_s_in=g.alpha_s_in + adj.b_s_in,
    )


def unity_point_objective(p: TcParameters, spec: RatedSpec) -> float:
    """|Φ| at the unity-ratio rated point (equals the hydraulic loss term).

    Both rotors spin at synchronous speed; V solves the turbine balance at
    rated reaction torque and the stator angle solves the impeller balance
    at rated drive torque (unity torque ratio).  Raises
    :class:`InfeasibleSolution` when no physical solution exists (no
    positive V root or an undefined stator angle).
    """
    g = p.geometry
    omega = synchronous_speed(spec.speed_rpm)
    tau_r = rated_torque(spec.power_rated, spec.speed_rpm)

    rho_A = p.fluid.rho * g.A
    a = rho_A * (g.R_t * math.tan(g.alpha_t) - g.R_i * math.tan(g.alpha_i))
    b = rho_A * omega * (g.R_t**2 - g.R_i**2)
    roots = quadratic_roots(a, b, tau_r)
    positive = [r for r in roots if r > 0.0 and math.isfinite(r)]
    if not positive:
        raise InfeasibleSolution("no positive flow velocity at the rated point")
    V = positive[0]

    # Impeller balance τ_i0 = τ_rated is linear in tan(α_s).
    rho_Q = p.fluid.rho * V * g.A
    tan_as = (omega * g.R_i**2 + V * g.R_i * math.tan(g.alpha_i)
              - tau_r / rho_Q) / (g.R_s * V)
    if not math.isfinite(tan_as):
        raise InfeasibleSolution("stator angle undefined at the rated point")
    alpha_s = math.atan(tan_as)
    state = TcState(omega_i=omega, omega_t=omega, V=V)
    return abs(phi(p, state, alpha_s))


@dataclass(frozen=True)
class GreedyResult:
    """Outcome of the coordinate-descent search.

    ``audit`` records one row per accepted coordinate update:
    (cycle, component name, accepted value, objective after the update).
    """

    adjustment: ScalingAdjustment
    objective: float
    cycles: int
    evaluations: int
    audit: tuple[tuple[int, str, float, float], ...]


def _closest_index(grid: np.ndarray, value: float) -> int:
    return int(np.argmin(np.abs(grid - value)))


def greedy_search(
    base: TcParameters,
    spec: RatedSpec,
    space: SearchSpace | None = None,
    start: ScalingAdjustment | None = None,
    objective: Callable[[TcParameters], float] | None = None,
    order: Sequence[str] = FIELD_ORDER,
    max_cycles: int = 50,
) -> GreedyResult:
    """Cyclic coordinate descent for the scaling adjustment.

    One cycle visits the components in ``order``; for each, every grid value
    is tried with the others held fixed and the best (ties toward the
    smaller value) is kept.  The search starts from the grid point closest
    to ``start`` (identity adjustment by default) and stops when a full
    cycle yields no improvement.  Deterministic given its inputs.

    Objective evaluations that raise :class:`InfeasibleSolution`,
    :class:`NoPhysicalRoot`, or :class:`ValidationError` (adjusted angles
    leaving their domain) score ``INFEASIBLE_PENALTY``.
    """
    sp = space or SearchSpace()
    obj = objective or (lambda q: unity_point_objective(q, spec))
    grids = {name: sp.grid(name) for name in order}
    sv0 = start or ScalingAdjustment.identity()
    idx = {name: _closest_index(grids[name], getattr(sv0, name)) for name in order}

    evals = 0

    def score(values: dict[str, float]) -> float:
        nonlocal evals
        evals += 1
        try:
            return_value = obj(apply_scaling(base, ScalingAdjustment(**values)))
        except (InfeasibleSolution, NoPhysicalRoot, ValidationError):
            return INFEASIBLE_PENALTY
        if not math.isfinite(return_value):
            return INFEASIBLE_PENALTY
        return return_value

    current = {name: float(grids[name][idx[name]]) for name in order}
    best_val = score(current)
    audit: list[tuple[int, str, float, float]] = []

    cycles = 0
    for _ in range(max_cycles):
        cycles += 1
        improved = False
        for name in order:
            grid = grids[name]
            best_k = idx[name]
            local_best = best_val
            trial = dict(current)
            for k in range(len(grid)):
                trial[name] = float(grid[k])
                v = score(trial)
                better = v < local_best
                # Ties resolve toward the smaller component value.
                tie_smaller = v == local_best and grid[k] < grid[best_k]
                if better or tie_smaller:
                    local_best = v
                    best_k = k
                    improved = improved or better
            if best_k != idx[name]:
                audit.append((cycles, name, float(grid[best_k]), local_best))
            idx[name] = best_k
            current[name] = float(grid[best_k])
            best_val = local_best
        if not improved:
            break

    return GreedyResult(
        adjustment=ScalingAdjustment(**current),
        objective=best_val,
        cycles=cycles,
        evaluations=evals,
        audit=tuple(audit),
    )
