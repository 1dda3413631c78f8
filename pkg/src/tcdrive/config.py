"""YAML configuration: schema, strict parsing, and parameter-file emission.

A config file is a mapping of optional sections; only ``tc`` is always
required.  Angles appear in degree-valued keys with a ``_deg`` suffix for
readability; every angle also accepts an exact ``_rad`` twin which, when
present, wins.  Emitted parameter files carry both so a written file parses
back to bitwise-identical parameters.

Unknown keys anywhere are rejected (:class:`~tcdrive.errors.ParseError`)
rather than silently ignored — a typo in a study configuration should fail
loudly, not run the wrong study.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import yaml

from .drivetrain import (
    DEFAULT_COUPLER_GEN,
    DEFAULT_COUPLER_ROTOR,
    DEFAULT_GEARBOX,
    DEFAULT_GENERATOR,
    IDEAL_BUS,
    SWING,
    CouplerParams,
    DrivetrainConfig,
    GearboxConfig,
    GearStage,
    GeneratorBoundary,
    TranslationalDof,
)
from .errors import ParseError, ValidationError
from .governor import DEFAULT_GAINS_TUPLE
from .params import TcFluidLoss, TcGeometry, TcInertias, TcParameters
from .scaling import FIELD_ORDER, ScalingAdjustment, SearchSpace
from .sim_engine import FrequencySweepSpec, SimConfig
from .steady_state import RatedSpec, SweepOptions

__all__ = [
    "GovernorSettings",
    "ProfileSettings",
    "TorqueCurveSettings",
    "FullConfig",
    "load_config",
    "parse_config",
    "builtin_config_path",
    "load_builtin",
    "tc_to_mapping",
    "scaling_to_mapping",
    "emit_yaml",
    "config_digest_payload",
]

_ANGLE_FIELDS = ("alpha_i", "alpha_t", "alpha_i_in", "alpha_t_in", "alpha_s_in")


# ---------------------------------------------------------------------------
# Section settings that have no home in the domain modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GovernorSettings:
    """Governor section: gains plus how to derive the vane bounds."""

    enabled: bool = True
    Kp: float = DEFAULT_GAINS_TUPLE[0]
    Ki: float = DEFAULT_GAINS_TUPLE[1]
    Kd: float = DEFAULT_GAINS_TUPLE[2]
    rate_limit_deg_s: float = 30.0
    margin_deg: float = 1.0

    def __post_init__(self):
        for name in ("Kp", "Ki", "Kd", "rate_limit_deg_s", "margin_deg"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"governor.{name}", "must be finite")
        if self.rate_limit_deg_s <= 0.0:
            raise ValidationError("governor.rate_limit_deg_s", "must be positive")
        if self.margin_deg < 0.0:
            raise ValidationError("governor.margin_deg", "must be >= 0")


@dataclass(frozen=True)
class ProfileSettings:
    """Rotor-torque scenario for the integrated run.

    ``base=None`` means "auto": use the exact equilibrium rotor torque of
    the operating point ``nu``.  A step is given either absolutely
    (``step_delta``, N·m) or as a fraction of the resolved base
    (``step_delta_pct``), not both.
    """

    nu: float = 1.0
    base: float | None = None
    step_time: float = math.inf
    step_delta: float = 0.0
    step_delta_pct: float = 0.0
    sin_amp: float = 0.0
    sin_freq_hz: float = 0.0

    def __post_init__(self):
        if not self.nu > 0.0:
            raise ValidationError("profile.nu", "must be positive")
        if self.step_delta != 0.0 and self.step_delta_pct != 0.0:
            raise ValidationError(
                "profile.step_delta",
                "give step_delta or step_delta_pct, not both",
            )
        for name in ("step_delta", "step_delta_pct", "sin_amp", "sin_freq_hz"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"profile.{name}", "must be finite")


@dataclass(frozen=True)
class TorqueCurveSettings:
    """Grid for the torque-ratio characteristic."""

    omega_i: float = 200.0
    nu_lo: float = 0.02
    nu_hi: float = 1.0
    nu_step: float = 0.02

    def __post_init__(self):
        if not self.omega_i > 0.0:
            raise ValidationError("torque_curve.omega_i", "must be positive")
        if not (0.0 < self.nu_lo < self.nu_hi <= 1.0):
            raise ValidationError("torque_curve.nu_lo", "need 0 < nu_lo < nu_hi <= 1")
        if not self.nu_step > 0.0:
            raise ValidationError("torque_curve.nu_step", "must be positive")

    def grid(self) -> list[float]:
        n = int(round((self.nu_hi - self.nu_lo) / self.nu_step))
        out = [self.nu_lo + k * self.nu_step for k in range(n + 1)]
        if out[-1] > self.nu_hi:
            out[-1] = self.nu_hi
        return out


@dataclass(frozen=True)
class FullConfig:
    """Everything a command may need, with absent sections at defaults."""

    tc: TcParameters
    rated: RatedSpec | None = None
    sweep: SweepOptions = field(default_factory=SweepOptions)
    alpha_s: float | None = None
    search: SearchSpace | None = None
    drivetrain: DrivetrainConfig | None = None
    governor: GovernorSettings = field(default_factory=GovernorSettings)
    sim: SimConfig = field(default_factory=SimConfig)
    profile: ProfileSettings = field(default_factory=ProfileSettings)
    freq_sweep: FrequencySweepSpec = field(default_factory=FrequencySweepSpec)
    torque_curve: TorqueCurveSettings = field(default_factory=TorqueCurveSettings)
    source: str = "<memory>"

    def require_rated(self) -> RatedSpec:
        if self.rated is None:
            raise ParseError(f"{self.source}: this command needs a 'rated' section")
        return self.rated

    def require_alpha_s(self) -> float:
        if self.alpha_s is None:
            raise ParseError(f"{self.source}: this command needs a 'stator' section")
        return self.alpha_s

    def require_drivetrain(self) -> DrivetrainConfig:
        if self.drivetrain is not None:
            return self.drivetrain
        generator = DEFAULT_GENERATOR
        if self.rated is not None and self.rated.speed_rpm != generator.speed_rpm:
            generator = dataclasses.replace(generator, speed_rpm=self.rated.speed_rpm)
        return DrivetrainConfig(
            gearbox=DEFAULT_GEARBOX,
            coupler_rotor=DEFAULT_COUPLER_ROTOR,
            coupler_gen=DEFAULT_COUPLER_GEN,
            generator=generator,
        )


# ---------------------------------------------------------------------------
# Strict-mapping helpers
# ---------------------------------------------------------------------------


def _mapping(node: Any, where: str) -> dict:
    if node is None:
        return {}
    if not isinstance(node, dict):
        raise ParseError(f"{where}: expected a mapping, got {type(node).__name__}")
    return dict(node)


def _finish(node: dict, where: str) -> None:
    if node:
        keys = ", ".join(sorted(map(str, node)))
        raise ParseError(f"{where}: unknown key(s): {keys}")


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def _bool(value: Any, where: str) -> bool:
    if not isinstance(value, bool):
        raise ParseError(f"{where}: expected true/false, got {value!r}")
    return value


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise ParseError(f"{where}: expected a string, got {value!r}")
    return value


def _take_num(node: dict, key: str, where: str, default: float) -> float:
    return _num(node.pop(key), f"{where}.{key}") if key in node else default


def _req_num(node: dict, key: str, where: str) -> float:
    if key not in node:
        raise ParseError(f"{where}: missing required key {key!r}")
    return _num(node.pop(key), f"{where}.{key}")


def _angle(node: dict, base: str, where: str, default: float | None = None) -> float:
    """Angle in radians from ``<base>_rad`` (preferred) or ``<base>_deg``."""
    rad_key, deg_key = f"{base}_rad", f"{base}_deg"
    has_rad, has_deg = rad_key in node, deg_key in node
    if has_rad:
        value = _num(node.pop(rad_key), f"{where}.{rad_key}")
        node.pop(deg_key, None)
        return value
    if has_deg:
        return math.radians(_num(node.pop(deg_key), f"{where}.{deg_key}"))
    if default is not None:
        return default
    raise ParseError(f"{where}: missing angle {deg_key!r} (or {rad_key!r})")


# ---------------------------------------------------------------------------
# Section parsers
# ---------------------------------------------------------------------------


def _parse_tc(node: Any, where: str) -> TcParameters:
    tc = _mapping(node, where)
    geo = _mapping(tc.pop("geometry", None), f"{where}.geometry")
    flu = _mapping(tc.pop("fluid", None), f"{where}.fluid")
    ine = _mapping(tc.pop("inertias", None), f"{where}.inertias")
    _finish(tc, where)

    gw = f"{where}.geometry"
    geometry = TcGeometry(
        R_i=_req_num(geo, "R_i", gw),
        R_t=_req_num(geo, "R_t", gw),
        R_s=_req_num(geo, "R_s", gw),
        A=_req_num(geo, "A", gw),
        L_f=_req_num(geo, "L_f", gw),
        alpha_i=_angle(geo, "alpha_i", gw),
        alpha_t=_angle(geo, "alpha_t", gw),
        alpha_i_in=_angle(geo, "alpha_i_in", gw),
        alpha_t_in=_angle(geo, "alpha_t_in", gw),
        alpha_s_in=_angle(geo, "alpha_s_in", gw),
        S_i=_req_num(geo, "S_i", gw),
        S_t=_req_num(geo, "S_t", gw),
        S_s=_req_num(geo, "S_s", gw),
    )
    _finish(geo, gw)

    fw = f"{where}.fluid"
    fluid = TcFluidLoss(
        rho=_req_num(flu, "rho", fw),
        f=_req_num(flu, "f", fw),
        C_sh_i=_req_num(flu, "C_sh_i", fw),
        C_sh_t=_req_num(flu, "C_sh_t", fw),
        C_sh_s=_req_num(flu, "C_sh_s", fw),
    )
    _finish(flu, fw)

    iw = f"{where}.inertias"
    inertias = TcInertias(
        I_i=_req_num(ine, "I_i", iw),
        I_t=_req_num(ine, "I_t", iw),
        I_s=_req_num(ine, "I_s", iw),
    )
    _finish(ine, iw)
    return TcParameters(geometry=geometry, fluid=fluid, inertias=inertias)


def _parse_rated(node: Any, where: str) -> RatedSpec:
    m = _mapping(node, where)
    spec = RatedSpec(
        power_rated=_req_num(m, "power_rated", where),
        speed_rpm=_req_num(m, "speed_rpm", where),
    )
    _finish(m, where)
    return spec


def _parse_sweep(node: Any, where: str) -> SweepOptions:
    m = _mapping(node, where)
    d = SweepOptions()
    opts = SweepOptions(
        nu_lo=_take_num(m, "nu_lo", where, d.nu_lo),
        nu_hi=_take_num(m, "nu_hi", where, d.nu_hi),
        nu_step=_take_num(m, "nu_step", where, d.nu_step),
        solver_lo_deg=_take_num(m, "solver_lo_deg", where, d.solver_lo_deg),
        solver_hi_deg=_take_num(m, "solver_hi_deg", where, d.solver_hi_deg),
        vane_lo_deg=_take_num(m, "vane_lo_deg", where, d.vane_lo_deg),
        vane_hi_deg=_take_num(m, "vane_hi_deg", where, d.vane_hi_deg),
    )
    _finish(m, where)
    return opts


def _parse_stator(node: Any, where: str) -> float:
    m = _mapping(node, where)
    value = _angle(m, "alpha_s", where)
    _finish(m, where)
    return value


def _parse_search(node: Any, where: str) -> SearchSpace:
    m = _mapping(node, where)
    kwargs = {}
    for name in FIELD_ORDER:
        if name not in m:
            continue
        sub = _mapping(m.pop(name), f"{where}.{name}")
        sw = f"{where}.{name}"
        n = _int(sub.pop("n"), f"{sw}.n") if "n" in sub else None
        if name == "K":
            lo = _req_num(sub, "lo", sw)
            hi = _req_num(sub, "hi", sw)
        else:
            lo = math.radians(_req_num(sub, "lo_deg", sw))
            hi = math.radians(_req_num(sub, "hi_deg", sw))
        _finish(sub, sw)
        if n is None:
            raise ParseError(f"{sw}: missing required key 'n'")
        kwargs[name] = (lo, hi, n)
    _finish(m, where)
    return SearchSpace(**kwargs)


def _parse_stage(node: Any, where: str) -> GearStage:
    m = _mapping(node, where)
    stage = GearStage(
        inertia=_req_num(m, "inertia", where),
        ratio=_req_num(m, "ratio", where),
        mesh_k=_req_num(m, "mesh_k", where),
        mesh_c=_req_num(m, "mesh_c", where),
    )
    _finish(m, where)
    return stage


def _parse_translational(node: Any, where: str) -> TranslationalDof:
    m = _mapping(node, where)
    dof = TranslationalDof(
        mass=_req_num(m, "mass", where),
        bearing_k=_req_num(m, "bearing_k", where),
        bearing_c=_req_num(m, "bearing_c", where),
    )
    _finish(m, where)
    return dof


def _parse_coupler(node: Any, where: str, default: CouplerParams) -> CouplerParams:
    m = _mapping(node, where)
    coupler = CouplerParams(
        K_s=_take_num(m, "K_s", where, default.K_s),
        C_s=_take_num(m, "C_s", where, default.C_s),
    )
    _finish(m, where)
    return coupler


def _parse_generator(node: Any, where: str, rated: RatedSpec | None) -> GeneratorBoundary:
    m = _mapping(node, where)
    d = DEFAULT_GENERATOR
    mode = _str(m.pop("mode"), f"{where}.mode") if "mode" in m else d.mode
    if mode not in (IDEAL_BUS, SWING):
        raise ParseError(f"{where}.mode: expected {IDEAL_BUS!r} or {SWING!r}, got {mode!r}")
    default_rpm = rated.speed_rpm if rated is not None else d.speed_rpm
    gen = GeneratorBoundary(
        mode=mode,
        speed_rpm=_take_num(m, "speed_rpm", where, default_rpm),
        J=_take_num(m, "J", where, d.J),
        D=_take_num(m, "D", where, d.D),
        K_sync=_take_num(m, "K_sync", where, d.K_sync),
    )
    _finish(m, where)
    return gen


def _parse_drivetrain(node: Any, where: str, rated: RatedSpec | None) -> DrivetrainConfig:
    m = _mapping(node, where)
    gb_node = _mapping(m.pop("gearbox", None), f"{where}.gearbox")
    if "stages" in gb_node:
        raw_stages = gb_node.pop("stages")
        if not isinstance(raw_stages, list) or not raw_stages:
            raise ParseError(f"{where}.gearbox.stages: expected a non-empty list")
        stages = tuple(
            _parse_stage(s, f"{where}.gearbox.stages[{k}]")
            for k, s in enumerate(raw_stages)
        )
    else:
        stages = DEFAULT_GEARBOX.stages
    translational = None
    if "translational" in gb_node:
        raw_tr = gb_node.pop("translational")
        if raw_tr is not None:
            if not isinstance(raw_tr, list):
                raise ParseError(f"{where}.gearbox.translational: expected a list")
            translational = tuple(
                _parse_translational(s, f"{where}.gearbox.translational[{k}]")
                for k, s in enumerate(raw_tr)
            )
    _finish(gb_node, f"{where}.gearbox")
    gearbox = GearboxConfig(stages=stages, translational=translational)

    dt_cfg = DrivetrainConfig(
        gearbox=gearbox,
        coupler_rotor=_parse_coupler(
            m.pop("coupler_rotor", None), f"{where}.coupler_rotor", DEFAULT_COUPLER_ROTOR
        ),
        coupler_gen=_parse_coupler(
            m.pop("coupler_gen", None), f"{where}.coupler_gen", DEFAULT_COUPLER_GEN
        ),
        generator=_parse_generator(m.pop("generator", None), f"{where}.generator", rated),
    )
    _finish(m, where)
    return dt_cfg


def _parse_governor(node: Any, where: str) -> GovernorSettings:
    m = _mapping(node, where)
    d = GovernorSettings()
    settings = GovernorSettings(
        enabled=_bool(m.pop("enabled"), f"{where}.enabled") if "enabled" in m else d.enabled,
        Kp=_take_num(m, "Kp", where, d.Kp),
        Ki=_take_num(m, "Ki", where, d.Ki),
        Kd=_take_num(m, "Kd", where, d.Kd),
        rate_limit_deg_s=_take_num(m, "rate_limit_deg_s", where, d.rate_limit_deg_s),
        margin_deg=_take_num(m, "margin_deg", where, d.margin_deg),
    )
    _finish(m, where)
    return settings


def _parse_sim(node: Any, where: str) -> SimConfig:
    m = _mapping(node, where)
    d = SimConfig()
    integrator = (
        _str(m.pop("integrator"), f"{where}.integrator")
        if "integrator" in m
        else d.integrator
    )
    sim = SimConfig(
        dt=_take_num(m, "dt", where, d.dt),
        duration=_take_num(m, "duration", where, d.duration),
        integrator=integrator,
        record_decimation=(
            _int(m.pop("record_decimation"), f"{where}.record_decimation")
            if "record_decimation" in m
            else d.record_decimation
        ),
    )
    _finish(m, where)
    return sim


def _parse_profile(node: Any, where: str) -> ProfileSettings:
    m = _mapping(node, where)
    d = ProfileSettings()
    base: float | None
    if "base" in m:
        raw = m.pop("base")
        if raw is None or (isinstance(raw, str) and raw == "auto"):
            base = None
        else:
            base = _num(raw, f"{where}.base")
    else:
        base = d.base
    step_time = (
        _num(m.pop("step_time"), f"{where}.step_time") if "step_time" in m else d.step_time
    )
    settings = ProfileSettings(
        nu=_take_num(m, "nu", where, d.nu),
        base=base,
        step_time=step_time,
        step_delta=_take_num(m, "step_delta", where, d.step_delta),
        step_delta_pct=_take_num(m, "step_delta_pct", where, d.step_delta_pct),
        sin_amp=_take_num(m, "sin_amp", where, d.sin_amp),
        sin_freq_hz=_take_num(m, "sin_freq_hz", where, d.sin_freq_hz),
    )
    _finish(m, where)
    return settings


def _parse_freq_sweep(node: Any, where: str) -> FrequencySweepSpec:
    m = _mapping(node, where)
    d = FrequencySweepSpec()
    spec = FrequencySweepSpec(
        tau_ie=_take_num(m, "tau_ie", where, d.tau_ie),
        tau_te=_take_num(m, "tau_te", where, d.tau_te),
        amplitude=_take_num(m, "amplitude", where, d.amplitude),
        f_lo=_take_num(m, "f_lo", where, d.f_lo),
        f_hi=_take_num(m, "f_hi", where, d.f_hi),
        points_per_decade=(
            _int(m.pop("points_per_decade"), f"{where}.points_per_decade")
            if "points_per_decade" in m
            else d.points_per_decade
        ),
        settle_time=_take_num(m, "settle_time", where, d.settle_time),
        measure_time=_take_num(m, "measure_time", where, d.measure_time),
    )
    _finish(m, where)
    return spec


def _parse_torque_curve(node: Any, where: str) -> TorqueCurveSettings:
    m = _mapping(node, where)
    d = TorqueCurveSettings()
    settings = TorqueCurveSettings(
        omega_i=_take_num(m, "omega_i", where, d.omega_i),
        nu_lo=_take_num(m, "nu_lo", where, d.nu_lo),
        nu_hi=_take_num(m, "nu_hi", where, d.nu_hi),
        nu_step=_take_num(m, "nu_step", where, d.nu_step),
    )
    _finish(m, where)
    return settings


# ---------------------------------------------------------------------------
# Top-level parse / load
# ---------------------------------------------------------------------------


def parse_config(text: str, source: str = "<string>") -> FullConfig:
    """Parse and validate a YAML config document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"{source}: invalid YAML: {exc}") from exc
    root = _mapping(doc, source)
    if "tc" not in root:
        raise ParseError(f"{source}: missing required section 'tc'")

    tc = _parse_tc(root.pop("tc"), f"{source}:tc")
    rated = (
        _parse_rated(root.pop("rated"), f"{source}:rated") if "rated" in root else None
    )
    sweep = (
        _parse_sweep(root.pop("sweep"), f"{source}:sweep")
        if "sweep" in root
        else SweepOptions()
    )
    alpha_s = (
        _parse_stator(root.pop("stator"), f"{source}:stator")
        if "stator" in root
        else None
    )
    search = (
        _parse_search(root.pop("search"), f"{source}:search")
        if "search" in root
        else None
    )
    drivetrain = (
        _parse_drivetrain(root.pop("drivetrain"), f"{source}:drivetrain", rated)
        if "drivetrain" in root
        else None
    )
    governor = (
        _parse_governor(root.pop("governor"), f"{source}:governor")
        if "governor" in root
        else GovernorSettings()
    )
    sim = _parse_sim(root.pop("sim"), f"{source}:sim") if "sim" in root else SimConfig()
    profile = (
        _parse_profile(root.pop("profile"), f"{source}:profile")
        if "profile" in root
        else ProfileSettings()
    )
    freq_sweep = (
        _parse_freq_sweep(root.pop("freq_sweep"), f"{source}:freq_sweep")
        if "freq_sweep" in root
        else FrequencySweepSpec()
    )
    torque_curve = (
        _parse_torque_curve(root.pop("torque_curve"), f"{source}:torque_curve")
        if "torque_curve" in root
        else TorqueCurveSettings()
    )
    _finish(root, source)

    return FullConfig(
        tc=tc,
        rated=rated,
        sweep=sweep,
        alpha_s=alpha_s,
        search=search,
        drivetrain=drivetrain,
        governor=governor,
        sim=sim,
        profile=profile,
        freq_sweep=freq_sweep,
        torque_curve=torque_curve,
        source=source,
    )


def load_config(path) -> FullConfig:
    """Load a config file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def builtin_config_path(name: str):
    """Filesystem path of a packaged config (``honda_crv`` or ``type5``)."""
    return resources.files("tcdrive") / "configs" / f"{name}.yaml"


def load_builtin(name: str) -> FullConfig:
    ref = builtin_config_path(name)
    return parse_config(ref.read_text(encoding="utf-8"), source=f"builtin:{name}")


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------


def tc_to_mapping(p: TcParameters) -> dict:
    """``tc`` section mapping with both ``_deg`` and exact ``_rad`` angles."""
    g, fl, ine = p.geometry, p.fluid, p.inertias
    geo: dict[str, float] = {
        "R_i": g.R_i, "R_t": g.R_t, "R_s": g.R_s, "A": g.A, "L_f": g.L_f,
        "S_i": g.S_i, "S_t": g.S_t, "S_s": g.S_s,
    }
    for name in _ANGLE_FIELDS:
        value = getattr(g, name)
        geo[f"{name}_deg"] = math.degrees(value)
        geo[f"{name}_rad"] = value
    return {
        "tc": {
            "geometry": geo,
            "fluid": {
                "rho": fl.rho, "f": fl.f,
                "C_sh_i": fl.C_sh_i, "C_sh_t": fl.C_sh_t, "C_sh_s": fl.C_sh_s,
            },
            "inertias": {"I_i": ine.I_i, "I_t": ine.I_t, "I_s": ine.I_s},
        }
    }


def scaling_to_mapping(adj: ScalingAdjustment, objective: float | None = None) -> dict:
    """Adjustment mapping with degree twins for the angle offsets."""
    body: dict[str, float] = {"K": adj.K}
    for name in FIELD_ORDER[1:]:
        value = getattr(adj, name)
        body[f"{name}_deg"] = math.degrees(value)
        body[f"{name}_rad"] = value
    out: dict[str, Any] = {"scaling": body}
    if objective is not None:
        out["objective"] = objective
    return out


def emit_yaml(mapping: dict, path) -> None:
    """Write a mapping as YAML preserving key order and float precision."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(mapping, fh, sort_keys=False, default_flow_style=False)


def config_digest_payload(cfg: FullConfig) -> dict:
    """JSON-serializable resolved view of a config, for run manifests."""

    def convert(obj):
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return {
                f.name: convert(getattr(obj, f.name)) for f in dataclasses.fields(obj)
            }
        if isinstance(obj, (list, tuple)):
            return [convert(v) for v in obj]
        if isinstance(obj, float) and math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if obj is None or isinstance(obj, (bool, int, float, str)):
            return obj
        raise TypeError(f"cannot serialize {type(obj).__name__} in manifest payload")

    payload = {
        f.name: convert(getattr(cfg, f.name))
        for f in dataclasses.fields(cfg)
        if f.name != "source"
    }
    payload["drivetrain"] = convert(cfg.require_drivetrain())
    return payload
