"""Batch command-line interface.

Six subcommands cover the toolkit's studies end-to-end; each writes CSV
outputs plus a ``manifest.json`` reproducibility record into ``--out`` and
prints a short summary.  Exit codes: 0 success, 2 configuration or usage
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

from . import __version__
from .config import (
    FullConfig,
    builtin_config_path,
    config_digest_payload,
    emit_yaml,
    load_config,
    parse_config,
    scaling_to_mapping,
    tc_to_mapping,
)
from .errors import NumericalError, ValidationError
from .governor import bounds_from_sweep, init_from_steady
from .manifest import RunManifest, file_sha256, write_manifest
from .params import TcInput, TcState
from .scaling import apply_scaling, greedy_search
from .sim_engine import (
    RotorProfile,
    run_frequency_sweep,
    run_integrated,
    run_torque_ratio_curve,
    solve_torque_equilibrium,
)
from .steady_state import solve_point, sweep, write_sweep_csv
from .tc_core import (
    derivatives,
    loss_term,
    phi,
    steady_impeller_torque,
    steady_turbine_torque,
)

__all__ = ["main", "build_parser"]

_PROBE_STATE = TcState(omega_i=100.0, omega_t=90.0, V=2.0)
_PROBE_ALPHA_DEG = 55.62


def _load(args, default_builtin: str) -> FullConfig:
    if args.config is not None:
        return load_config(args.config)
    path = builtin_config_path(default_builtin)
    return parse_config(path.read_text(encoding="utf-8"), source=f"builtin:{default_builtin}")


def _out_dir(args, command: str) -> Path:
    out = Path(args.out) if args.out else Path("tcdrive_out") / command
    out.mkdir(parents=True, exist_ok=True)
    return out


def _apply_overrides(cfg: FullConfig, args, grid: str | None = None) -> FullConfig:
    updates = {}
    if grid is not None:
        section = getattr(cfg, grid)
        for name in ("nu_lo", "nu_hi", "nu_step"):
            value = getattr(args, name, None)
            if value is not None:
                section = dataclasses.replace(section, **{name: value})
        updates[grid] = section
    sim = cfg.sim
    if getattr(args, "dt", None) is not None:
        sim = dataclasses.replace(sim, dt=args.dt)
    if getattr(args, "duration", None) is not None:
        sim = dataclasses.replace(sim, duration=args.duration)
    updates["sim"] = sim
    return dataclasses.replace(cfg, **updates)


def _finish_run(command: str, cfg: FullConfig, out: Path, files: list[Path]) -> None:
    manifest = RunManifest(
        command=command,
        config=config_digest_payload(cfg),
        outputs={f.name: file_sha256(f) for f in files},
    )
    write_manifest(manifest, out / "manifest.json")
    print(f"wrote {len(files)} file(s) + manifest.json to {out}")
    print(f"run digest: {manifest.digest}")


def _write_plot(path: Path, csv_name: str, title: str, plots: list[str]) -> Path:
    """Emit a gnuplot script rendering ``csv_name`` to a PNG."""
    stem = path.stem
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set grid",
        f"set title '{title}'",
        "set terminal pngcairo size 1200,800",
        f"set output '{stem}.png'",
        "plot " + ", \\\n     ".join(plots),
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate_honda(args) -> int:
    cfg = _load(args, "honda_crv")
    p = cfg.tc
    alpha = math.radians(_PROBE_ALPHA_DEG)
    s = _PROBE_STATE
    tau_i0 = steady_impeller_torque(p, s, alpha)
    tau_t0 = steady_turbine_torque(p, s)
    psi = loss_term(p, s, alpha)
    balance = phi(p, s, alpha)
    dx = derivatives(p, s, TcInput(tau_i=100.0, tau_t=-150.0, alpha_s=alpha))
    eq = solve_torque_equilibrium(p, 100.0, -150.0, alpha)
    residual = phi(p, eq, alpha)

    print(f"reference converter OK (mass-matrix det {p.mass_matrix_det():.6e})")
    print(f"probe state (omega_i=100, omega_t=90, V=2, alpha_s={_PROBE_ALPHA_DEG} deg):")
    print(f"  tau_i0 = {tau_i0:.6f} N·m")
    print(f"  tau_t0 = {tau_t0:.6f} N·m")
    print(f"  psi    = {psi:.6f}")
    print(f"  Phi    = {balance:.6f}")
    print(f"  d(omega_t, omega_i, V)/dt at (tau_i=100, tau_t=-150) = "
          f"({dx[0]:.4f}, {dx[1]:.4f}, {dx[2]:.4f})")
    print(f"equilibrium at (tau_i=100, tau_t=-150) N·m:")
    print(f"  omega_i = {eq.omega_i:.6f} rad/s, omega_t = {eq.omega_t:.6f} rad/s, "
          f"V = {eq.V:.6f} m/s  (|Phi| = {abs(residual):.3e})")

    if args.out:
        out = _out_dir(args, "validate-honda")
        _finish_run("validate-honda", cfg, out, [])
    return 0


def cmd_scale(args) -> int:
    cfg = _load(args, "scale_type5")
    spec = cfg.require_rated()
    out = _out_dir(args, "scale")

    result = greedy_search(cfg.tc, spec, space=cfg.search)
    scaled = result.adjustment

    scaled_params = apply_scaling(cfg.tc, scaled)
    files = []
    emit_yaml(scaling_to_mapping(scaled, objective=result.objective), out / "scaling.yaml")
    files.append(out / "scaling.yaml")
    emit_yaml(tc_to_mapping(scaled_params), out / "scaled_tc.yaml")
    files.append(out / "scaled_tc.yaml")
    audit_lines = ["cycle,component,value,objective"]
    for cycle, name, value, objective in result.audit:
        audit_lines.append(f"{cycle},{name},{value!r},{objective!r}")
    (out / "audit.csv").write_text("\n".join(audit_lines) + "\n",
                                   encoding="utf-8", newline="\n")
    files.append(out / "audit.csv")

    print(f"greedy search: objective {result.objective:.6f} after {result.cycles} "
          f"cycle(s), {result.evaluations} evaluation(s)")
    print(f"  K = {scaled.K:.6f}")
    for name in ("b_i", "b_t", "b_i_in", "b_t_in", "b_s_in"):
        print(f"  {name} = {math.degrees(getattr(scaled, name)):.6f} deg")
    _finish_run("scale", cfg, out, files)
    return 0


def cmd_init_sweep(args) -> int:
    cfg = _apply_overrides(_load(args, "type5"), args, grid="sweep")
    spec = cfg.require_rated()
    out = _out_dir(args, "init-sweep")

    result = sweep(cfg.tc, spec, cfg.sweep)
    write_sweep_csv(result, out / "sweep.csv")
    files = [out / "sweep.csv"]

    nu_lo, nu_hi = result.feasible_band()
    n_feasible = len(result.feasible_points)
    print(f"sweep: {len(result.points)} points, {n_feasible} feasible")
    print(f"feasible band: nu in [{nu_lo:.4f}, {nu_hi:.4f}]")
    if args.emit_plots:
        files.append(_write_plot(
            out / "sweep.gp", "sweep.csv", "Steady-state initialization sweep",
            ["'sweep.csv' using 1:5 with lines title 'alpha_s0 (deg)'",
             "'sweep.csv' using 1:8 with lines axes x1y2 title 'power loss (%)'"],
        ))
    _finish_run("init-sweep", cfg, out, files)
    return 0


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(_load(args, "type5"), args)
    spec = cfg.require_rated()
    out = _out_dir(args, "simulate")
    dt_cfg = cfg.require_drivetrain()
    prof_cfg = cfg.profile

    point = solve_point(cfg.tc, prof_cfg.nu, spec, cfg.sweep)
    if not point.feasible:
        raise ValidationError(
            "profile.nu", f"operating point nu={prof_cfg.nu} infeasible ({point.reason})"
        )

    governor = None
    if cfg.governor.enabled:
        band = sweep(cfg.tc, spec, cfg.sweep)
        bounds = bounds_from_sweep(band, margin_deg=cfg.governor.margin_deg)
        from .governor import PidGains

        governor, _state = init_from_steady(
            point, bounds,
            gains=PidGains(cfg.governor.Kp, cfg.governor.Ki, cfg.governor.Kd),
            rate_limit=math.radians(cfg.governor.rate_limit_deg_s),
        )

    from .drivetrain import equilibrium_init

    init = equilibrium_init(dt_cfg, cfg.tc, point)
    base = prof_cfg.base if prof_cfg.base is not None else init.tau_rotor
    delta = prof_cfg.step_delta
    if prof_cfg.step_delta_pct != 0.0:
        delta = prof_cfg.step_delta_pct * base
    profile = RotorProfile(
        base=base, step_time=prof_cfg.step_time, step_delta=delta,
        sin_amp=prof_cfg.sin_amp, sin_freq_hz=prof_cfg.sin_freq_hz,
    )

    result = run_integrated(cfg.tc, dt_cfg, point, profile, cfg.sim, governor=governor)
    trace = result.trace
    trace.to_csv(out / "trace.csv")
    files = [out / "trace.csv"]

    wsync = dt_cfg.generator.omega_sync
    end_err = trace.column("omega_t")[-1] - wsync
    print(f"simulated {cfg.sim.duration:g} s at dt={cfg.sim.dt:g} "
          f"({'governor on' if governor else 'governor off'})")
    print(f"rotor torque base {base:.1f} N·m"
          + (f", step {delta:+.1f} N·m at t={prof_cfg.step_time:g} s"
             if math.isfinite(prof_cfg.step_time) else ""))
    print(f"final turbine speed error vs synchronous: {end_err:+.6e} rad/s")
    print(f"final stator angle: {math.degrees(trace.column('alpha_s')[-1]):.4f} deg")
    if args.emit_plots:
        files.append(_write_plot(
            out / "trace.gp", "trace.csv", "Integrated drivetrain transient",
            ["'trace.csv' using 1:3 with lines title 'omega_t (rad/s)'",
             "'trace.csv' using 1:2 with lines title 'omega_i (rad/s)'",
             "'trace.csv' using 1:($5*57.29577951308232) with lines axes x1y2 "
             "title 'alpha_s (deg)'"],
        ))
    _finish_run("simulate", cfg, out, files)
    return 0


def cmd_freq_sweep(args) -> int:
    cfg = _apply_overrides(_load(args, "honda_crv"), args)
    alpha_s = cfg.require_alpha_s()
    out = _out_dir(args, "freq-sweep")

    result = run_frequency_sweep(cfg.tc, cfg.freq_sweep, alpha_s, dt=cfg.sim.dt)
    result.to_csv(out / "freq_sweep.csv")
    files = [out / "freq_sweep.csv"]

    first, last = result.points[0], result.points[-1]
    print(f"frequency sweep: {len(result.points)} points, "
          f"{first.f_hz:g}–{last.f_hz:g} Hz")
    print(f"turbine-side amplitude: {first.amp_omega_t:.6e} rad/s at {first.f_hz:g} Hz, "
          f"{last.amp_omega_t:.6e} rad/s at {last.f_hz:g} Hz")
    if first.amp_omega_t > 0 and last.amp_omega_t > 0:
        atten = first.amp_omega_t / last.amp_omega_t
        print(f"low-pass attenuation across band: {atten:.1f}x")
    if args.emit_plots:
        files.append(_write_plot(
            out / "freq_sweep.gp", "freq_sweep.csv", "Turbine-speed disturbance response",
            ["'freq_sweep.csv' using 1:3 with linespoints title 'amp omega_t (rad/s)'",
             "'freq_sweep.csv' using 1:2 with linespoints title 'amp omega_i (rad/s)'"],
        ))
        plot = (out / "freq_sweep.gp").read_text(encoding="utf-8")
        (out / "freq_sweep.gp").write_text(
            plot.replace("set grid", "set grid\nset logscale xy"),
            encoding="utf-8", newline="\n",
        )
    _finish_run("freq-sweep", cfg, out, files)
    return 0


def cmd_torque_curve(args) -> int:
    cfg = _apply_overrides(_load(args, "honda_crv"), args, grid="torque_curve")
    alpha_s = cfg.require_alpha_s()
    out = _out_dir(args, "torque-curve")
    tcs = cfg.torque_curve

    result = run_torque_ratio_curve(cfg.tc, tcs.omega_i, alpha_s, tcs.grid())
    result.to_csv(out / "torque_curve.csv")
    files = [out / "torque_curve.csv"]

    feasible = [q for q in result.points if q.feasible]
    print(f"torque-ratio curve: {len(result.points)} points "
          f"({len(feasible)} feasible), omega_i = {tcs.omega_i:g} rad/s")
    if feasible:
        print(f"ratio at nu={feasible[0].nu:g}: {feasible[0].torque_ratio:.4f}")
        print(f"ratio at nu={feasible[-1].nu:g}: {feasible[-1].torque_ratio:.4f}")
    if args.emit_plots:
        files.append(_write_plot(
            out / "torque_curve.gp", "torque_curve.csv", "Torque ratio vs speed ratio",
            ["'torque_curve.csv' using 1:5 with linespoints title 'torque ratio'"],
        ))
    _finish_run("torque-curve", cfg, out, files)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="YAML config file (default: packaged preset)")
    sub.add_argument("--out", help="output directory (default: tcdrive_out/<command>)")
    sub.add_argument("--emit-plots", action="store_true",
                     help="also write gnuplot scripts for the CSV outputs")


def _add_grid(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--nu-lo", type=float, dest="nu_lo", help="grid lower speed ratio")
    sub.add_argument("--nu-hi", type=float, dest="nu_hi", help="grid upper speed ratio")
    sub.add_argument("--nu-step", type=float, dest="nu_step", help="grid step")


def _add_time(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dt", type=float, help="integration step (s)")
    sub.add_argument("--duration", type=float, help="simulated time (s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcdrive",
        description="Torque-converter wind-turbine drivetrain toolkit",
    )
    parser.add_argument("--version", action="version", version=f"tcdrive {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("validate-honda",
                            help="check the packaged reference converter")
    _add_common(p)
    p.set_defaults(func=cmd_validate_honda)

    p = commands.add_parser("scale",
                            help="greedy-search a geometric scaling to a rating")
    _add_common(p)
    p.set_defaults(func=cmd_scale)

    p = commands.add_parser("init-sweep",
                            help="steady-state initialization sweep over speed ratio")
    _add_common(p)
    _add_grid(p)
    p.set_defaults(func=cmd_init_sweep)

    p = commands.add_parser("simulate",
                            help="integrated drivetrain transient from a steady point")
    _add_common(p)
    _add_time(p)
    p.set_defaults(func=cmd_simulate)

    p = commands.add_parser("freq-sweep",
                            help="turbine-speed response to impeller-torque sinusoids")
    _add_common(p)
    _add_time(p)
    p.set_defaults(func=cmd_freq_sweep)

    p = commands.add_parser("torque-curve",
                            help="torque ratio vs speed ratio characteristic")
    _add_common(p)
    _add_grid(p)
    p.set_defaults(func=cmd_torque_curve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:  # ParseError included
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
