"""Kernel benchmark: compiled hot loops vs the pure-NumPy fallback.

Run as ``python3 -m tcdrive.benchmark``.  With ``--both`` the benchmark
re-launches itself in a subprocess with ``TCDRIVE_NO_NUMBA=1`` and prints a
side-by-side comparison; results are bitwise-identical between the two
modes, only the wall time differs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import time

import numpy as np

from . import kernels
from .config import load_builtin
from .drivetrain import equilibrium_init, kernel_args
from .params import pack_parameters
from .sim_engine import RotorProfile, SimConfig, run_integrated, run_tc_transient
from .steady_state import sweep
from .tc_core import mass_matrix


def _bench_tc(cfg, n_steps: int) -> tuple[float, float]:
    """(wall seconds, checksum) for the bare-converter transient."""
    from .sim_engine import solve_torque_equilibrium

    p = cfg.tc
    alpha = cfg.alpha_s if cfg.alpha_s is not None else math.radians(55.62)
    eq = solve_torque_equilibrium(p, 100.0, -150.0, alpha)
    sim = SimConfig(dt=1e-4, duration=n_steps * 1e-4, record_decimation=n_steps)
    run_tc_transient(p, eq, 110.0, -150.0, alpha, sim)  # warm-up / JIT
    t0 = time.perf_counter()
    trace = run_tc_transient(p, eq, 110.0, -150.0, alpha, sim)
    wall = time.perf_counter() - t0
    return wall, float(trace.data[-1].sum())


def _bench_integrated(n_steps: int) -> tuple[float, float]:
    """(wall seconds, checksum) for the full drivetrain chain."""
    cfg = load_builtin("type5")
    dt_cfg = cfg.require_drivetrain()
    result = sweep(cfg.tc, cfg.require_rated(), cfg.sweep)
    pt = result.point_at(1.0)
    init = equilibrium_init(dt_cfg, cfg.tc, pt)
    prof = RotorProfile(base=init.tau_rotor, step_time=n_steps * 1e-4 / 2,
                        step_delta=0.05 * init.tau_rotor)
    sim = SimConfig(dt=1e-4, duration=n_steps * 1e-4, record_decimation=n_steps)
    run_integrated(cfg.tc, dt_cfg, pt, prof, sim)  # warm-up / JIT
    t0 = time.perf_counter()
    out = run_integrated(cfg.tc, dt_cfg, pt, prof, sim)
    wall = time.perf_counter() - t0
    return wall, float(out.trace.data[-1, 1:4].sum())


def run_suite(tc_steps: int, chain_steps: int) -> dict:
    cfg = load_builtin("honda_crv")
    tc_wall, tc_sum = _bench_tc(cfg, tc_steps)
    ch_wall, ch_sum = _bench_integrated(chain_steps)
    return {
        "mode": "numpy-fallback" if kernels.NUMBA_DISABLED else "numba",
        "tc_steps": tc_steps,
        "tc_wall_s": tc_wall,
        "tc_steps_per_s": tc_steps / tc_wall,
        "tc_checksum": tc_sum,
        "chain_steps": chain_steps,
        "chain_wall_s": ch_wall,
        "chain_steps_per_s": chain_steps / ch_wall,
        "chain_checksum": ch_sum,
    }


def _print_report(rep: dict) -> None:
    print(f"kernel mode: {rep['mode']}")
    print(f"  bare converter : {rep['tc_steps']:>7d} steps in {rep['tc_wall_s']:8.3f} s "
          f"({rep['tc_steps_per_s']:12.0f} steps/s)")
    print(f"  full drivetrain: {rep['chain_steps']:>7d} steps in {rep['chain_wall_s']:8.3f} s "
          f"({rep['chain_steps_per_s']:12.0f} steps/s)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python3 -m tcdrive.benchmark",
        description="Time the compiled kernels against the pure-NumPy fallback.",
    )
    parser.add_argument("--both", action="store_true",
                        help="also run the other kernel mode and compare")
    parser.add_argument("--tc-steps", type=int, default=100_000)
    parser.add_argument("--chain-steps", type=int, default=20_000)
    parser.add_argument("--json", action="store_true", help="print machine-readable result")
    args = parser.parse_args(argv)

    rep = run_suite(args.tc_steps, args.chain_steps)
    if args.json:
        print(json.dumps(rep))
        return 0
    _print_report(rep)

    if args.both:
        env = dict(os.environ)
        if kernels.NUMBA_DISABLED:
            env.pop("TCDRIVE_NO_NUMBA", None)
        else:
            env["TCDRIVE_NO_NUMBA"] = "1"
        proc = subprocess.run(
            [sys.executable, "-m", "tcdrive.benchmark", "--json",
             "--tc-steps", str(args.tc_steps), "--chain-steps", str(args.chain_steps)],
            env=env, capture_output=True, text=True, check=True,
        )
        other = json.loads(proc.stdout.strip().splitlines()[-1])
        _print_report(other)
        if not math.isclose(rep["tc_checksum"], other["tc_checksum"], rel_tol=0.0, abs_tol=0.0):
            print("WARNING: kernel modes disagree on the converter checksum")
            return 1
        if not math.isclose(rep["chain_checksum"], other["chain_checksum"], rel_tol=0.0, abs_tol=0.0):
            print("WARNING: kernel modes disagree on the drivetrain checksum")
            return 1
        fast, slow = (rep, other) if rep["tc_wall_s"] < other["tc_wall_s"] else (other, rep)
        print(f"checksums identical; {fast['mode']} is "
              f"{slow['tc_wall_s'] / fast['tc_wall_s']:.1f}x faster on the converter, "
              f"{slow['chain_wall_s'] / fast['chain_wall_s']:.1f}x on the drivetrain")
    return 0


if __name__ == "__main__":
    sys.exit(main())
