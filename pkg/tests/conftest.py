"""Shared fixtures: reference parameter sets and a session-scoped sweep."""

import numpy as np
import pytest

from tcdrive import (
    RatedSpec,
    TcFluidLoss,
    TcGeometry,
    TcInertias,
    TcParameters,
)

import oracles


def build_tc(d: dict) -> TcParameters:
    """Package parameter object from an oracle-side plain dict."""
    return TcParameters(
        geometry=TcGeometry(
            R_i=d["R_i"], R_t=d["R_t"], R_s=d["R_s"], A=d["A"], L_f=d["L_f"],
            alpha_i=d["a_i"], alpha_t=d["a_t"], alpha_i_in=d["a_i_in"],
            alpha_t_in=d["a_t_in"], alpha_s_in=d["a_s_in"],
            S_i=d["S_i"], S_t=d["S_t"], S_s=d["S_s"],
        ),
        fluid=TcFluidLoss(
            rho=d["rho"], f=d["f"],
            C_sh_i=d["C_sh_i"], C_sh_t=d["C_sh_t"], C_sh_s=d["C_sh_s"],
        ),
        inertias=TcInertias(I_i=d["I_i"], I_t=d["I_t"], I_s=d["I_s"]),
    )


@pytest.fixture(scope="session")
def honda() -> TcParameters:
    return build_tc(oracles.HONDA)


@pytest.fixture(scope="session")
def type5() -> TcParameters:
    return build_tc(oracles.TYPE5)


@pytest.fixture(scope="session")
def rated() -> RatedSpec:
    return RatedSpec(power_rated=2.0e6, speed_rpm=1800.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)


@pytest.fixture(scope="session")
def type5_options():
    """Sweep options shipped with the scaled-machine config.

    The vane actuation limits in the packaged config bound the feasible
    band; tests that pin band endpoints must use these, not the defaults.
    """
    from tcdrive.config import load_builtin

    return load_builtin("type5").sweep


@pytest.fixture(scope="session")
def type5_sweep(type5, rated, type5_options):
    """Full operating-point sweep of the scaled machine, shared read-only."""
    from tcdrive import sweep

    return sweep(type5, rated, type5_options)
