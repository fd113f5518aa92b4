"""
Fixtures compartilhadas: o experimento de referência (814 kHz, F = 30 000)
e um modo de Q baixo para simulações rápidas.
"""

from pathlib import Path

import pytest

from src.model.types import CavitySetup, MechanicalMode, OperatingPoint
from src.simulation.integrator import SimConfig
from src.sweeps.experiment_config import load_experiment_config

ROOT = Path(__file__).resolve().parent.parent
DEFAULTS = ROOT / "config" / "defaults.toml"


@pytest.fixture
def drum_mode():
    return MechanicalMode.from_frequency_hz(814e3, 190e-9, 1e4, name="drum-814k")


@pytest.fixture
def upper_mode():
    return MechanicalMode.from_frequency_hz(2824e3, 190e-9, 1e4, name="mode-2824k")


@pytest.fixture
def cavity():
    return CavitySetup.from_bandwidth_hz(1.064e-6, 2.4e-3, 30000.0, 1.05e6, 2970.0)


@pytest.fixture
def fast_mode():
    """Q = 100: equilibra em ~1 ms, barato de simular."""
    return MechanicalMode.from_frequency_hz(814e3, 190e-9, 100.0, name="fast")


@pytest.fixture
def bare_point(drum_mode, cavity):
    return OperatingPoint(drum_mode, cavity, 0.0, 0.0, 300.0)


@pytest.fixture
def cooling_point(drum_mode, cavity):
    """φ = -0.45 com 3.2 mW incidentes."""
    return OperatingPoint.from_incident_power(drum_mode, cavity, -0.45, 3.2e-3, 300.0)


@pytest.fixture
def fast_sim():
    return SimConfig(duration=4e-3, seed=7, burn_in=5e-4, n_trajectories=4)


@pytest.fixture
def defaults_config():
    return load_experiment_config(DEFAULTS)


@pytest.fixture
def small_config(defaults_config, tmp_path):
    """Configuração de referência com grades reduzidas e saída em tmp_path."""
    from dataclasses import replace

    return defaults_config.with_overrides(
        detunings=(-0.45, -0.2, 0.0, 0.05, 0.11),
        stability_map=replace(defaults_config.stability_map, phi_count=21, power_count=21),
        sim=SimConfig(duration=4e-3, seed=3, burn_in=5e-4, n_trajectories=2),
        welch_segment=None,
        output_dir=str(tmp_path / "out"),
    )
