from dataclasses import replace

import numpy as np
import pytest

from src.exceptions import FitError, SimulationConfigError, SpectrumFileError
from src.model.constants import BOLTZMANN
from src.model.optomechanics import area_temperature, effective_dynamics, instability_threshold, radiation_force_transfer
from src.model.types import OperatingPoint
from src.simulation.force_filter import check_time_step, realize_force_filter
from src.simulation.integrator import (
    STATUS_OK,
    STATUS_UNSTABLE_GROWTH,
    SimConfig,
    build_step_map,
    ensemble_temperature,
    ensemble_variance,
    integrate,
    run_ensemble,
    thermal_force_samples,
)
from src.simulation.ringdown import ringdown_rate
from src.simulation.trajectory_io import (
    read_trajectory_raw,
    read_trajectory_text,
    write_trajectory_raw,
    write_trajectory_text,
)

DT = 1.0 / (40 * 1.05e6)
# |φφ_NL| ≈ 0.015 em φ = ±0.45 com Q = 100: Γ_eff/Γ_m ≈ 2.7 ou -0.7
STRONG_P_RES = 262.0


@pytest.fixture
def coupled_point(drum_mode, cavity):
    return OperatingPoint.from_incident_power(drum_mode, cavity, -0.3, 3.2e-3)


class TestForceFilter:
    @staticmethod
    def _zoh_transfer(op, omega, dt):
        """H(s) = K/((s+Ω_c)² + φ²Ω_c²) amostrado com retentor de ordem zero, por frações parciais."""
        omega_c = op.cavity.omega_c
        gain = radiation_force_transfer(op, 0.0).real * (1 + op.phi ** 2) * omega_c ** 2
        poles = omega_c * np.array([-1 + 1j * op.phi, -1 - 1j * op.phi])
        residue = gain / (2j * op.phi * omega_c)
        z = np.exp(-1j * np.asarray(omega) * dt)
        total = np.zeros_like(z)
        for pole, r in zip(poles, (residue, -residue)):
            total = total + r * np.expm1(pole * dt) / (pole * (z - np.exp(pole * dt)))
        return total

    def test_matches_closed_form_transfer(self, coupled_point):
        realization = realize_force_filter(coupled_point, DT)
        top = 5.0 * max(coupled_point.mode.omega_m, coupled_point.cavity.omega_c)
        low = 1e-3 * coupled_point.mode.omega_m
        omega = np.concatenate(([0.0], np.logspace(np.log10(low), np.log10(top), 1000)))
        expected = radiation_force_transfer(coupled_point, omega)
        got = realization.frequency_response(omega)
        assert np.max(np.abs(got - expected) / np.abs(expected)) < 1e-6

    def test_discrete_response_is_hold_equivalent(self, coupled_point):
        realization = realize_force_filter(coupled_point, DT)
        omega = np.logspace(np.log10(1e-3 * coupled_point.mode.omega_m), np.log10(0.2 / DT), 1000)
        got = realization.discrete_frequency_response(omega)
        held = self._zoh_transfer(coupled_point, omega, DT)
        assert np.max(np.abs(got - held) / np.abs(held)) < 1e-6

        # em relação a H contínuo, só o atraso de meio passo do retentor (mais aliasing)
        exact = radiation_force_transfer(coupled_point, omega)
        assert np.all(np.abs(got - exact) / np.abs(exact) <= 0.5 * omega * DT + 1e-3)

    def test_poles(self, coupled_point):
        realization = realize_force_filter(coupled_point, DT)
        omega_c = coupled_point.cavity.omega_c
        poles = sorted(realization.poles, key=lambda p: p.imag)
        np.testing.assert_allclose(poles, [omega_c * (-1 - 0.3j), omega_c * (-1 + 0.3j)], rtol=1e-12)

    def test_discrete_dc_gain(self, coupled_point):
        realization = realize_force_filter(coupled_point, DT)
        assert realization.dc_gain == pytest.approx(radiation_force_transfer(coupled_point, 0.0).real, rel=1e-9)

    def test_step_and_apply_agree(self, coupled_point):
        realization = realize_force_filter(coupled_point, DT)
        x = np.random.default_rng(0).standard_normal(300) * 1e-14
        streamed = np.array([realization.step(value) for value in x])
        np.testing.assert_allclose(realization.apply(x), streamed, rtol=1e-7, atol=1e-9 * np.max(np.abs(streamed)))
        assert streamed[0] == 0.0

    def test_uncoupled_filter_is_silent(self, bare_point):
        realization = realize_force_filter(bare_point, DT)
        np.testing.assert_array_equal(realization.apply(np.ones(10)), np.zeros(10))

    def test_coarse_step_rejected(self, coupled_point):
        with pytest.raises(SimulationConfigError):
            realize_force_filter(coupled_point, 1e-6)
        with pytest.raises(SimulationConfigError):
            check_time_step(1e6, -1.0)


class TestSimConfig:
    @pytest.mark.parametrize("kwargs", [
        {"duration": 0.0},
        {"duration": 1e-3, "dt": -1e-9},
        {"duration": 1e-3, "burn_in": 1e-3},
        {"duration": 1e-3, "n_trajectories": 0},
        {"duration": 1e-3, "scheme": "euler"},
    ])
    def test_invalid_config(self, kwargs):
        with pytest.raises(SimulationConfigError):
            SimConfig(**kwargs)

    def test_default_step(self, bare_point):
        assert SimConfig(duration=1e-3).scheme == "kick-drift"
        resolved = SimConfig(duration=1e-3).resolved(bare_point)
        assert resolved.dt == pytest.approx(DT)
        assert resolved.n_samples() == round(1e-3 / DT)

    def test_unresolved_step(self):
        with pytest.raises(SimulationConfigError):
            SimConfig(duration=1e-3).n_samples()

    def test_thermal_samples_variance(self, drum_mode, bare_point):
        config = SimConfig(duration=2e-3, seed=1).resolved(bare_point)
        forces = thermal_force_samples(drum_mode, 300.0, config)
        expected = 2 * BOLTZMANN * 300.0 * drum_mode.mass * drum_mode.gamma_m / config.dt
        assert np.var(forces) == pytest.approx(expected, rel=0.02)
        assert not np.any(thermal_force_samples(drum_mode, 0.0, config))


class TestIntegrator:
    def test_zero_temperature_at_rest(self, drum_mode, cavity):
        op = OperatingPoint(drum_mode, cavity, 0.0, 0.0, 0.0)
        trajectory = integrate(op, SimConfig(duration=1e-4))
        assert trajectory.status == STATUS_OK
        assert not np.any(trajectory.samples)

    def test_state_size_follows_coupling(self, bare_point, coupled_point):
        assert build_step_map(bare_point, DT)[0].shape == (2, 2)
        assert build_step_map(coupled_point, DT)[0].shape == (4, 4)
        assert build_step_map(coupled_point, DT, "exact")[0].shape == (4, 4)

    def test_same_seed_same_samples(self, fast_mode, cavity):
        op = OperatingPoint(fast_mode, cavity, 0.0, 0.0)
        config = SimConfig(duration=2e-4, seed=11)
        first = integrate(op, config)
        np.testing.assert_array_equal(first.samples, integrate(op, config).samples)
        assert not np.array_equal(first.samples, integrate(op, config, trajectory_index=1).samples)

    def test_ensemble_independent_of_workers(self, fast_mode, cavity):
        op = OperatingPoint(fast_mode, cavity, -0.2, 10.0)
        config = SimConfig(duration=2e-4, seed=5, n_trajectories=3)
        serial = run_ensemble(op, config, workers=1)
        pooled = run_ensemble(op, config, workers=2)
        assert [t.trajectory_index for t in pooled] == [0, 1, 2]
        for a, b in zip(serial, pooled):
            np.testing.assert_array_equal(a.samples, b.samples)

    @pytest.mark.parametrize("scheme", ["exact", "kick-drift"])
    def test_bare_ringdown_rate(self, fast_mode, cavity, scheme):
        op = OperatingPoint(fast_mode, cavity, 0.0, 0.0, 0.0)
        trajectory = integrate(op, SimConfig(duration=2e-3, initial_displacement=1e-12, scheme=scheme))
        estimate = ringdown_rate(trajectory)
        assert estimate.good_fit
        assert estimate.rate == pytest.approx(fast_mode.gamma_m / 2, rel=0.02)

    @pytest.mark.parametrize("scheme", ["exact", "kick-drift"])
    def test_coupled_ringdown_rate(self, fast_mode, cavity, scheme):
        op = OperatingPoint(fast_mode, cavity, -0.45, STRONG_P_RES, 0.0)
        dyn = effective_dynamics(op)
        trajectory = integrate(op, SimConfig(duration=1e-3, initial_displacement=1e-12, scheme=scheme))
        assert ringdown_rate(trajectory).rate == pytest.approx(dyn.gamma_eff / 2, rel=0.05)

    def test_growth_above_threshold(self, fast_mode, cavity):
        op = OperatingPoint(fast_mode, cavity, 0.45, STRONG_P_RES)
        dyn = effective_dynamics(op)
        assert not dyn.stable
        trajectory = integrate(op, SimConfig(duration=2e-2, seed=2))
        assert trajectory.status == STATUS_UNSTABLE_GROWTH and trajectory.diverged
        assert trajectory.samples.size < round(2e-2 / DT)
        growth = -ringdown_rate(trajectory).rate
        assert growth == pytest.approx(-dyn.gamma_eff / 2, rel=0.10)

    @pytest.mark.slow
    def test_ensemble_temperature_at_bath(self, fast_mode, cavity):
        op = OperatingPoint(fast_mode, cavity, 0.0, 0.0)
        trajectories = run_ensemble(op, SimConfig(duration=4e-2, seed=21, burn_in=1e-3, n_trajectories=8))
        assert ensemble_temperature(trajectories, fast_mode.omega_m) == pytest.approx(300.0, rel=0.05)

    @pytest.mark.slow
    def test_ensemble_temperature_cooled(self, fast_mode, cavity):
        op = OperatingPoint(fast_mode, cavity, -0.45, STRONG_P_RES)
        dyn = effective_dynamics(op)
        trajectories = run_ensemble(op, SimConfig(duration=4e-2, seed=22, burn_in=1e-3, n_trajectories=8))
        assert ensemble_temperature(trajectories, dyn.omega_eff) == pytest.approx(area_temperature(op), rel=0.05)

    @pytest.mark.slow
    def test_ensemble_temperature_high_q(self, drum_mode, cavity):
        """Q = 10⁴: 100/Γ_m após 10/Γ_m de burn-in, em lotes de 4 trajetórias."""
        op = OperatingPoint(drum_mode, cavity, 0.0, 0.0)
        burn_in = 10.0 / drum_mode.gamma_m
        config = SimConfig(duration=burn_in + 100.0 / drum_mode.gamma_m, burn_in=burn_in, n_trajectories=4)
        variance = float(np.mean([
            ensemble_variance(run_ensemble(op, replace(config, seed=100 + batch))) for batch in range(32)
        ]))
        assert drum_mode.spring_constant * variance / BOLTZMANN == pytest.approx(300.0, rel=0.05)
        assert np.sqrt(variance) == pytest.approx(2.9e-14, rel=0.05)

    @pytest.mark.slow
    @pytest.mark.parametrize("phi", [0.2, 0.3, 0.45, 0.6, 0.8])
    @pytest.mark.parametrize("factor", [0.5, 0.8, 1.2, 1.5, 2.0])
    def test_divergence_agrees_with_stability(self, fast_mode, cavity, phi, factor):
        p_cavity = factor * instability_threshold(fast_mode, cavity, phi)
        op = OperatingPoint.from_intracavity_power(fast_mode, cavity, phi, p_cavity)
        dyn = effective_dynamics(op, area_check=False)
        trajectory = integrate(op, SimConfig(duration=1e-2, seed=7))
        assert dyn.stable == (factor < 1.0)
        assert trajectory.diverged == (not dyn.stable)


class TestRingdown:
    def test_short_trajectory_rejected(self, bare_point):
        trajectory = integrate(replace(bare_point, temperature_bath=0.0),
                               SimConfig(duration=50 * DT, initial_displacement=1e-12))
        with pytest.raises(FitError):
            ringdown_rate(trajectory)

    def test_silent_trajectory_rejected(self, drum_mode, cavity):
        op = OperatingPoint(drum_mode, cavity, 0.0, 0.0, 0.0)
        with pytest.raises(FitError):
            ringdown_rate(integrate(op, SimConfig(duration=1e-4)))


class TestTrajectoryIO:
    def test_raw_layout(self, fast_mode, cavity, tmp_path):
        op = OperatingPoint(fast_mode, cavity, 0.0, 0.0)
        trajectory = integrate(op, SimConfig(duration=1e-5, seed=4))
        path = write_trajectory_raw(trajectory, tmp_path / "t.ospr")
        data = path.read_bytes()
        assert data[:4] == b"OSPR"
        assert len(data) == 16 + 8 * trajectory.samples.size
        dt, samples = read_trajectory_raw(path)
        assert dt == trajectory.dt
        np.testing.assert_array_equal(samples, trajectory.samples)

    def test_raw_bad_magic(self, tmp_path):
        path = tmp_path / "bad.ospr"
        path.write_bytes(b"XXXX" + bytes(12))
        with pytest.raises(SpectrumFileError):
            read_trajectory_raw(path)

    def test_text_export(self, fast_mode, cavity, tmp_path):
        op = OperatingPoint(fast_mode, cavity, -0.1, 5.0)
        trajectory = integrate(op, SimConfig(duration=1e-5, seed=4))
        path = write_trajectory_text(trajectory, tmp_path / "t.csv")
        assert "# phi=-0.1" in path.read_text(encoding="utf-8")
        dt, samples = read_trajectory_text(path)
        assert dt == pytest.approx(trajectory.dt, rel=1e-15)
        np.testing.assert_array_equal(samples, trajectory.samples)


def _point_for_ratio(mode, cavity, phi, target):
    """Ponto com Γ_eff/Γ_m = target, pela linearidade do amortecimento em p_res."""
    if target == 1.0:
        return OperatingPoint(mode, cavity, 0.0, 0.0)
    per_watt = effective_dynamics(OperatingPoint(mode, cavity, phi, 1.0), area_check=False).damping_ratio - 1.0
    return OperatingPoint(mode, cavity, phi, (target - 1.0) / per_watt)


@pytest.mark.slow
class TestSimulatedSpectrum:
    @pytest.mark.parametrize("target, phi, batches, duration", [
        (0.2, 0.45, 2, 0.13),
        (1.0, 0.0, 1, 8e-2),
        (5.0, -0.45, 1, 8e-2),
        (30.0, -0.45, 1, 8e-2),
    ])
    def test_welch_matches_closed_form_near_resonance(self, fast_mode, cavity, target, phi, batches, duration):
        from src.analysis.spectrum import average_spectra, closed_form_spectrum, welch_psd

        op = _point_for_ratio(fast_mode, cavity, phi, target)
        dyn = effective_dynamics(op)
        assert dyn.damping_ratio == pytest.approx(target, rel=1e-9)

        spectra = []
        for batch in range(batches):
            config = SimConfig(duration=duration, seed=31 + batch, burn_in=1e-3, n_trajectories=8)
            spectra.extend(welch_psd(t, segment_len=1 << 16) for t in run_ensemble(op, config))
        simulated = average_spectra(spectra)

        center = dyn.omega_eff / (2 * np.pi)
        half = 10.0 * dyn.gamma_eff / (2 * np.pi)
        near = simulated.window(max(center - half, 0.5 * center), min(center + half, 1.5 * center))
        expected = closed_form_spectrum(op, near.freqs)
        assert np.sum(near.psd) / np.sum(expected.psd) == pytest.approx(1.0, rel=0.05)
