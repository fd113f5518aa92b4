import math

import numpy as np
import pytest

from src.exceptions import UnstableOperatingPointError, ValidationError
from src.model.constants import BOLTZMANN
from src.model.optomechanics import (
    area_temperature,
    cavity_delta,
    displacement_psd,
    displacement_variance,
    effective_dynamics,
    effective_susceptibility,
    instability_threshold,
    langevin_psd,
    mech_susceptibility,
    nonlinear_phase,
    radiation_force_transfer,
    threshold_incident_power,
)
from src.model.types import CavitySetup, MechanicalMode, OperatingPoint, cavity_bandwidth_from_length


class TestTypes:
    def test_spring_constant_matches_reference(self, drum_mode):
        assert drum_mode.spring_constant == pytest.approx(5.0e6, rel=0.02)
        assert drum_mode.gamma_m == pytest.approx(511.45, rel=1e-4)

    @pytest.mark.parametrize("kwargs", [
        {"omega_m": -1.0, "mass": 1e-7, "q_factor": 10.0},
        {"omega_m": 1e6, "mass": 0.0, "q_factor": 10.0},
        {"omega_m": 1e6, "mass": 1e-7, "q_factor": 0.5},
        {"omega_m": math.nan, "mass": 1e-7, "q_factor": 10.0},
    ])
    def test_invalid_mode_rejected(self, kwargs):
        with pytest.raises(ValidationError):
            MechanicalMode(**kwargs)

    def test_invalid_cavity_rejected(self):
        with pytest.raises(ValidationError):
            CavitySetup.from_bandwidth_hz(1.064e-6, 2.4e-3, -1.0, 1.05e6, 2970.0)

    def test_bandwidth_from_length_is_consistent(self, cavity):
        assert cavity_bandwidth_from_length(2.4e-3, 30000.0) / (2 * math.pi) == pytest.approx(1.041e6, rel=1e-3)
        assert abs(cavity.length_consistency() - 1.0) < 0.05

    def test_power_constructors(self, drum_mode, cavity):
        op = OperatingPoint.from_incident_power(drum_mode, cavity, 0.5, 1e-3)
        assert op.p_res == pytest.approx(2.970)
        assert op.intracavity_power == pytest.approx(2.970 / 1.25)
        same = OperatingPoint.from_intracavity_power(drum_mode, cavity, 0.5, op.intracavity_power)
        assert same.p_res == pytest.approx(op.p_res)

    def test_negative_power_rejected(self, drum_mode, cavity):
        with pytest.raises(ValidationError):
            OperatingPoint(drum_mode, cavity, 0.1, -1.0)


class TestClosedForm:
    def test_langevin_psd_reference(self, drum_mode):
        assert langevin_psd(drum_mode, 300.0) == pytest.approx(8.0e-25, rel=0.02)

    def test_langevin_psd_rejects_negative_temperature(self, drum_mode):
        with pytest.raises(ValidationError):
            langevin_psd(drum_mode, -1.0)

    def test_nonlinear_phase_per_watt(self, drum_mode, cavity):
        assert nonlinear_phase(cavity, drum_mode, 1.0) == pytest.approx(1.5139e-4, rel=1e-3)
        with pytest.raises(ValidationError):
            nonlinear_phase(cavity, drum_mode, -1.0)

    def test_susceptibility_scalar_and_array(self, drum_mode):
        scalar = mech_susceptibility(drum_mode, drum_mode.omega_m)
        assert isinstance(scalar, complex)
        assert scalar == pytest.approx(1j / (drum_mode.mass * drum_mode.gamma_m * drum_mode.omega_m))
        array = mech_susceptibility(drum_mode, np.array([0.0, drum_mode.omega_m]))
        assert array.shape == (2,)
        assert array[0] == pytest.approx(1.0 / drum_mode.spring_constant)

    def test_susceptibility_above_resonance(self, drum_mode):
        value = mech_susceptibility(drum_mode, 2 * drum_mode.omega_m)
        assert abs(value) == pytest.approx(1.0 / (3 * drum_mode.spring_constant), rel=1e-3)
        assert abs(value.imag) < 1e-3 * abs(value.real)

    def test_cavity_response(self, cavity):
        assert cavity_delta(cavity, 0.0, 0.0) == pytest.approx(1.0)
        assert cavity_delta(cavity, 0.0, cavity.omega_c) == pytest.approx(-2j)
        value = cavity_delta(cavity, -0.45, 2 * math.pi * 814e3)
        assert value.real == pytest.approx(0.60, abs=0.01)
        assert value.imag == pytest.approx(-1.55, abs=0.01)

    def test_zero_coupling_returns_bare_susceptibility(self, bare_point, drum_mode):
        omega = np.linspace(0.9, 1.1, 11) * drum_mode.omega_m
        np.testing.assert_array_equal(effective_susceptibility(bare_point, omega),
                                      mech_susceptibility(drum_mode, omega))

    def test_force_transfer_static_limit(self, drum_mode, cavity):
        op = OperatingPoint(drum_mode, cavity, 0.3, 2.0)
        phi_nl = nonlinear_phase(cavity, drum_mode, op.intracavity_power)
        expected = -2 * 0.3 * phi_nl * drum_mode.spring_constant / (1 + 0.3 ** 2)
        assert radiation_force_transfer(op, 0.0) == pytest.approx(expected, rel=1e-12)

    def test_thermal_rms_at_resonance(self, bare_point, drum_mode):
        variance = displacement_variance(bare_point)
        assert variance == pytest.approx(BOLTZMANN * 300.0 / drum_mode.spring_constant, rel=1e-6)
        assert math.sqrt(variance) == pytest.approx(2.9e-14, rel=0.02)

    def test_zero_temperature_has_zero_variance(self, drum_mode, cavity):
        assert displacement_variance(OperatingPoint(drum_mode, cavity, 0.0, 0.0, 0.0)) == 0.0

    def test_bare_dynamics(self, bare_point, drum_mode):
        dyn = effective_dynamics(bare_point)
        assert dyn.omega_eff == drum_mode.omega_m
        assert dyn.gamma_eff == drum_mode.gamma_m
        assert dyn.t_eff == pytest.approx(300.0)
        assert dyn.stable and dyn.small_shift

    def test_cooling_point(self, cooling_point):
        dyn = effective_dynamics(cooling_point)
        assert dyn.damping_ratio == pytest.approx(7.04, rel=0.01)
        assert dyn.t_eff == pytest.approx(42.6, rel=0.01)
        assert dyn.small_shift and dyn.t_eff_area is None

    def test_area_route_matches_linewidth_route(self, cooling_point):
        dyn = effective_dynamics(cooling_point)
        assert area_temperature(cooling_point) == pytest.approx(dyn.t_eff, rel=0.02)

    def test_heating_and_cooling_sides(self, drum_mode, cavity):
        for phi in (0.05, 0.2, 0.6):
            heating = effective_dynamics(OperatingPoint(drum_mode, cavity, phi, 2.0))
            cooling = effective_dynamics(OperatingPoint(drum_mode, cavity, -phi, 2.0))
            assert heating.damping_ratio < 1.0 < cooling.damping_ratio
            assert heating.frequency_shift_hz > 0 > cooling.frequency_shift_hz

    def test_damping_change_is_linear_in_power(self, drum_mode, cavity):
        one = effective_dynamics(OperatingPoint(drum_mode, cavity, -0.3, 1.0)).damping_ratio - 1.0
        two = effective_dynamics(OperatingPoint(drum_mode, cavity, -0.3, 2.0)).damping_ratio - 1.0
        assert two == pytest.approx(2.0 * one, rel=1e-9)

    @pytest.mark.parametrize("phi", [-0.45, -0.1, 0.2, 0.6])
    def test_damping_change_scales_with_q(self, cavity, phi):
        high_q = MechanicalMode.from_frequency_hz(814e3, 190e-9, 1e4)
        low_q = MechanicalMode.from_frequency_hz(814e3, 190e-9, 1e3)
        high = effective_dynamics(OperatingPoint(high_q, cavity, phi, 1.0), area_check=False)
        low = effective_dynamics(OperatingPoint(low_q, cavity, phi, 1.0), area_check=False)
        # Γ_eff/Γ_m - 1 cresce com Q; Ω_eff/Ω_m - 1 não depende de Q
        assert (high.damping_ratio - 1.0) / (low.damping_ratio - 1.0) == pytest.approx(10.0, rel=1e-9)
        assert high.omega_eff / high.omega_m == pytest.approx(low.omega_eff / low.omega_m, rel=1e-12)
        assert high.omega_eff != high.omega_m

    def test_spring_sign_flips_across_cavity_bandwidth(self, drum_mode, upper_mode, cavity):
        low = effective_dynamics(OperatingPoint(drum_mode, cavity, 0.05, 1.0))
        high = effective_dynamics(OperatingPoint(upper_mode, cavity, 0.05, 1.0))
        assert np.sign(low.frequency_shift_hz) == -np.sign(high.frequency_shift_hz)

    def test_unstable_point_flags_and_raises(self, drum_mode, cavity):
        op = OperatingPoint.from_incident_power(drum_mode, cavity, 0.11, 2.5e-3)
        dyn = effective_dynamics(op)
        assert not dyn.stable and dyn.t_eff is None and dyn.gamma_eff < 0
        with pytest.raises(UnstableOperatingPointError):
            displacement_psd(op, drum_mode.omega_m)


class TestInstabilityThreshold:
    def test_only_positive_detuning_has_threshold(self, drum_mode, cavity):
        for phi in (-0.8, -0.3, -0.05):
            assert instability_threshold(drum_mode, cavity, phi) is None
        for phi in (0.05, 0.3, 0.8):
            assert instability_threshold(drum_mode, cavity, phi) > 0

    def test_threshold_value_and_zero_damping(self, drum_mode, cavity):
        p_th = instability_threshold(drum_mode, cavity, 0.11)
        assert p_th == pytest.approx(4.98, rel=0.01)
        op = OperatingPoint.from_intracavity_power(drum_mode, cavity, 0.11, p_th)
        assert abs(effective_dynamics(op).gamma_eff) < 1e-9 * drum_mode.gamma_m

    @pytest.mark.parametrize("phi", [0.05, 0.11, 0.3, 0.8])
    def test_stability_flips_at_threshold(self, drum_mode, cavity, phi):
        p_th = instability_threshold(drum_mode, cavity, phi)
        below = OperatingPoint.from_intracavity_power(drum_mode, cavity, phi, p_th * (1 - 1e-9))
        above = OperatingPoint.from_intracavity_power(drum_mode, cavity, phi, p_th * (1 + 1e-9))
        assert effective_dynamics(below).stable
        assert not effective_dynamics(above).stable

    def test_heating_series_points_beyond_threshold(self, drum_mode, cavity):
        unstable = [
            phi for phi in (0.0, 0.03, 0.06, 0.09, 0.11, 0.13)
            if not effective_dynamics(OperatingPoint.from_incident_power(drum_mode, cavity, phi, 2.5e-3)).stable
        ]
        assert unstable == [0.09, 0.11, 0.13]

    def test_incident_threshold(self, drum_mode, cavity):
        p_th = instability_threshold(drum_mode, cavity, 0.2)
        assert threshold_incident_power(drum_mode, cavity, 0.2) == pytest.approx(p_th * 1.04 / 2970.0)
        assert threshold_incident_power(drum_mode, cavity, -0.2) is None

    def test_zero_detuning_rejected(self, drum_mode, cavity):
        with pytest.raises(ValidationError):
            instability_threshold(drum_mode, cavity, 0.0)


class TestReferenceExperiment:
    def test_cooling_minimum_and_heating_peak_at_3_2_mw(self, drum_mode, cavity):
        phis = np.linspace(-0.999, -0.001, 999)
        cooled = [effective_dynamics(OperatingPoint.from_incident_power(drum_mode, cavity, phi, 3.2e-3),
                                     area_check=False).t_eff for phi in phis]
        assert 10.0 <= min(cooled) <= 60.0

        heated = []
        for phi in np.linspace(1e-4, 0.5, 5000):
            dyn = effective_dynamics(OperatingPoint.from_incident_power(drum_mode, cavity, phi, 3.2e-3),
                                     area_check=False)
            if dyn.stable:
                heated.append(dyn.t_eff)
        assert max(heated) > 1000.0
