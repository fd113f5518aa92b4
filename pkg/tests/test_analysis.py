import numpy as np
import pytest

from src.analysis.calibration import (
    CalibrationTable,
    apply_calibration,
    build_calibration,
    default_gain_model,
    read_calibration,
    synthesize_tone_spectrum,
    tone_power,
    write_calibration,
)
from src.analysis.fitting import LorentzianFit, fit_lorentzian, lorentzian
from src.analysis.spectrum import (
    NoiseSpectrum,
    average_spectra,
    closed_form_spectrum,
    welch_psd_samples,
)
from src.analysis.spectrum_io import format_report, read_spectrum, write_spectrum
from src.analysis.temperature import (
    background_corrected_temperature,
    background_psd,
    observable_temperature,
    temperature_from_area,
)
from src.exceptions import (
    BackgroundOverlapError,
    CalibrationError,
    FitError,
    SpectrumFileError,
    UnstableOperatingPointError,
    ValidationError,
)
from src.model.constants import BOLTZMANN
from src.model.optomechanics import effective_dynamics
from src.model.types import MechanicalMode, OperatingPoint

FINE_GRID = np.linspace(812e3, 816e3, 4001)


@pytest.fixture
def neighbour_mode():
    """Modo largo em 830 kHz: cauda de ~3% da área do alvo na janela de ajuste."""
    return MechanicalMode.from_frequency_hz(830e3, 190e-9, 20.0, name="neighbour")


@pytest.fixture
def synthetic_peak():
    freqs = np.linspace(813e3, 815e3, 2001)
    psd = lorentzian(freqs, 814e3, 81.4, 8e-28, 1e-32)
    return NoiseSpectrum(freqs, psd, "ingested", 1.0)


class TestNoiseSpectrum:
    def test_closed_form_area_is_equipartition(self, bare_point, drum_mode):
        spectrum = closed_form_spectrum(bare_point)
        assert spectrum.provenance == "closed-form"
        assert spectrum.variance() == pytest.approx(BOLTZMANN * 300.0 / drum_mode.spring_constant, rel=0.02)
        assert spectrum.peak_frequency() == pytest.approx(814e3, rel=1e-5)

    @pytest.mark.parametrize("freqs, psd, provenance", [
        ([1.0, 2.0, 3.0], [1.0, -1.0, 1.0], "ingested"),
        ([1.0, 2.0, 4.0], [1.0, 1.0, 1.0], "ingested"),
        ([3.0, 2.0, 1.0], [1.0, 1.0, 1.0], "ingested"),
        ([1.0, 2.0, 3.0], [1.0, 1.0, 1.0], "measured"),
        ([1.0], [1.0], "ingested"),
    ])
    def test_invalid_spectrum(self, freqs, psd, provenance):
        with pytest.raises(ValidationError):
            NoiseSpectrum(np.array(freqs), np.array(psd), provenance, 1.0)

    def test_window_and_scaling(self, synthetic_peak):
        local = synthetic_peak.window(813.9e3, 814.1e3)
        assert local.freqs[0] >= 813.9e3 and local.freqs[-1] <= 814.1e3
        assert synthetic_peak.scaled(4.0).variance() == pytest.approx(4.0 * synthetic_peak.variance())
        with pytest.raises(ValidationError):
            synthetic_peak.window(1.0, 2.0)

    def test_welch_of_white_noise(self):
        dt = 1e-6
        samples = np.random.default_rng(3).standard_normal(1 << 18) * 2.0
        spectrum = welch_psd_samples(samples, dt, segment_len=1024)
        assert spectrum.resolution_bw == pytest.approx(1.0 / (1024 * dt))
        assert np.mean(spectrum.psd[1:-1]) == pytest.approx(2 * 4.0 * dt, rel=0.02)

    def test_welch_sinusoid_power(self):
        dt, segment = 1e-6, 4096
        f0 = 100 / (segment * dt)
        t = np.arange(1 << 18) * dt
        spectrum = welch_psd_samples(3e-14 * np.sin(2 * np.pi * f0 * t), dt, segment_len=segment)
        assert spectrum.variance() == pytest.approx((3e-14) ** 2 / 2, rel=0.01)
        assert spectrum.peak_frequency() == pytest.approx(f0)

    def test_welch_rejects_short_series(self):
        with pytest.raises(ValidationError):
            welch_psd_samples(np.zeros(100), 1e-6, segment_len=256)

    def test_average_requires_same_grid(self, synthetic_peak):
        other = NoiseSpectrum(synthetic_peak.freqs + 1.0, synthetic_peak.psd, "ingested", 1.0)
        with pytest.raises(ValidationError):
            average_spectra([synthetic_peak, other])
        averaged = average_spectra([synthetic_peak, synthetic_peak.scaled(3.0)])
        np.testing.assert_allclose(averaged.psd, 2.0 * synthetic_peak.psd)
        assert averaged.metadata["averaged"] == 2


class TestLorentzianFit:
    def test_recovers_synthetic_parameters(self, synthetic_peak):
        fit = fit_lorentzian(synthetic_peak)
        assert fit.center == pytest.approx(814e3, rel=1e-6)
        assert fit.fwhm == pytest.approx(81.4, rel=0.01)
        assert fit.area == pytest.approx(8e-28, rel=0.01)
        assert fit.goodness > 0.999
        assert not fit.multi_peak_suspect

    def test_recovers_noisy_parameters(self, synthetic_peak):
        noise = 1.0 + 0.05 * np.random.default_rng(9).standard_normal(synthetic_peak.psd.size)
        noisy = NoiseSpectrum(synthetic_peak.freqs, synthetic_peak.psd * noise, "ingested", 1.0)
        fit = fit_lorentzian(noisy)
        assert fit.fwhm == pytest.approx(81.4, rel=0.02)
        assert fit.area == pytest.approx(8e-28, rel=0.02)

    def test_closed_form_temperature(self, bare_point, drum_mode):
        fit = fit_lorentzian(closed_form_spectrum(bare_point))
        assert temperature_from_area(fit, drum_mode) == pytest.approx(300.0, rel=0.02)

    def test_cooled_linewidth(self, cooling_point, drum_mode):
        fit = fit_lorentzian(closed_form_spectrum(cooling_point))
        ratio = effective_dynamics(cooling_point).damping_ratio
        assert fit.fwhm / drum_mode.linewidth_hz == pytest.approx(ratio, rel=0.01)

    def test_second_peak_flagged(self, synthetic_peak):
        second = lorentzian(synthetic_peak.freqs, 814.6e3, 40.0, 1.2e-28, 0.0)
        spectrum = NoiseSpectrum(synthetic_peak.freqs, synthetic_peak.psd + second, "ingested", 1.0)
        assert fit_lorentzian(spectrum).multi_peak_suspect

    def test_too_few_points(self, synthetic_peak):
        with pytest.raises(FitError):
            fit_lorentzian(synthetic_peak, window=(814e3, 814.003e3))

    def test_degenerate_fit_rejected(self):
        with pytest.raises(FitError):
            LorentzianFit(center=1.0, fwhm=0.0, area=1.0, background=0.0, goodness=1.0)
        with pytest.raises(FitError):
            LorentzianFit(center=1.0, fwhm=1.0, area=1.0, background=0.0, goodness=1.5)


class TestTemperature:
    def _composite(self, op, neighbour, scale=1.0):
        target = closed_form_spectrum(op, FINE_GRID)
        psd = scale * target.psd + background_psd([neighbour], 300.0, FINE_GRID)
        return NoiseSpectrum(FINE_GRID, psd, "ingested", target.resolution_bw)

    def test_background_removed(self, bare_point, drum_mode, neighbour_mode):
        spectrum = self._composite(bare_point, neighbour_mode)
        result = background_corrected_temperature(spectrum, drum_mode, [neighbour_mode], 300.0)
        assert result.reliable and result.fit is not None
        assert result.temperature_k == pytest.approx(300.0, rel=0.02)

    def test_cooled_background_removed(self, cooling_point, drum_mode, neighbour_mode):
        spectrum = self._composite(cooling_point, neighbour_mode)
        result = background_corrected_temperature(spectrum, drum_mode, [neighbour_mode], 300.0)
        assert result.temperature_k == pytest.approx(effective_dynamics(cooling_point).t_eff, rel=0.03)

    def test_buried_peak_is_unreliable(self, bare_point, drum_mode, neighbour_mode):
        spectrum = self._composite(bare_point, neighbour_mode, scale=1e-10)
        result = background_corrected_temperature(spectrum, drum_mode, [neighbour_mode], 300.0,
                                                  window=(812.5e3, 815.5e3))
        assert not result.reliable and result.fit is None

    def test_overlap_and_duplicates_rejected(self, bare_point, drum_mode):
        spectrum = closed_form_spectrum(bare_point, FINE_GRID)
        inside = MechanicalMode.from_frequency_hz(814.5e3, 190e-9, 1e4, name="inside")
        with pytest.raises(BackgroundOverlapError):
            background_corrected_temperature(spectrum, drum_mode, [inside], 300.0, window=(812e3, 816e3))
        with pytest.raises(ValidationError):
            background_corrected_temperature(spectrum, drum_mode, [drum_mode], 300.0)

    def test_observable_temperature(self, bare_point, neighbour_mode, upper_mode):
        assert observable_temperature(bare_point, []) == pytest.approx(300.0)
        assert observable_temperature(bare_point, [neighbour_mode]) > 300.0
        assert observable_temperature(bare_point, [upper_mode]) > 300.0

    def test_observable_temperature_unstable(self, drum_mode, cavity, upper_mode):
        op = OperatingPoint.from_incident_power(drum_mode, cavity, 0.11, 2.5e-3)
        with pytest.raises(UnstableOperatingPointError):
            observable_temperature(op, [upper_mode])


class TestCalibration:
    PHIS = (-0.5, -0.25, 0.0, 0.25, 0.5)

    @pytest.fixture
    def tone_spectra(self, bare_point):
        base = closed_form_spectrum(bare_point, np.linspace(813e3, 815e3, 2001))
        return [(phi, synthesize_tone_spectrum(base, phi, 1e-13, 814e3)) for phi in self.PHIS]

    def test_gain_round_trip(self, tone_spectra):
        table = build_calibration(tone_spectra, 1e-13, 814e3)
        for phi in self.PHIS:
            assert table.gain(phi) == pytest.approx(default_gain_model(phi), rel=1e-9)
        assert table.phi_range == (-0.5, 0.5)

    def test_gain_outside_range(self, tone_spectra):
        table = build_calibration(tone_spectra, 1e-13, 814e3)
        with pytest.raises(CalibrationError):
            table.gain(0.6)

    def test_reference_required(self, tone_spectra):
        without_reference = [(phi, s) for phi, s in tone_spectra if phi != 0.0]
        with pytest.raises(CalibrationError):
            build_calibration(without_reference, 1e-13, 814e3)
        with pytest.raises(CalibrationError):
            CalibrationTable(((0.0, 1.0), (0.0, 0.9)), 1e-13, 814e3)

    def test_missing_tone(self, bare_point):
        with pytest.raises(CalibrationError):
            tone_power(closed_form_spectrum(bare_point, np.linspace(813e3, 815e3, 2001)), 814e3)

    def test_square_law(self, bare_point):
        table = CalibrationTable(((-0.5, 0.8), (0.0, 1.0), (0.5, 0.8)), 1e-13, 814e3)
        spectrum = closed_form_spectrum(bare_point)
        calibrated = apply_calibration(spectrum, table, 0.5)
        assert spectrum.variance() / calibrated.variance() == pytest.approx(0.8 ** 2, rel=1e-12)
        assert calibrated.metadata["calibration_gain"] == pytest.approx(0.8)

    def test_file_round_trip(self, tmp_path, tone_spectra):
        table = build_calibration(tone_spectra, 1e-13, 814e3)
        loaded = read_calibration(write_calibration(table, tmp_path / "calibration.csv"))
        assert loaded.drive_freq_hz == 814e3
        for (phi, gain), (phi2, gain2) in zip(table.entries, loaded.entries):
            assert phi == phi2 and gain == pytest.approx(gain2, rel=1e-14)


class TestSpectrumFiles:
    def test_round_trip(self, tmp_path, cooling_point):
        spectrum = closed_form_spectrum(cooling_point)
        path = write_spectrum(spectrum, tmp_path / "s.csv", {"series": "test"})
        loaded = read_spectrum(path)
        assert loaded.provenance == "closed-form"
        np.testing.assert_allclose(loaded.freqs, spectrum.freqs, rtol=1e-14)
        np.testing.assert_allclose(loaded.psd, spectrum.psd, rtol=1e-14)
        assert loaded.metadata["phi"] == pytest.approx(-0.45)
        assert loaded.metadata["series"] == "test"

    @pytest.mark.parametrize("body, line", [
        ("freq,psd\n1,1\n", 2),
        ("freq_hz,psd_m2_per_hz\n1,1\n2,-1\n", 4),
        ("freq_hz,psd_m2_per_hz\n1,1\n2,abc\n", 4),
        ("freq_hz,psd_m2_per_hz\n1,1\n2,1,3\n", 4),
        ("freq_hz,psd_m2_per_hz\n2,1\n1,1\n", 4),
        ("freq_hz,psd_m2_per_hz\n1,1\n2,inf\n", 4),
    ])
    def test_malformed_lines(self, tmp_path, body, line):
        path = tmp_path / "bad.csv"
        path.write_text("# provenance=ingested\n" + body, encoding="utf-8")
        with pytest.raises(SpectrumFileError) as info:
            read_spectrum(path)
        assert info.value.line == line
        assert f":{line}:" in str(info.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpectrumFileError):
            read_spectrum(tmp_path / "missing.csv")

    def test_report_format(self):
        text = format_report({"center_hz": 814000.0, "good": True, "mode": "drum"})
        assert text == "center_hz=814000\ngood=True\nmode=drum\n"
