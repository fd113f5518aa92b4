"""
Análise espectral: PSD, ajustes, temperaturas e calibração.
"""

from .spectrum import (
    NoiseSpectrum,
    average_spectra,
    closed_form_spectrum,
    default_frequency_grid,
    welch_psd,
    welch_psd_samples,
)
from .fitting import LorentzianFit, fit_lorentzian, lorentzian
from .temperature import (
    BackgroundCorrectedTemperature,
    background_corrected_temperature,
    background_psd,
    observable_temperature,
    temperature_from_area,
)
from .calibration import (
    CalibrationTable,
    apply_calibration,
    build_calibration,
    default_gain_model,
    read_calibration,
    synthesize_tone_spectrum,
    tone_power,
    write_calibration,
)
from .spectrum_io import format_report, read_spectrum, write_report, write_spectrum

__all__ = [
    'NoiseSpectrum', 'average_spectra', 'closed_form_spectrum', 'default_frequency_grid',
    'welch_psd', 'welch_psd_samples',
    'LorentzianFit', 'fit_lorentzian', 'lorentzian',
    'BackgroundCorrectedTemperature', 'background_corrected_temperature', 'background_psd',
    'observable_temperature', 'temperature_from_area',
    'CalibrationTable', 'apply_calibration', 'build_calibration', 'default_gain_model',
    'read_calibration', 'synthesize_tone_spectrum', 'tone_power', 'write_calibration',
    'format_report', 'read_spectrum', 'write_report', 'write_spectrum',
]
