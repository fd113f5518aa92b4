"""
Temperaturas efetivas a partir de espectros: equipartição, correção do
fundo de outros modos e temperatura observável de um espectro composto.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.config import GlobalConfig
from src.exceptions import BackgroundOverlapError, UnstableOperatingPointError, ValidationError
from src.model.constants import BOLTZMANN
from src.model.optomechanics import effective_dynamics, langevin_psd, mech_susceptibility
from src.model.types import MechanicalMode, OperatingPoint
from src.analysis.fitting import DEFAULT_WINDOW_FWHM, LorentzianFit, fit_lorentzian
from src.analysis.spectrum import ONE_SIDED_FACTOR, NoiseSpectrum

logger = GlobalConfig.get_logger('temperature')

# Pico do modo alvo abaixo do fundo por mais que 60 dB
UNRELIABLE_RATIO = 1e-6


def temperature_from_area(fit: LorentzianFit, mode: MechanicalMode) -> float:
    """T_eff = M·(2π·center)²·area/k_B."""
    return mode.mass * (2 * math.pi * fit.center) ** 2 * fit.area / BOLTZMANN


def _area_to_temperature(area: float, mode: MechanicalMode, center_hz: float) -> float:
    return mode.mass * (2 * math.pi * center_hz) ** 2 * area / BOLTZMANN


def background_psd(other_modes: Sequence[MechanicalMode], bath_temperature: float, freqs) -> np.ndarray:
    """Fundo unilateral Σ_j 2|χ_j(2πf)|²·S_F,j das suscetibilidades nuas."""
    f = np.asarray(freqs, dtype=float)
    total = np.zeros_like(f)
    for other in other_modes:
        chi = np.asarray(mech_susceptibility(other, 2 * math.pi * f), dtype=complex)
        total += ONE_SIDED_FACTOR * np.abs(chi) ** 2 * langevin_psd(other, bath_temperature)
    return total


def _check_distinct(mode: MechanicalMode, other_modes: Sequence[MechanicalMode]) -> None:
    for other in other_modes:
        if other == mode:
            raise ValidationError(f"modo '{mode.name or mode.frequency_hz}' repetido entre os modos de fundo")


def _check_overlap(other_modes: Sequence[MechanicalMode], window: Tuple[float, float]) -> None:
    f_lo, f_hi = window
    for other in other_modes:
        if f_lo <= other.frequency_hz <= f_hi:
            raise BackgroundOverlapError(
                f"modo de fundo em {other.frequency_hz:.6g} Hz dentro da janela [{f_lo:.6g}, {f_hi:.6g}] Hz"
            )


@dataclass(frozen=True)
class BackgroundCorrectedTemperature:
    """
    Resultado da correção de fundo.

    temperature_k usa só a componente lorentziana do modo alvo;
    uncorrected_k é a área bruta da janela convertida em temperatura.
    """

    temperature_k: float
    uncorrected_k: float
    reliable: bool
    fit: Optional[LorentzianFit]
    window: Tuple[float, float]


def background_corrected_temperature(spectrum: NoiseSpectrum, mode: MechanicalMode,
                                     other_modes: Sequence[MechanicalMode], bath_temperature: float,
                                     window: Optional[Tuple[float, float]] = None) -> BackgroundCorrectedTemperature:
    """
    Temperatura do modo alvo descontando as caudas dos outros modos.

    Args:
        spectrum: Espectro unilateral medido ou sintético
        mode: Modo alvo
        other_modes: Modos cujas caudas formam o fundo
        bath_temperature: Temperatura do banho (K)
        window: Janela de ajuste; padrão centro ± 20 fwhm de um ajuste inicial

    Returns:
        BackgroundCorrectedTemperature (reliable=False se o pico estiver
        mais de 60 dB abaixo do fundo)

    Raises:
        ValidationError: Modo alvo repetido entre os modos de fundo
        BackgroundOverlapError: Outro modo dentro da janela
        FitError: Ajuste sem convergência
    """
    _check_distinct(mode, other_modes)
    if window is None:
        first = fit_lorentzian(spectrum)
        window = (first.center - DEFAULT_WINDOW_FWHM * first.fwhm, first.center + DEFAULT_WINDOW_FWHM * first.fwhm)
    _check_overlap(other_modes, window)

    local = spectrum.window(*window)
    raw_area = local.variance()

    if not other_modes:
        fit = fit_lorentzian(local)
        temperature = temperature_from_area(fit, mode)
        return BackgroundCorrectedTemperature(temperature, _area_to_temperature(raw_area, mode, fit.center),
                                              True, fit, window)

    background = background_psd(other_modes, bath_temperature, local.freqs)
    remainder = local.psd - background
    target_peak = float(np.max(remainder))
    background_level = float(np.max(background))
    center_guess = local.peak_frequency()

    if target_peak <= UNRELIABLE_RATIO * background_level:
        logger.warning(
            f"Pico do modo alvo mais de 60 dB abaixo do fundo na janela [{window[0]:.6g}, {window[1]:.6g}] Hz"
        )
        area = float(np.sum(np.clip(remainder, 0.0, None)) * local.df)
        return BackgroundCorrectedTemperature(
            _area_to_temperature(area, mode, center_guess),
            _area_to_temperature(raw_area, mode, center_guess),
            False, None, window,
        )

    corrected = replace(local, psd=np.clip(remainder, 0.0, None))
    fit = fit_lorentzian(corrected, window)
    temperature = temperature_from_area(fit, mode)
    uncorrected = _area_to_temperature(raw_area, mode, fit.center)
    logger.debug(f"Correção de fundo: {uncorrected:.4g} K -> {temperature:.4g} K")
    return BackgroundCorrectedTemperature(temperature, uncorrected, True, fit, window)


def observable_temperature(op: OperatingPoint, other_modes: Sequence[MechanicalMode],
                           window_fwhm: float = DEFAULT_WINDOW_FWHM) -> float:
    """
    Temperatura que um ajuste do espectro composto reportaria.

    T_eff do modo isolado mais a área do fundo dentro da janela
    Ω_eff/2π ± window_fwhm·Γ_eff/2π, convertida pela equipartição.

    Raises:
        UnstableOperatingPointError: Se Γ_eff <= 0
    """
    dyn = effective_dynamics(op)
    if not dyn.stable:
        raise UnstableOperatingPointError(
            f"temperatura observável indefinida para phi={op.phi:.4g}", gamma_eff=dyn.gamma_eff
        )
    if not other_modes:
        return dyn.t_eff

    center = dyn.omega_eff / (2 * math.pi)
    half = window_fwhm * dyn.gamma_eff / (2 * math.pi)
    window = (max(0.0, center - half), center + half)
    _check_overlap(other_modes, window)

    area = integrate.quad(
        lambda f: float(background_psd(other_modes, op.temperature_bath, f)),
        window[0], window[1], epsabs=0.0, epsrel=1e-9, limit=200,
    )[0]
    return dyn.t_eff + _area_to_temperature(area, op.mode, center)
