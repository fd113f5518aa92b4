"""
Física em forma fechada no domínio da frequência.

Suscetibilidades, resposta da cavidade, força de pressão de radiação
linearizada, dinâmica efetiva, espectros de deslocamento e limiar de
instabilidade. Todas as funções são puras e aceitam Ω escalar ou array.

Convenção de PSD: bilateral, com <F²> = ∫ S_F df sobre f ∈ (-∞, ∞).
"""

import math
from typing import Optional, Union

import numpy as np
from scipy import integrate

from src.config import GlobalConfig
from src.exceptions import UnstableOperatingPointError, ValidationError
from src.model.constants import (
    BOLTZMANN,
    SMALL_SHIFT_LIMIT,
    SPEED_OF_LIGHT,
    TEMPERATURE_DISCREPANCY_LIMIT,
)
from src.model.types import CavitySetup, EffectiveDynamics, MechanicalMode, OperatingPoint

logger = GlobalConfig.get_logger('optomechanics')

FrequencyLike = Union[float, np.ndarray]


def _restore_scalar(value: np.ndarray, like: FrequencyLike):
    """Devolve escalar quando a entrada era escalar."""
    if np.ndim(like) == 0:
        return value.item()
    return value


def mech_susceptibility(mode: MechanicalMode, omega: FrequencyLike):
    """
    Suscetibilidade mecânica χ_m = 1/(M(Ω_m² - Ω² - iΓ_mΩ)) em m/N.

    Args:
        mode: Modo mecânico
        omega: Frequência angular (rad/s), escalar ou array

    Returns:
        Resposta complexa com o mesmo formato de omega
    """
    w = np.asarray(omega, dtype=float)
    chi = 1.0 / (mode.mass * (mode.omega_m ** 2 - w ** 2 - 1j * mode.gamma_m * w))
    return _restore_scalar(chi, omega)


def cavity_delta(cavity: CavitySetup, phi: float, omega: FrequencyLike):
    """Resposta da cavidade Δ = (1 - iΩ/Ω_c)² + φ² (adimensional)."""
    w = np.asarray(omega, dtype=float)
    delta = (1.0 - 1j * w / cavity.omega_c) ** 2 + phi ** 2
    return _restore_scalar(np.asarray(delta, dtype=complex), omega)


def nonlinear_phase(cavity: CavitySetup, mode: MechanicalMode, p_intracavity: float) -> float:
    """
    Defasagem não linear φ_NL = 8πP/(λγcMΩ_m²).

    Args:
        cavity: Cavidade óptica
        mode: Modo mecânico
        p_intracavity: Potência intracavidade (W)

    Returns:
        φ_NL adimensional

    Raises:
        ValidationError: Se a potência for negativa
    """
    if p_intracavity < 0:
        raise ValidationError(f"potência intracavidade negativa: {p_intracavity!r}")
    return 8 * math.pi * p_intracavity / (
        cavity.wavelength * cavity.gamma * SPEED_OF_LIGHT * mode.spring_constant
    )


def intracavity_power(op: OperatingPoint) -> float:
    """Potência intracavidade no pico de Airy lorentziano: p_res/(1+φ²)."""
    return op.intracavity_power


def _coupling(op: OperatingPoint) -> float:
    """Produto φ·φ_NL no ponto de operação."""
    return op.phi * nonlinear_phase(op.cavity, op.mode, op.intracavity_power)


def radiation_force_transfer(op: OperatingPoint, omega: FrequencyLike):
    """
    Função de transferência H(Ω) = -2φφ_NL·MΩ_m²/Δ(Ω), tal que F_rad = H·x (N/m).
    """
    w = np.asarray(omega, dtype=float)
    delta = np.asarray(cavity_delta(op.cavity, op.phi, w), dtype=complex)
    h = -2.0 * _coupling(op) * op.mode.spring_constant / delta
    return _restore_scalar(np.asarray(h, dtype=complex), omega)


def effective_susceptibility(op: OperatingPoint, omega: FrequencyLike):
    """
    Suscetibilidade efetiva com χ_eff⁻¹ = χ_m⁻¹ + 2(φφ_NL/Δ)MΩ_m².

    Calculada como χ_m/(1 + χ_m·c) para que o caso sem acoplamento
    devolva χ_m exatamente.
    """
    w = np.asarray(omega, dtype=float)
    chi_m = np.asarray(mech_susceptibility(op.mode, w), dtype=complex)
    coupling = _coupling(op)
    if coupling == 0.0:
        return _restore_scalar(chi_m, omega)
    delta = np.asarray(cavity_delta(op.cavity, op.phi, w), dtype=complex)
    stiffness = 2.0 * coupling * op.mode.spring_constant / delta
    return _restore_scalar(chi_m / (1.0 + chi_m * stiffness), omega)


def _linewidth_dynamics(op: OperatingPoint):
    """Ω_eff e Γ_eff com Δ avaliado em Ω_m."""
    mode = op.mode
    delta = cavity_delta(op.cavity, op.phi, mode.omega_m)
    ratio = _coupling(op) / delta
    omega_eff = mode.omega_m * (1.0 + ratio.real)
    gamma_eff = mode.gamma_m * (1.0 - 2.0 * mode.q_factor * ratio.imag)
    return omega_eff, gamma_eff


def effective_dynamics(op: OperatingPoint, area_check: bool = True) -> EffectiveDynamics:
    """
    Frequência, amortecimento e temperatura efetivos do modo.

    Fora do regime de pequeno deslocamento de frequência (e com area_check) calcula a
    temperatura pela área do espectro e registra um aviso quando as duas
    rotas divergem mais que 2%.

    Args:
        op: Ponto de operação
        area_check: Se False, pula a integração numérica da área (varreduras de grade)

    Returns:
        EffectiveDynamics; instável (stable=False, t_eff=None) se Γ_eff <= 0
    """
    mode = op.mode
    omega_eff, gamma_eff = _linewidth_dynamics(op)
    stable = gamma_eff > 0
    small_shift = abs(omega_eff - mode.omega_m) / mode.omega_m < SMALL_SHIFT_LIMIT

    if not stable:
        logger.debug(f"Ponto instável: phi={op.phi:.4g}, P={op.intracavity_power:.4g} W, Γ_eff={gamma_eff:.4g}")
        return EffectiveDynamics(omega_eff, gamma_eff, None, False, mode.omega_m, mode.gamma_m, small_shift)

    t_eff = op.temperature_bath * mode.gamma_m / gamma_eff
    t_eff_area = None
    if area_check and not small_shift:
        t_eff_area = area_temperature(op)
        if t_eff > 0 and abs(t_eff_area - t_eff) / t_eff > TEMPERATURE_DISCREPANCY_LIMIT:
            logger.warning(
                f"Temperaturas divergentes fora do regime de pequeno deslocamento: "
                f"largura={t_eff:.4g} K, área={t_eff_area:.4g} K (phi={op.phi:.4g})"
            )

    return EffectiveDynamics(omega_eff, gamma_eff, t_eff, True, mode.omega_m, mode.gamma_m,
                             small_shift, t_eff_area)


def langevin_psd(mode: MechanicalMode, temperature: float) -> float:
    """
    Densidade espectral bilateral da força de Langevin S_F = 2k_B·T·M·Γ_m (N²/Hz).
    """
    if temperature < 0:
        raise ValidationError(f"temperatura negativa: {temperature!r}")
    return 2.0 * BOLTZMANN * temperature * mode.mass * mode.gamma_m


def _require_stable(op: OperatingPoint) -> float:
    omega_eff, gamma_eff = _linewidth_dynamics(op)
    if gamma_eff <= 0:
        raise UnstableOperatingPointError(
            f"ponto instável (phi={op.phi:.4g}, Γ_eff={gamma_eff:.4g} rad/s): espectro de equilíbrio indefinido",
            gamma_eff=gamma_eff,
        )
    return omega_eff


def displacement_psd(op: OperatingPoint, omega: FrequencyLike):
    """
    PSD bilateral de deslocamento S_x(Ω) = |χ_eff(Ω)|²·S_F(T) em m²/Hz.

    Raises:
        UnstableOperatingPointError: Se Γ_eff <= 0
    """
    _require_stable(op)
    chi = np.asarray(effective_susceptibility(op, omega), dtype=complex)
    psd = np.abs(chi) ** 2 * langevin_psd(op.mode, op.temperature_bath)
    return _restore_scalar(psd, omega)


def displacement_variance(op: OperatingPoint) -> float:
    """
    <x²> integrando S_x sobre Ω ∈ (-∞, ∞) com medida dΩ/2π.

    Quadratura adaptativa em três trechos em torno da ressonância efetiva.
    """
    omega_eff = _require_stable(op)
    if langevin_psd(op.mode, op.temperature_bath) == 0.0:
        return 0.0

    _, gamma_eff = _linewidth_dynamics(op)
    width = max(gamma_eff, op.mode.gamma_m)
    scale = displacement_psd(op, omega_eff)

    def integrand(w):
        return displacement_psd(op, w) / scale

    lo = max(0.0, omega_eff - 200.0 * width)
    hi = omega_eff + 200.0 * width
    total = 0.0
    if lo > 0:
        total += integrate.quad(integrand, 0.0, lo, epsabs=0.0, epsrel=1e-10, limit=500)[0]
    total += integrate.quad(integrand, lo, hi, points=[omega_eff], epsabs=0.0, epsrel=1e-10, limit=500)[0]
    total += integrate.quad(integrand, hi, np.inf, epsabs=0.0, epsrel=1e-10, limit=500)[0]

    # Integrando par em Ω: (1/2π)·2·∫_0^∞
    return total * scale / math.pi


def area_temperature(op: OperatingPoint) -> float:
    """Temperatura pela equipartição: M·Ω_eff²·<x²>/k_B."""
    omega_eff = _require_stable(op)
    return op.mode.mass * omega_eff ** 2 * displacement_variance(op) / BOLTZMANN


def instability_threshold(mode: MechanicalMode, cavity: CavitySetup, phi: float) -> Optional[float]:
    """
    Potência intracavidade (no ponto φ) em que Γ_eff se anula.

    Inverte a dependência linear de φ_NL com P. Só existe se φ·Im(1/Δ(Ω_m)) > 0;
    caso contrário essa dessintonia apenas resfria o modo e o resultado é None.

    Args:
        mode: Modo mecânico
        cavity: Cavidade óptica
        phi: Dessintonia normalizada (diferente de zero)

    Returns:
        Potência limiar em W, ou None

    Raises:
        ValidationError: Se phi == 0
    """
    if phi == 0:
        raise ValidationError("limiar de instabilidade indefinido para phi = 0")

    inverse_delta = 1.0 / cavity_delta(cavity, phi, mode.omega_m)
    drive = phi * inverse_delta.imag
    if drive <= 0:
        return None

    phi_nl_threshold = 1.0 / (2.0 * mode.q_factor * drive)
    return phi_nl_threshold / nonlinear_phase(cavity, mode, 1.0)


def threshold_incident_power(mode: MechanicalMode, cavity: CavitySetup, phi: float) -> Optional[float]:
    """Limiar convertido em potência incidente (Airy + inclinação de acoplamento)."""
    p_threshold = instability_threshold(mode, cavity, phi)
    if p_threshold is None:
        return None
    return p_threshold * (1.0 + phi ** 2) / cavity.coupling_slope
