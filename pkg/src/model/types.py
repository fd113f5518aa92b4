"""
Tipos do domínio: modo mecânico, cavidade, ponto de operação e dinâmica efetiva.

Convenções:
- SI em todo o núcleo; frequências angulares internamente (rad/s).
- Dessintonia normalizada phi > 0 é o lado de ligação/aquecimento do modo de 814 kHz.
- Convenção de Fourier e^{-iΩt}: Δ = (1 - iΩ/Ω_c)² + φ² tem polos estáveis
  em Ω_c(-1 ± iφ) apenas nesta convenção.
"""

import math
import numbers
from dataclasses import dataclass, field
from typing import Optional

from src.exceptions import ValidationError
from src.model.constants import SPEED_OF_LIGHT


def _require_finite_positive(name: str, value: float) -> None:
    if not isinstance(value, numbers.Real) or not math.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} deve ser finito e > 0 (recebido {value!r})")


@dataclass(frozen=True)
class MechanicalMode:
    """Um modo de vibração do micro-ressonador (oscilador harmônico único)."""

    omega_m: float
    mass: float
    q_factor: float
    name: str = ""
    gamma_m: float = field(init=False)

    def __post_init__(self):
        _require_finite_positive("omega_m", self.omega_m)
        _require_finite_positive("mass", self.mass)
        if not math.isfinite(self.q_factor) or self.q_factor < 1:
            raise ValidationError(f"q_factor deve ser >= 1 (recebido {self.q_factor!r})")
        object.__setattr__(self, "gamma_m", self.omega_m / self.q_factor)
        k = self.spring_constant
        if not math.isfinite(k) or k <= 0:
            raise ValidationError(f"constante de mola inválida: {k!r}")

    @classmethod
    def from_frequency_hz(cls, frequency_hz: float, mass: float, q_factor: float, name: str = "") -> "MechanicalMode":
        """Cria o modo a partir da frequência em Hz."""
        _require_finite_positive("frequency_hz", frequency_hz)
        return cls(omega_m=2 * math.pi * frequency_hz, mass=mass, q_factor=q_factor, name=name)

    @property
    def spring_constant(self) -> float:
        """k = M·Ω_m² (N/m)."""
        return self.mass * self.omega_m ** 2

    @property
    def frequency_hz(self) -> float:
        return self.omega_m / (2 * math.pi)

    @property
    def linewidth_hz(self) -> float:
        return self.gamma_m / (2 * math.pi)


def cavity_bandwidth_from_length(length: float, finesse: float) -> float:
    """
    Largura de banda da cavidade Ω_c = c·γ/(2L) com γ = π/F.

    Args:
        length: Comprimento da cavidade (m)
        finesse: Finesse adimensional

    Returns:
        Ω_c em rad/s
    """
    _require_finite_positive("length", length)
    _require_finite_positive("finesse", finesse)
    return SPEED_OF_LIGHT * (math.pi / finesse) / (2 * length)


@dataclass(frozen=True)
class CavitySetup:
    """Parâmetros da cavidade óptica e do acoplamento de entrada."""

    wavelength: float
    length: float
    finesse: float
    omega_c: float
    coupling_slope: float
    gamma: float = field(init=False)

    def __post_init__(self):
        for name in ("wavelength", "length", "finesse", "omega_c", "coupling_slope"):
            _require_finite_positive(name, getattr(self, name))
        object.__setattr__(self, "gamma", math.pi / self.finesse)

    @classmethod
    def from_bandwidth_hz(cls, wavelength: float, length: float, finesse: float,
                          bandwidth_hz: float, coupling_slope: float) -> "CavitySetup":
        _require_finite_positive("bandwidth_hz", bandwidth_hz)
        return cls(wavelength=wavelength, length=length, finesse=finesse,
                   omega_c=2 * math.pi * bandwidth_hz, coupling_slope=coupling_slope)

    @property
    def bandwidth_hz(self) -> float:
        return self.omega_c / (2 * math.pi)

    def length_consistency(self) -> float:
        """Razão entre Ω_c declarado e c·γ/(2L); 1 quando coerentes."""
        return self.omega_c / cavity_bandwidth_from_length(self.length, self.finesse)


@dataclass(frozen=True)
class OperatingPoint:
    """
    Ponto de operação que fixa a dinâmica linearizada.

    p_res é a potência intracavidade na ressonância; a potência efetiva no
    ponto de dessintonia segue o pico de Airy lorentziano p_res/(1+φ²).
    """

    mode: MechanicalMode
    cavity: CavitySetup
    phi: float
    p_res: float
    temperature_bath: float = 300.0

    def __post_init__(self):
        if not math.isfinite(self.phi):
            raise ValidationError(f"phi deve ser finito (recebido {self.phi!r})")
        if not math.isfinite(self.p_res) or self.p_res < 0:
            raise ValidationError(f"p_res deve ser >= 0 (recebido {self.p_res!r})")
        if not math.isfinite(self.temperature_bath) or self.temperature_bath < 0:
            raise ValidationError(f"temperature_bath deve ser >= 0 (recebido {self.temperature_bath!r})")

    @classmethod
    def from_incident_power(cls, mode: MechanicalMode, cavity: CavitySetup, phi: float,
                            p_in: float, temperature_bath: float = 300.0) -> "OperatingPoint":
        """Potência incidente convertida pela inclinação de acoplamento."""
        return cls(mode, cavity, phi, cavity.coupling_slope * p_in, temperature_bath)

    @classmethod
    def from_intracavity_power(cls, mode: MechanicalMode, cavity: CavitySetup, phi: float,
                               p_cavity: float, temperature_bath: float = 300.0) -> "OperatingPoint":
        """Potência intracavidade efetiva no ponto φ (não na ressonância)."""
        return cls(mode, cavity, phi, p_cavity * (1.0 + phi ** 2), temperature_bath)

    @property
    def intracavity_power(self) -> float:
        return self.p_res / (1.0 + self.phi ** 2)


@dataclass(frozen=True)
class EffectiveDynamics:
    """
    Frequência e amortecimento efetivos.

    t_eff é a temperatura pela largura de linha (T·Γ_m/Γ_eff), None se instável.
    t_eff_area é a temperatura pela área do espectro, preenchida fora do
    regime de pequeno deslocamento de frequência.
    """

    omega_eff: float
    gamma_eff: float
    t_eff: Optional[float]
    stable: bool
    omega_m: float
    gamma_m: float
    small_shift: bool = True
    t_eff_area: Optional[float] = None

    @property
    def damping_ratio(self) -> float:
        return self.gamma_eff / self.gamma_m

    @property
    def frequency_shift_hz(self) -> float:
        return (self.omega_eff - self.omega_m) / (2 * math.pi)
