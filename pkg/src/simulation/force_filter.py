"""
Realização temporal causal da força de pressão de radiação linearizada.

Forma canônica de segunda ordem com estados adimensionais
ξ = [F/k, Ḟ/(k·Ω_c)] e entrada x:

    dξ₁/dt = Ω_c·ξ₂
    dξ₂/dt = -Ω_c(1+φ²)·ξ₁ - 2Ω_c·ξ₂ - 2φφ_NL·Ω_c·x
    F      = k·ξ₁

Polos contínuos em Ω_c(-1 ± iφ). Na convenção e^{-iΩt} (s = -iΩ) a resposta
em frequência coincide com -2φφ_NL·MΩ_m²/Δ(Ω). A discretização usa a
exponencial de matriz com x constante em cada passo.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, signal

from src.config import GlobalConfig
from src.exceptions import SimulationConfigError
from src.model.optomechanics import nonlinear_phase
from src.model.types import OperatingPoint

logger = GlobalConfig.get_logger('force_filter')


def zoh_discretize(a: np.ndarray, b: np.ndarray, dt: float):
    """
    Discretiza (A, B) com segurador de ordem zero pela exponencial da matriz aumentada.

    Args:
        a: Matriz de estado contínua (n×n)
        b: Matriz de entrada contínua (n×m)
        dt: Passo de tempo (s)

    Returns:
        Tupla (Ad, Bd)
    """
    n = a.shape[0]
    m = b.shape[1]
    block = np.zeros((n + m, n + m))
    block[:n, :n] = a
    block[:n, n:] = b
    expo = linalg.expm(block * dt)
    return expo[:n, :n], expo[:n, n:]


def check_time_step(omega_max: float, dt: float, max_fraction: float = None) -> None:
    """Rejeita passos com menos de 20 amostras por período mais rápido."""
    if max_fraction is None:
        max_fraction = GlobalConfig.get_simulation_params()["max_step_fraction"]
    if not math.isfinite(dt) or dt <= 0:
        raise SimulationConfigError(f"passo de tempo inválido: {dt!r}")
    fraction = dt * omega_max / (2 * math.pi)
    if fraction > max_fraction:
        raise SimulationConfigError(
            f"dt={dt:.3g} s grosseiro demais: dt·Ω/2π = {fraction:.3g} > {max_fraction}"
        )


@dataclass(eq=False)
class ForceFilterRealization:
    """Filtro de dois polos que produz F_rad a partir do histórico de x."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    dt: float
    ad: np.ndarray
    bd: np.ndarray
    phi: float
    omega_c: float
    state: np.ndarray = field(default_factory=lambda: np.zeros(2))

    @property
    def poles(self) -> np.ndarray:
        """Polos contínuos (rad/s)."""
        return np.linalg.eigvals(self.a)

    @property
    def dc_gain(self) -> float:
        """Ganho estático do filtro discreto, igual ao contínuo pelo segurador."""
        return float((self.c @ np.linalg.solve(np.eye(2) - self.ad, self.bd)).item())

    def frequency_response(self, omega) -> np.ndarray:
        """C(sI - A)⁻¹B em s = -iΩ (N/m)."""
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.empty(w.shape, dtype=complex)
        eye = np.eye(2)
        for idx, value in enumerate(w):
            out[idx] = (self.c @ np.linalg.solve(-1j * value * eye - self.a, self.b)).item()
        return out if np.ndim(omega) else out[0]

    def discrete_frequency_response(self, omega) -> np.ndarray:
        """C(ρI - Ad)⁻¹Bd em ρ = e^{-iΩdt} (N/m)."""
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.empty(w.shape, dtype=complex)
        eye = np.eye(2)
        for idx, value in enumerate(w):
            rho = np.exp(-1j * value * self.dt)
            out[idx] = (self.c @ np.linalg.solve(rho * eye - self.ad, self.bd)).item()
        return out if np.ndim(omega) else out[0]

    def step(self, x: float) -> float:
        """
        Avança um passo com x constante e devolve a força no início do passo.
        """
        force = float(self.c @ self.state)
        self.state = self.ad @ self.state + self.bd[:, 0] * x
        return force

    def apply(self, x: np.ndarray) -> np.ndarray:
        """
        Filtra uma série completa de deslocamentos (estado inicial nulo).

        Mesma convenção de step: F[n] depende de x[0..n-1].
        """
        x = np.asarray(x, dtype=float)
        if not np.any(self.bd):
            return np.zeros_like(x)
        num, den = signal.ss2tf(self.ad, self.bd, self.c, np.zeros((1, 1)))
        return signal.lfilter(num[0], den, x)


def realize_force_filter(op: OperatingPoint, dt: float) -> ForceFilterRealization:
    """
    Constrói o filtro causal equivalente à força de pressão de radiação.

    Args:
        op: Ponto de operação
        dt: Passo de tempo (s)

    Returns:
        ForceFilterRealization com matrizes contínuas e discretas

    Raises:
        SimulationConfigError: Se dt for grosseiro demais para Ω_c
    """
    omega_c = op.cavity.omega_c
    check_time_step(max(op.mode.omega_m, omega_c), dt)

    coupling = op.phi * nonlinear_phase(op.cavity, op.mode, op.intracavity_power)
    a = np.array([
        [0.0, omega_c],
        [-omega_c * (1.0 + op.phi ** 2), -2.0 * omega_c],
    ])
    b = np.array([[0.0], [-2.0 * coupling * omega_c]])
    c = np.array([[op.mode.spring_constant, 0.0]])
    ad, bd = zoh_discretize(a, b, dt)

    logger.debug(f"Filtro realizado: phi={op.phi:.4g}, φφ_NL={coupling:.4g}, dt={dt:.3g} s")
    return ForceFilterRealization(a=a, b=b, c=c, dt=dt, ad=ad, bd=bd, phi=op.phi, omega_c=omega_c)
