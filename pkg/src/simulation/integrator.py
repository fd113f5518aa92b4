"""
Integração estocástica da equação de movimento do ressonador.

    M·ẍ = -MΩ_m²x - MΓ_m·ẋ + F_T(t) + F_rad(histórico de x)

O oscilador e o filtro de força formam um sistema linear de quatro estados
(adimensionalizados: x, v/Ω_m, F/k, Ḟ/(kΩ_c)) com a força térmica constante
em cada passo. O mapa de um passo é construído por um de dois esquemas:

- "kick-drift" (padrão): oscilador semi-implícito (kick com a força no início
  do passo, drift com a velocidade nova) e propagação exata do filtro durante
  o passo, alimentado pela média de x entre o início e o fim do passo;
- "exact": exponencial de matriz do sistema acoplado completo.

O mapa é propagado na base modal com filtros recursivos de primeira ordem
(scipy.signal.lfilter), em blocos, com verificação de divergência por bloco.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy import signal

from src.config import GlobalConfig
from src.exceptions import SimulationConfigError
from src.model.constants import BOLTZMANN
from src.model.optomechanics import langevin_psd
from src.model.types import MechanicalMode, OperatingPoint
from src.simulation.force_filter import (
    ForceFilterRealization,
    check_time_step,
    realize_force_filter,
    zoh_discretize,
)

logger = GlobalConfig.get_logger('integrator')

SCHEMES = ("kick-drift", "exact")

STATUS_OK = "ok"
STATUS_UNSTABLE_GROWTH = "unstable growth"


@dataclass(frozen=True)
class SimConfig:
    """Parâmetros de uma simulação temporal."""

    duration: float
    dt: Optional[float] = None
    seed: int = 0
    burn_in: float = 0.0
    n_trajectories: int = 1
    initial_displacement: float = 0.0
    scheme: str = "kick-drift"

    def __post_init__(self):
        if not math.isfinite(self.duration) or self.duration <= 0:
            raise SimulationConfigError(f"duração inválida: {self.duration!r}")
        if self.dt is not None and (not math.isfinite(self.dt) or self.dt <= 0):
            raise SimulationConfigError(f"passo inválido: {self.dt!r}")
        if self.burn_in < 0 or self.burn_in >= self.duration:
            raise SimulationConfigError(f"burn_in deve estar em [0, duração): {self.burn_in!r}")
        if self.n_trajectories < 1:
            raise SimulationConfigError(f"n_trajectories deve ser >= 1: {self.n_trajectories!r}")
        if self.scheme not in SCHEMES:
            raise SimulationConfigError(f"esquema desconhecido '{self.scheme}' (use {', '.join(SCHEMES)})")

    @staticmethod
    def default_dt(op: OperatingPoint) -> float:
        """dt = 1/(40·max(Ω_m, Ω_c)/2π)."""
        samples = GlobalConfig.get_simulation_params()["samples_per_period"]
        f_max = max(op.mode.omega_m, op.cavity.omega_c) / (2 * math.pi)
        return 1.0 / (samples * f_max)

    def resolved(self, op: OperatingPoint) -> "SimConfig":
        """Cópia com dt preenchido para o ponto de operação."""
        if self.dt is not None:
            return self
        return replace(self, dt=self.default_dt(op))

    def n_samples(self) -> int:
        if self.dt is None:
            raise SimulationConfigError("dt não resolvido; use SimConfig.resolved(op)")
        return int(round(self.duration / self.dt))

    def validate_for(self, op: OperatingPoint) -> None:
        """Verifica o passo contra o polo mais rápido e avisa sobre duração curta."""
        if self.dt is None:
            raise SimulationConfigError("dt não resolvido; use SimConfig.resolved(op)")
        check_time_step(max(op.mode.omega_m, op.cavity.omega_c), self.dt)
        if self.duration < 50.0 / op.mode.gamma_m:
            logger.warning(
                f"Duração {self.duration:.3g} s < 50/Γ_m = {50.0 / op.mode.gamma_m:.3g} s: "
                f"estatística de equilíbrio não garantida"
            )


@dataclass(eq=False)
class Trajectory:
    """Série de deslocamentos (m) em passo uniforme, com a origem da simulação."""

    samples: np.ndarray
    dt: float
    op: OperatingPoint
    config: SimConfig
    trajectory_index: int = 0
    status: str = STATUS_OK

    @property
    def diverged(self) -> bool:
        return self.status == STATUS_UNSTABLE_GROWTH

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.dt

    def steady_state(self) -> np.ndarray:
        """Amostras após o burn-in."""
        start = int(round(self.config.burn_in / self.dt))
        return self.samples[start:]


def _rng(seed: int, trajectory_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trajectory_index,)))


def thermal_force_samples(mode: MechanicalMode, temperature: float, config: SimConfig,
                          trajectory_index: int = 0) -> np.ndarray:
    """
    Amostras gaussianas i.i.d. de média zero com variância S_F/dt.

    Args:
        mode: Modo mecânico
        temperature: Temperatura do banho (K)
        config: Configuração com dt resolvido
        trajectory_index: Índice da trajetória (fluxo aleatório independente)

    Returns:
        Série de forças (N) com config.n_samples() amostras
    """
    n = config.n_samples()
    s_f = langevin_psd(mode, temperature)
    if s_f == 0.0:
        return np.zeros(n)
    sigma = math.sqrt(s_f / config.dt)
    return sigma * _rng(config.seed, trajectory_index).standard_normal(n)


def _continuous_system(op: OperatingPoint, realization: ForceFilterRealization,
                       coupled: bool) -> Tuple[np.ndarray, np.ndarray]:
    omega_m = op.mode.omega_m
    size = 4 if coupled else 2
    a = np.zeros((size, size))
    a[0, 1] = omega_m
    a[1, 0] = -omega_m
    a[1, 1] = -op.mode.gamma_m
    b = np.zeros((size, 1))
    b[1, 0] = omega_m
    if coupled:
        a[1, 2] = omega_m
        a[2:, 2:] = realization.a
        a[3, 0] = realization.b[1, 0]
    return a, b


def _kick_drift_map(op: OperatingPoint, realization: ForceFilterRealization, dt: float,
                    coupled: bool) -> Tuple[np.ndarray, np.ndarray]:
    omega_m = op.mode.omega_m
    gamma_m = op.mode.gamma_m
    size = 4 if coupled else 2
    ad = np.zeros((size, size))
    bd = np.zeros((size, 1))

    # kick: velocidade com a força do início do passo
    kick = np.zeros(size)
    kick[0] = -dt * omega_m
    kick[1] = 1.0 - dt * gamma_m
    if coupled:
        kick[2] = dt * omega_m
    ad[1] = kick
    bd[1, 0] = dt * omega_m

    # drift: posição com a velocidade nova
    drift = dt * omega_m * kick
    drift[0] += 1.0
    ad[0] = drift
    bd[0, 0] = dt * omega_m * bd[1, 0]

    if coupled:
        # filtro: x médio do passo, (x[n] + x[n+1])/2, com x[n+1] da linha de drift
        feed = 0.5 * realization.bd[:, 0]
        ad[2:, 2:] = realization.ad
        ad[2:, :] += np.outer(feed, ad[0])
        ad[2:, 0] += feed
        bd[2:, 0] = feed * bd[0, 0]
    return ad, bd


class ModalPropagator:
    """Propaga z[n+1] = Ad·z[n] + Bd·u[n] na base de autovetores de Ad."""

    def __init__(self, ad: np.ndarray, bd: np.ndarray, z0: np.ndarray):
        eigenvalues, vectors = np.linalg.eig(ad)
        inverse = np.linalg.inv(vectors)
        self.eigenvalues = eigenvalues
        self.beta = inverse @ bd[:, 0]
        self.output = vectors[0, :]
        self.q = inverse @ z0.astype(complex)

    def propagate(self, u: np.ndarray) -> np.ndarray:
        """Devolve x[n] para o bloco e avança o estado modal."""
        x = np.zeros(u.size, dtype=complex)
        for i, lam in enumerate(self.eigenvalues):
            y, _ = signal.lfilter([self.beta[i]], [1.0, -lam], u, zi=np.array([lam * self.q[i]]))
            x[0] += self.output[i] * self.q[i]
            x[1:] += self.output[i] * y[:-1]
            self.q[i] = y[-1]
        return x.real


def build_step_map(op: OperatingPoint, dt: float, scheme: str = "kick-drift"):
    """
    Mapa de um passo (Ad, Bd) do sistema acoplado em estados adimensionais.

    Sem acoplamento (φ = 0 ou P = 0) o filtro é omitido e o sistema tem dois estados.
    """
    realization = realize_force_filter(op, dt)
    coupled = bool(np.any(realization.b))
    if scheme == "exact":
        a, b = _continuous_system(op, realization, coupled)
        ad, bd = zoh_discretize(a, b, dt)
    elif scheme == "kick-drift":
        ad, bd = _kick_drift_map(op, realization, dt, coupled)
    else:
        raise SimulationConfigError(f"esquema desconhecido '{scheme}'")
    return ad, bd


def integrate(op: OperatingPoint, config: SimConfig, trajectory_index: int = 0) -> Trajectory:
    """
    Integra uma trajetória do ressonador sob força térmica e pressão de radiação.

    Args:
        op: Ponto de operação
        config: Configuração da simulação
        trajectory_index: Índice da trajetória no ensemble

    Returns:
        Trajectory; status "unstable growth" com a trajetória parcial se
        |x| ultrapassar 1e6 vezes a amplitude rms térmica
    """
    cfg = config.resolved(op)
    cfg.validate_for(op)
    dt = cfg.dt
    n = cfg.n_samples()
    k = op.mode.spring_constant

    if op.temperature_bath == 0 and cfg.initial_displacement == 0:
        return Trajectory(np.zeros(n), dt, op, cfg, trajectory_index)

    params = GlobalConfig.get_simulation_params()
    thermal_rms = math.sqrt(BOLTZMANN * op.temperature_bath / k)
    guard = params["divergence_factor"] * max(thermal_rms, abs(cfg.initial_displacement))

    ad, bd = build_step_map(op, dt, cfg.scheme)
    z0 = np.zeros(ad.shape[0])
    z0[0] = cfg.initial_displacement
    propagator = ModalPropagator(ad, bd, z0)

    u = thermal_force_samples(op.mode, op.temperature_bath, cfg, trajectory_index) / k
    samples = np.empty(n)
    chunk = params["chunk_size"]
    status = STATUS_OK
    filled = n
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        block = propagator.propagate(u[start:stop])
        over = np.flatnonzero(np.abs(block) > guard)
        if over.size:
            end = start + over[0] + 1
            samples[start:end] = block[:over[0] + 1]
            filled = end
            status = STATUS_UNSTABLE_GROWTH
            logger.warning(
                f"Crescimento instável detectado em t={end * dt:.4g} s "
                f"(phi={op.phi:.4g}, trajetória {trajectory_index})"
            )
            break
        samples[start:stop] = block

    logger.debug(f"Trajetória {trajectory_index} integrada: {filled} amostras, esquema {cfg.scheme}")
    return Trajectory(samples[:filled], dt, op, cfg, trajectory_index, status)


def _integrate_indexed(args) -> Trajectory:
    op, config, index = args
    return integrate(op, config, index)


def run_ensemble(op: OperatingPoint, config: SimConfig, workers: Optional[int] = None) -> List[Trajectory]:
    """
    Integra config.n_trajectories trajetórias independentes.

    Cada trajetória tem seu próprio fluxo aleatório derivado da semente;
    a ordem do resultado segue o índice, independente do número de workers.
    """
    cfg = config.resolved(op)
    jobs = [(op, cfg, index) for index in range(cfg.n_trajectories)]
    n_workers = min(GlobalConfig.get_workers(workers), len(jobs))
    if n_workers <= 1:
        return [_integrate_indexed(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(_integrate_indexed, jobs))


def ensemble_variance(trajectories: List[Trajectory]) -> float:
    """Média das variâncias pós-burn-in (redutor independente da ordem de chegada)."""
    ordered = sorted(trajectories, key=lambda t: t.trajectory_index)
    variances = [float(np.var(t.steady_state())) for t in ordered]
    return float(np.mean(variances))


def ensemble_temperature(trajectories: List[Trajectory], omega_eff: float) -> float:
    """Temperatura por equipartição: M·Ω_eff²·<x²>/k_B."""
    mode = trajectories[0].op.mode
    return mode.mass * omega_eff ** 2 * ensemble_variance(trajectories) / BOLTZMANN
