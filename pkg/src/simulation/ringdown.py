"""
Taxa de decaimento (ou crescimento) da envoltória de uma trajetória.
"""

from dataclasses import dataclass

import numpy as np
from scipy import signal

from src.config import GlobalConfig
from src.exceptions import FitError
from src.simulation.integrator import Trajectory

logger = GlobalConfig.get_logger('ringdown')

MIN_R_SQUARED = 0.99


@dataclass(frozen=True)
class RingdownEstimate:
    """Taxa em rad/s com sinal (positiva = decaimento, igual a Γ_eff/2)."""

    rate: float
    r_squared: float
    good_fit: bool
    n_points: int


def ringdown_rate(trajectory: Trajectory, edge_fraction: float = 0.05,
                  dynamic_range: float = 1e-4, max_points: int = 20000) -> RingdownEstimate:
    """
    Ajusta uma reta ao logaritmo da envoltória de Hilbert.

    Args:
        trajectory: Trajetória T=0 com x(0) != 0, ou segmento de crescimento instável
        edge_fraction: Fração descartada em cada borda (transientes de Hilbert)
        dynamic_range: Amostras abaixo de dynamic_range·max(envoltória) são ignoradas
        max_points: Número máximo de pontos no ajuste linear

    Returns:
        RingdownEstimate com good_fit=False se R² < 0.99

    Raises:
        FitError: Trajetória curta demais ou envoltória nula
    """
    x = np.asarray(trajectory.samples, dtype=float)
    if x.size < 100:
        raise FitError(f"trajetória curta demais para ringdown ({x.size} amostras)")

    envelope = np.abs(signal.hilbert(x))
    times = trajectory.times
    edge = int(edge_fraction * x.size)
    envelope = envelope[edge:x.size - edge]
    times = times[edge:x.size - edge]

    peak = envelope.max()
    if not np.isfinite(peak) or peak <= 0:
        raise FitError("envoltória nula: sem oscilação para ajustar")
    keep = envelope > dynamic_range * peak
    envelope = envelope[keep]
    times = times[keep]

    stride = max(1, envelope.size // max_points)
    envelope = envelope[::stride]
    times = times[::stride]
    if envelope.size < 10:
        raise FitError("pontos insuficientes acima da faixa dinâmica")

    log_env = np.log(envelope)
    slope, intercept = np.polyfit(times, log_env, 1)
    residual = log_env - (slope * times + intercept)
    total = np.sum((log_env - log_env.mean()) ** 2)
    r_squared = 1.0 - np.sum(residual ** 2) / total if total > 0 else 0.0
    r_squared = float(np.clip(r_squared, 0.0, 1.0))

    good = r_squared >= MIN_R_SQUARED
    if not good:
        logger.warning(f"Ajuste de envoltória pobre: R²={r_squared:.4f} < {MIN_R_SQUARED}")

    return RingdownEstimate(rate=float(-slope), r_squared=r_squared, good_fit=good, n_points=int(envelope.size))
