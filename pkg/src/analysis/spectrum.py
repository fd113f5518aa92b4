"""
Espectros de ruído de deslocamento: tipo imutável, estimador de Welch e
espectros em forma fechada.

Arquivos e objetos NoiseSpectrum usam a convenção unilateral
(f >= 0, psd = 2·S_x bilateral), de modo que Σ psd·df = <x²>.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, Optional, Union

import numpy as np
from scipy import signal

from src.config import GlobalConfig
from src.exceptions import ValidationError
from src.model.optomechanics import displacement_psd, effective_dynamics
from src.model.types import OperatingPoint
from src.simulation.integrator import Trajectory

logger = GlobalConfig.get_logger('spectrum')

PROVENANCES = ("closed-form", "simulated", "ingested")
ONE_SIDED_FACTOR = 2.0
GRID_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class NoiseSpectrum:
    """PSD unilateral de deslocamento (m²/Hz) numa grade uniforme (Hz)."""

    freqs: np.ndarray
    psd: np.ndarray
    provenance: str
    resolution_bw: float
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        psd = np.asarray(self.psd, dtype=float)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "psd", psd)

        if self.provenance not in PROVENANCES:
            raise ValidationError(f"proveniência desconhecida '{self.provenance}'")
        if freqs.ndim != 1 or freqs.shape != psd.shape:
            raise ValidationError("freqs e psd devem ser vetores do mesmo tamanho")
        if freqs.size < 2:
            raise ValidationError("espectro precisa de pelo menos dois pontos")
        if not (np.all(np.isfinite(psd)) and np.all(psd >= 0)):
            raise ValidationError("psd deve ser finita e >= 0")
        steps = np.diff(freqs)
        if np.any(steps <= 0):
            raise ValidationError("grade de frequência deve ser crescente")
        mean_step = (freqs[-1] - freqs[0]) / (freqs.size - 1)
        if np.max(np.abs(steps - mean_step)) > GRID_TOLERANCE * max(mean_step, abs(freqs[-1])):
            raise ValidationError("grade de frequência não uniforme")
        if not math.isfinite(self.resolution_bw) or self.resolution_bw <= 0:
            raise ValidationError(f"resolution_bw inválida: {self.resolution_bw!r}")

    @property
    def df(self) -> float:
        return float((self.freqs[-1] - self.freqs[0]) / (self.freqs.size - 1))

    def variance(self) -> float:
        """Integral da PSD (m²)."""
        return float(np.sum(self.psd) * self.df)

    def window(self, f_lo: float, f_hi: float) -> "NoiseSpectrum":
        """Sub-espectro com f_lo <= f <= f_hi."""
        mask = (self.freqs >= f_lo) & (self.freqs <= f_hi)
        if np.count_nonzero(mask) < 2:
            raise ValidationError(f"janela [{f_lo:.6g}, {f_hi:.6g}] Hz com menos de dois pontos")
        return replace(self, freqs=self.freqs[mask], psd=self.psd[mask])

    def scaled(self, factor: float) -> "NoiseSpectrum":
        return replace(self, psd=self.psd * factor)

    def peak_frequency(self) -> float:
        return float(self.freqs[int(np.argmax(self.psd))])


def welch_psd_samples(samples: np.ndarray, dt: float, segment_len: Optional[int] = None,
                      overlap: float = 0.5, metadata: Optional[Dict[str, Any]] = None) -> NoiseSpectrum:
    """
    Periodograma médio de Welch com janela de Hann, unilateral.

    Args:
        samples: Série de deslocamentos (m)
        dt: Passo de amostragem (s)
        segment_len: Amostras por segmento (padrão: min(n, 2**16))
        overlap: Fração de sobreposição em [0, 0.9]
        metadata: Metadados anexados ao espectro

    Returns:
        NoiseSpectrum com proveniência "simulated"

    Raises:
        ValidationError: Série curta demais ou parâmetros fora de faixa
    """
    x = np.asarray(samples, dtype=float)
    if segment_len is None:
        segment_len = min(x.size, 1 << 16)
    if segment_len < 8:
        raise ValidationError(f"segmento curto demais: {segment_len}")
    if x.size < segment_len:
        raise ValidationError(f"série com {x.size} amostras menor que o segmento ({segment_len})")
    if not 0.0 <= overlap <= 0.9:
        raise ValidationError(f"sobreposição fora de [0, 0.9]: {overlap!r}")

    freqs, psd = signal.welch(
        x, fs=1.0 / dt, window="hann", nperseg=segment_len,
        noverlap=int(overlap * segment_len), detrend="constant",
        return_onesided=True, scaling="density",
    )
    df = freqs[1] - freqs[0]
    logger.debug(f"Welch: {x.size} amostras, segmento {segment_len}, df={df:.4g} Hz")
    return NoiseSpectrum(freqs, psd, "simulated", df, dict(metadata or {}))


def welch_psd(trajectory: Trajectory, segment_len: Optional[int] = None, overlap: float = 0.5) -> NoiseSpectrum:
    """Welch sobre a parte pós-burn-in de uma trajetória."""
    metadata = {
        "phi": trajectory.op.phi,
        "p_res_w": trajectory.op.p_res,
        "seed": trajectory.config.seed,
        "trajectory_index": trajectory.trajectory_index,
    }
    return welch_psd_samples(trajectory.steady_state(), trajectory.dt, segment_len, overlap, metadata)


def average_spectra(spectra: Iterable[NoiseSpectrum]) -> NoiseSpectrum:
    """Média de espectros na mesma grade (ex.: ensemble de trajetórias)."""
    spectra = list(spectra)
    if not spectra:
        raise ValidationError("nenhum espectro para média")
    first = spectra[0]
    for other in spectra[1:]:
        if other.freqs.shape != first.freqs.shape or not np.allclose(other.freqs, first.freqs, rtol=GRID_TOLERANCE):
            raise ValidationError("espectros com grades diferentes")
    psd = np.mean([s.psd for s in spectra], axis=0)
    metadata = dict(first.metadata)
    metadata["averaged"] = len(spectra)
    return replace(first, psd=psd, metadata=metadata)


def default_frequency_grid(op: OperatingPoint, half_width_fwhm: float = 40.0, n_points: int = 4001) -> np.ndarray:
    """Grade uniforme centrada em Ω_eff/2π cobrindo ±half_width_fwhm larguras efetivas."""
    dyn = effective_dynamics(op)
    center = dyn.omega_eff / (2 * math.pi)
    width = abs(dyn.gamma_eff) / (2 * math.pi)
    lo = max(0.0, center - half_width_fwhm * width)
    return np.linspace(lo, center + half_width_fwhm * width, n_points)


def closed_form_spectrum(op: OperatingPoint, freqs: Union[np.ndarray, None] = None) -> NoiseSpectrum:
    """
    Espectro unilateral 2·S_x(2πf) do modelo fechado.

    Raises:
        UnstableOperatingPointError: Se Γ_eff <= 0
    """
    grid = default_frequency_grid(op) if freqs is None else np.asarray(freqs, dtype=float)
    psd = ONE_SIDED_FACTOR * np.asarray(displacement_psd(op, 2 * math.pi * grid), dtype=float)
    df = (grid[-1] - grid[0]) / (grid.size - 1)
    metadata = {"phi": op.phi, "p_res_w": op.p_res, "temperature_k": op.temperature_bath}
    if op.mode.name:
        metadata["mode"] = op.mode.name
    return NoiseSpectrum(grid, psd, "closed-form", df, metadata)
