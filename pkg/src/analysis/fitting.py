"""
Ajuste lorentziano de picos de ruído térmico.

    L(f) = background + (area/π)·(fwhm/2)/((f - center)² + (fwhm/2)²)
"""

import math
import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import ndimage, optimize

from src.config import GlobalConfig
from src.exceptions import FitError
from src.analysis.spectrum import NoiseSpectrum

logger = GlobalConfig.get_logger('fitting')

DEFAULT_WINDOW_FWHM = 20.0
MIN_POINTS = 8
MULTI_PEAK_RESIDUAL = 0.25


def lorentzian(f, center: float, fwhm: float, area: float, background: float):
    half = fwhm / 2.0
    return background + (area / math.pi) * half / ((f - center) ** 2 + half ** 2)


@dataclass(frozen=True)
class LorentzianFit:
    center: float
    fwhm: float
    area: float
    background: float
    goodness: float
    multi_peak_suspect: bool = False
    n_points: int = 0

    def __post_init__(self):
        if not (self.fwhm > 0 and self.area > 0):
            raise FitError(f"ajuste degenerado: fwhm={self.fwhm!r}, area={self.area!r}")
        if not 0.0 <= self.goodness <= 1.0:
            raise FitError(f"goodness fora de [0, 1]: {self.goodness!r}")

    def as_dict(self) -> Dict[str, object]:
        return {
            "center_hz": self.center,
            "fwhm_hz": self.fwhm,
            "area_m2": self.area,
            "background_m2_per_hz": self.background,
            "goodness_r2": self.goodness,
            "multi_peak_suspect": self.multi_peak_suspect,
            "n_points": self.n_points,
        }


def initial_guess(freqs: np.ndarray, psd: np.ndarray) -> Tuple[float, float, float, float]:
    """(center, fwhm, area, background) a partir do pico e da meia altura."""
    i_peak = int(np.argmax(psd))
    background = float(np.min(psd))
    peak = float(psd[i_peak])
    level = background + 0.5 * (peak - background)

    left = i_peak
    while left > 0 and psd[left] > level:
        left -= 1
    right = i_peak
    while right < psd.size - 1 and psd[right] > level:
        right += 1

    df = freqs[1] - freqs[0]
    fwhm = max(float(freqs[right] - freqs[left]), df)
    area = 0.5 * math.pi * (peak - background) * fwhm
    return float(freqs[i_peak]), fwhm, area, background


def auto_window(spectrum: NoiseSpectrum, half_width_fwhm: float = DEFAULT_WINDOW_FWHM) -> Tuple[float, float]:
    """Janela centro ± half_width_fwhm·fwhm da estimativa inicial."""
    center, fwhm, _, _ = initial_guess(spectrum.freqs, spectrum.psd)
    return center - half_width_fwhm * fwhm, center + half_width_fwhm * fwhm


def fit_lorentzian(spectrum: NoiseSpectrum, window: Optional[Tuple[float, float]] = None,
                   max_iterations: int = 5000) -> LorentzianFit:
    """
    Ajusta uma lorentziana com fundo constante por mínimos quadrados não lineares.

    O ajuste usa variáveis normalizadas e pesos relativos (ruído multiplicativo).

    Args:
        spectrum: Espectro unilateral
        window: Faixa (f_lo, f_hi) em Hz; padrão centro ± 20 fwhm estimados
        max_iterations: Limite de avaliações da função

    Returns:
        LorentzianFit com R² e sinalização de janela com vários picos

    Raises:
        FitError: Janela com poucos pontos ou ajuste sem convergência
    """
    if window is None:
        window = auto_window(spectrum)
    f_lo, f_hi = window
    mask = (spectrum.freqs >= f_lo) & (spectrum.freqs <= f_hi)
    freqs = spectrum.freqs[mask]
    psd = spectrum.psd[mask]
    if freqs.size < MIN_POINTS:
        raise FitError(f"janela [{f_lo:.6g}, {f_hi:.6g}] Hz com {freqs.size} pontos (mínimo {MIN_POINTS})")

    center0, fwhm0, _, _ = initial_guess(freqs, psd)
    peak = float(np.max(psd))
    if peak <= 0:
        raise FitError("janela sem potência")

    x = (freqs - center0) / fwhm0
    y = psd / peak
    c_guess, w_guess, a_guess, bg_guess = initial_guess(x, y)
    sigma = np.maximum(y, 1e-12)
    span = x[-1] - x[0]

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", optimize.OptimizeWarning)
            params, _ = optimize.curve_fit(
                lorentzian, x, y,
                p0=[c_guess, w_guess, a_guess, bg_guess],
                sigma=sigma,
                bounds=([x[0], 1e-9, 1e-15, -np.inf], [x[-1], 10 * span, np.inf, np.inf]),
                max_nfev=max_iterations,
            )
    except (RuntimeError, ValueError) as e:
        raise FitError(f"ajuste lorentziano não convergiu: {e}") from e

    c, w, a, bg = params
    model = lorentzian(x, c, w, a, bg)
    if not np.all(np.isfinite(model)):
        raise FitError("modelo ajustado não finito")

    ss_res = float(np.sum((y - model) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    goodness = float(np.clip(1.0 - ss_res / ss_tot, 0.0, 1.0)) if ss_tot > 0 else 0.0

    relative = ndimage.uniform_filter1d((y - model) / np.maximum(model, 1e-12), size=5)
    suspect = bool(np.max(np.abs(relative)) > MULTI_PEAK_RESIDUAL)
    if suspect:
        logger.warning(f"Resíduo estruturado na janela [{f_lo:.6g}, {f_hi:.6g}] Hz: possível segundo pico")

    fit = LorentzianFit(
        center=float(center0 + c * fwhm0),
        fwhm=float(w * fwhm0),
        area=float(a * peak * fwhm0),
        background=float(bg * peak),
        goodness=goodness,
        multi_peak_suspect=suspect,
        n_points=int(freqs.size),
    )
    logger.debug(f"Ajuste: centro={fit.center:.6g} Hz, fwhm={fit.fwhm:.4g} Hz, R²={goodness:.5f}")
    return fit
