"""
Calibração empírica do ganho de detecção em função da dessintonia.

Um tom de amplitude conhecida é medido em cada φ; o ganho é a razão das
amplitudes observadas em φ e em φ = 0. Entre entradas da tabela o ganho é
interpolado de forma monotônica por partes (PCHIP).
"""

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.interpolate import PchipInterpolator

from src.config import GlobalConfig
from src.exceptions import CalibrationError
from src.analysis.spectrum import NoiseSpectrum

logger = GlobalConfig.get_logger('calibration')

TONE_HALF_WIDTH_BINS = 3
BASELINE_BINS = 20
MIN_TONE_SNR = 10.0


def default_gain_model(phi: float) -> float:
    """Modelo sintético 1/(1+φ²), usado apenas para gerar dados de teste."""
    return 1.0 / (1.0 + phi ** 2)


@dataclass(frozen=True)
class CalibrationTable:
    """Tabela (phi, ganho) com ganho(0) = 1."""

    entries: Tuple[Tuple[float, float], ...]
    drive_amplitude_m: float
    drive_freq_hz: float

    def __post_init__(self):
        ordered = tuple(sorted((float(p), float(g)) for p, g in self.entries))
        object.__setattr__(self, "entries", ordered)
        phis = [p for p, _ in ordered]
        if len(set(phis)) != len(phis):
            raise CalibrationError("valores de phi repetidos na tabela")
        if any(g <= 0 or not math.isfinite(g) for _, g in ordered):
            raise CalibrationError("ganhos devem ser finitos e > 0")
        reference = dict(ordered).get(0.0)
        if reference is None:
            raise CalibrationError("tabela sem a referência phi = 0")
        if abs(reference - 1.0) > 1e-12:
            raise CalibrationError(f"ganho de referência deve ser 1 (recebido {reference!r})")

    @property
    def phi_range(self) -> Tuple[float, float]:
        return self.entries[0][0], self.entries[-1][0]

    def gain(self, phi: float) -> float:
        """
        Ganho interpolado em phi.

        Raises:
            CalibrationError: phi fora da faixa da tabela
        """
        lo, hi = self.phi_range
        if phi < lo or phi > hi:
            raise CalibrationError(f"phi={phi:.4g} fora da faixa calibrada [{lo:.4g}, {hi:.4g}]")
        if len(self.entries) == 1:
            return 1.0
        phis, gains = zip(*self.entries)
        return float(PchipInterpolator(phis, gains, extrapolate=False)(phi))


def tone_power(spectrum: NoiseSpectrum, drive_freq_hz: float,
               half_width_bins: int = TONE_HALF_WIDTH_BINS) -> float:
    """
    Potência do tom (m²) acima da linha de base local.

    A linha de base é a mediana dos bins vizinhos fora do tom.

    Raises:
        CalibrationError: Tom fora da grade ou indistinguível da linha de base
    """
    freqs = spectrum.freqs
    if not freqs[0] <= drive_freq_hz <= freqs[-1]:
        raise CalibrationError(f"frequência do tom {drive_freq_hz:.6g} Hz fora do espectro")
    center = int(np.argmin(np.abs(freqs - drive_freq_hz)))
    lo = max(0, center - half_width_bins)
    hi = min(freqs.size, center + half_width_bins + 1)

    neighbours = np.concatenate([
        spectrum.psd[max(0, lo - BASELINE_BINS):lo],
        spectrum.psd[hi:hi + BASELINE_BINS],
    ])
    baseline = float(np.median(neighbours)) if neighbours.size else 0.0
    excess = float(np.sum(spectrum.psd[lo:hi] - baseline) * spectrum.df)
    floor = baseline * (hi - lo) * spectrum.df
    if excess <= 0 or (floor > 0 and excess < MIN_TONE_SNR * floor):
        raise CalibrationError(f"tom ausente em {drive_freq_hz:.6g} Hz")
    return excess


def build_calibration(spectra: Sequence[Tuple[float, NoiseSpectrum]], drive_amplitude_m: float,
                      drive_freq_hz: float) -> CalibrationTable:
    """
    Constrói a tabela de ganho a partir de espectros com o tom de calibração.

    Args:
        spectra: Pares (phi, espectro); phi = 0 obrigatório
        drive_amplitude_m: Amplitude do tom (m)
        drive_freq_hz: Frequência do tom (Hz)

    Returns:
        CalibrationTable

    Raises:
        CalibrationError: Referência ausente, tom ausente ou phi repetido
    """
    phis = [phi for phi, _ in spectra]
    if len(set(phis)) != len(phis):
        raise CalibrationError("phi repetido entre os espectros de calibração")
    powers = {phi: tone_power(spectrum, drive_freq_hz) for phi, spectrum in spectra}
    if 0.0 not in powers:
        raise CalibrationError("espectro de referência phi = 0 ausente")

    reference = powers[0.0]
    expected = drive_amplitude_m ** 2 / 2.0
    if abs(reference - expected) > 0.05 * expected:
        logger.info(f"Tom de referência {math.sqrt(2 * reference):.3g} m vs amplitude nominal {drive_amplitude_m:.3g} m")

    entries = tuple((phi, 1.0 if phi == 0.0 else math.sqrt(power / reference)) for phi, power in powers.items())
    logger.info(f"Calibração construída com {len(entries)} pontos")
    return CalibrationTable(entries, drive_amplitude_m, drive_freq_hz)


def apply_calibration(spectrum: NoiseSpectrum, table: CalibrationTable, phi: float) -> NoiseSpectrum:
    """Divide a PSD por ganho(phi)²; proveniência preservada."""
    gain = table.gain(phi)
    metadata = dict(spectrum.metadata)
    metadata["calibration_gain"] = gain
    return replace(spectrum, psd=spectrum.psd / gain ** 2, metadata=metadata)


def synthesize_tone_spectrum(base: NoiseSpectrum, phi: float, drive_amplitude_m: float, drive_freq_hz: float,
                             gain_model: Optional[Callable[[float], float]] = None) -> NoiseSpectrum:
    """
    Espectro sintético visto por um detector com ganho gain_model(phi),
    com o tom de calibração injetado no bin mais próximo de drive_freq_hz.
    """
    model = gain_model or default_gain_model
    gain = model(phi)
    psd = base.psd.copy()
    index = int(np.argmin(np.abs(base.freqs - drive_freq_hz)))
    psd[index] += drive_amplitude_m ** 2 / 2.0 / base.df
    metadata = dict(base.metadata)
    metadata.update({"phi": phi, "drive_amplitude_m": drive_amplitude_m, "drive_freq_hz": drive_freq_hz})
    return replace(base, psd=psd * gain ** 2, metadata=metadata)


def write_calibration(table: CalibrationTable, path: Union[str, Path]) -> Path:
    path = Path(path)
    frame = pd.DataFrame(table.entries, columns=["phi", "gain"])
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("# optospring calibration\n")
        handle.write(f"# drive_amplitude_m={table.drive_amplitude_m:.15g}\n")
        handle.write(f"# drive_freq_hz={table.drive_freq_hz:.15g}\n")
        frame.to_csv(handle, index=False, float_format="%.15g", lineterminator="\n")
    logger.info(f"Tabela de calibração gravada: {path}")
    return path


def read_calibration(path: Union[str, Path]) -> CalibrationTable:
    """
    Raises:
        CalibrationError: Cabeçalho incompleto ou colunas inesperadas
    """
    path = Path(path)
    header = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            if "=" in line:
                key, value = line[1:].split("=", 1)
                header[key.strip()] = value.strip()
    try:
        amplitude = float(header["drive_amplitude_m"])
        frequency = float(header["drive_freq_hz"])
    except (KeyError, ValueError) as e:
        raise CalibrationError(f"{path}: cabeçalho de calibração incompleto ({e})") from e
    frame = pd.read_csv(path, comment="#")
    if list(frame.columns) != ["phi", "gain"]:
        raise CalibrationError(f"{path}: colunas esperadas phi,gain")
    return CalibrationTable(tuple(map(tuple, frame.to_numpy(dtype=float))), amplitude, frequency)
