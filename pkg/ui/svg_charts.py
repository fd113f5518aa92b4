"""
Gráficos SVG mínimos das saídas da CLI.

Usa a interface orientada a objetos do matplotlib (sem pyplot) e fixa o sal
dos identificadores SVG e a data dos metadados para saídas reprodutíveis.
"""

from pathlib import Path
from typing import Sequence, Tuple, Union

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.figure import Figure

from src.analysis.spectrum import NoiseSpectrum
from src.config import GlobalConfig
from src.sweeps.stability_map import StabilityMap
from ui.constants import COLORS

logger = GlobalConfig.get_logger('svg_charts')

matplotlib.rcParams["svg.hashsalt"] = "optospring"

PathLike = Union[str, Path]


def _save(fig: Figure, path: PathLike) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info(f"SVG gravado: {path}")
    return path


def spectra_overlay(spectra: Sequence[Tuple[str, NoiseSpectrum]], path: PathLike, title: str = "") -> Path:
    """Espectros sobrepostos em escala log, frequência em kHz."""
    fig = Figure(figsize=(7, 4.5))
    ax = fig.subplots()
    for label, spectrum in spectra:
        ax.semilogy(spectrum.freqs / 1e3, spectrum.psd, label=label, linewidth=1.0)
    ax.set_xlabel("Frequência (kHz)")
    ax.set_ylabel("PSD de deslocamento (m²/Hz)")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def response_curves(frame: pd.DataFrame, path: PathLike) -> Path:
    """Deslocamento de frequência e razão de amortecimento vs φ, uma curva por potência."""
    fig = Figure(figsize=(7, 7))
    ax_shift, ax_damping = fig.subplots(2, 1, sharex=True)
    for power, group in frame.groupby("power_w", sort=True):
        label = f"{power * 1e3:.3g} mW"
        ax_shift.plot(group["phi"], group["freq_shift_hz"], label=label)
        ax_damping.plot(group["phi"], group["damping_ratio"], label=label)
    ax_damping.axhline(0.0, color=COLORS["neutral"], linewidth=0.8, linestyle="--")
    ax_shift.set_ylabel("Ω_eff - Ω_m (Hz/2π)")
    ax_damping.set_ylabel("Γ_eff / Γ_m")
    ax_damping.set_xlabel("Dessintonia φ")
    ax_shift.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def stability_heatmap(stability: StabilityMap, path: PathLike) -> Tuple[float, float]:
    """
    Mapa de cores de Γ_eff/Γ_m com fronteira e iso-curvas.

    Returns:
        Faixa (vmin, vmax) da escala de cores, ajustada automaticamente
    """
    finite = stability.damping_ratio[np.isfinite(stability.damping_ratio)]
    vmin, vmax = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)

    fig = Figure(figsize=(7, 5))
    ax = fig.subplots()
    mesh = ax.pcolormesh(stability.phis, stability.powers, np.ma.masked_invalid(stability.damping_ratio),
                         shading="nearest", vmin=vmin, vmax=vmax, cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="Γ_eff / Γ_m")
    for level, segments in sorted(stability.contours.items()):
        for segment in segments:
            ax.plot(segment[:, 0], segment[:, 1], color=COLORS["cooling"] if level > 1.0 else COLORS["heating"],
                    linewidth=0.7)
    if len(stability.boundary):
        ax.plot(stability.boundary[:, 0], stability.boundary[:, 1], color=COLORS["boundary"],
                linewidth=1.5, label="Γ_eff = 0")
        ax.legend(fontsize=8)
    ax.set_xlabel("Dessintonia φ")
    ax.set_ylabel("Potência intracavidade (W)")
    fig.tight_layout()
    _save(fig, path)
    return vmin, vmax


def temperature_curves(frame: pd.DataFrame, path: PathLike) -> Path:
    """T_eff do modo isolado (tracejado) e observável com fundo (contínuo)."""
    fig = Figure(figsize=(7, 4.5))
    ax = fig.subplots()
    for power, group in frame.groupby("power_w", sort=True):
        label = f"{power * 1e3:.3g} mW"
        line, = ax.semilogy(group["phi"], group["t_eff_single_k"], linestyle="--", label=f"{label} (modo isolado)")
        if "t_eff_with_background_k" in group:
            ax.semilogy(group["phi"], group["t_eff_with_background_k"], color=line.get_color(), label=f"{label} (com fundo)")
    ax.set_xlabel("Dessintonia φ")
    ax.set_ylabel("Temperatura efetiva (K)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, path)
