"""
Mapa de estabilidade: razão de amortecimento no plano (φ, P intracavidade),
fronteira Γ_eff = 0 refinada por bissecção e curvas de iso-amortecimento.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from matplotlib.figure import Figure
from scipy import optimize

from src.config import GlobalConfig
from src.model.optomechanics import effective_dynamics
from src.model.types import CavitySetup, MechanicalMode, OperatingPoint
from src.sweeps.grid import damping_matrix, evaluate_grid

logger = GlobalConfig.get_logger('stability_map')


@dataclass(eq=False)
class StabilityMap:
    """
    damping_ratio tem forma (len(powers), len(phis)); células fora do
    alcance da curva de Airy (modo de potência incidente) valem NaN.
    boundary tem colunas (phi, potência intracavidade em φ) com Γ_eff = 0.
    """

    phis: np.ndarray
    powers: np.ndarray
    damping_ratio: np.ndarray
    reachable: np.ndarray
    boundary: np.ndarray
    contours: Dict[float, List[np.ndarray]] = field(default_factory=dict)
    mode_name: str = ""

    def to_frame(self) -> pd.DataFrame:
        phi_grid, power_grid = np.meshgrid(self.phis, self.powers)
        return pd.DataFrame({
            "phi": phi_grid.ravel(),
            "p_intracavity_w": power_grid.ravel(),
            "damping_ratio": self.damping_ratio.ravel(),
            "reachable": self.reachable.ravel(),
        })

    def boundary_frame(self, coupling_slope: Optional[float] = None) -> pd.DataFrame:
        frame = pd.DataFrame(self.boundary, columns=["phi", "p_intracavity_w"])
        if coupling_slope:
            frame["incident_power_w"] = frame["p_intracavity_w"] * (1.0 + frame["phi"] ** 2) / coupling_slope
        return frame

    def contours_frame(self) -> pd.DataFrame:
        rows = []
        for level, segments in sorted(self.contours.items()):
            for index, segment in enumerate(segments):
                for phi, power in segment:
                    rows.append({"level": level, "segment": index, "phi": phi, "p_intracavity_w": power})
        return pd.DataFrame(rows, columns=["level", "segment", "phi", "p_intracavity_w"])


def _damping_at(mode: MechanicalMode, cavity: CavitySetup, temperature: float, phi: float, power: float) -> float:
    op = OperatingPoint.from_intracavity_power(mode, cavity, phi, power, temperature)
    return effective_dynamics(op, area_check=False).damping_ratio


def refine_boundary(mode: MechanicalMode, cavity: CavitySetup, temperature: float,
                    phis: np.ndarray, powers: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """
    Para cada φ em que a coluna troca de sinal, localiza Γ_eff = 0 por bissecção.
    """
    points = []
    for j, phi in enumerate(phis):
        column = matrix[:, j]
        crossings = np.flatnonzero((column[:-1] > 0) & (column[1:] <= 0))
        if not crossings.size:
            continue
        i = crossings[0]
        lo, hi = float(powers[i]), float(powers[i + 1])
        root = optimize.brentq(
            lambda p: _damping_at(mode, cavity, temperature, float(phi), p),
            lo, hi, xtol=1e-14 * hi, rtol=4 * np.finfo(float).eps, maxiter=200,
        )
        points.append((float(phi), root))
    return np.array(points, dtype=float).reshape(-1, 2)


def iso_damping_contours(phis: np.ndarray, powers: np.ndarray, matrix: np.ndarray,
                         levels: Sequence[float]) -> Dict[float, List[np.ndarray]]:
    """Polilinhas (phi, P) de Γ_eff/Γ_m constante."""
    finite = matrix[np.isfinite(matrix)]
    if not finite.size:
        return {}
    wanted = sorted(level for level in levels if finite.min() < level < finite.max())
    if not wanted:
        return {}
    ax = Figure().subplots()
    contour_set = ax.contour(phis, powers, np.ma.masked_invalid(matrix), levels=wanted)
    return {
        float(level): [np.asarray(segment) for segment in segments if len(segment)]
        for level, segments in zip(contour_set.levels, contour_set.allsegs)
    }


def compute_stability_map(mode: MechanicalMode, cavity: CavitySetup, phis: Sequence[float],
                          powers: Sequence[float], temperature: float = 300.0,
                          max_resonant_power: Optional[float] = None,
                          contour_levels: Sequence[float] = (), workers: Optional[int] = None) -> StabilityMap:
    """
    Calcula o mapa de estabilidade.

    Args:
        mode: Modo mecânico
        cavity: Cavidade óptica
        phis: Eixo de dessintonia
        powers: Eixo de potência intracavidade efetiva em φ (W)
        temperature: Temperatura do banho (K)
        max_resonant_power: Se dado, células com P > p_res_max/(1+φ²) ficam NaN
        contour_levels: Níveis de iso-amortecimento exportados
        workers: Número de processos

    Returns:
        StabilityMap
    """
    phis = np.asarray(phis, dtype=float)
    powers = np.asarray(powers, dtype=float)
    frame = evaluate_grid(mode, cavity, temperature, powers, phis, "at-detuning", workers)
    matrix = damping_matrix(frame, powers.size, phis.size)

    if max_resonant_power is None:
        reachable = np.ones_like(matrix, dtype=bool)
    else:
        reachable = powers[:, None] <= max_resonant_power / (1.0 + phis[None, :] ** 2)

    boundary = refine_boundary(mode, cavity, temperature, phis, powers, matrix)
    shown = np.where(reachable, matrix, np.nan)
    contours = iso_damping_contours(phis, powers, shown, contour_levels) if contour_levels else {}

    logger.info(f"Mapa de estabilidade: {matrix.shape}, {len(boundary)} pontos de fronteira")
    return StabilityMap(phis, powers, shown, reachable, boundary, contours, mode.name)
