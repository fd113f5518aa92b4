"""
Avaliação da dinâmica efetiva em grades (potência × dessintonia).

As linhas da grade (uma por potência) são independentes e distribuídas
entre processos; a ordem do resultado segue a grade.
"""

import math
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.config import GlobalConfig
from src.model.optomechanics import effective_dynamics
from src.model.types import CavitySetup, MechanicalMode, OperatingPoint
from utils.helpers import parallel_map

logger = GlobalConfig.get_logger('grid')

GRID_COLUMNS = [
    "power_w", "phi", "p_res_w", "p_intracavity_w",
    "freq_shift_hz", "damping_ratio", "t_eff_k", "stable",
]


def evaluate_point(mode: MechanicalMode, cavity: CavitySetup, temperature: float, phi: float, p_res: float) -> dict:
    """Uma célula da grade: deslocamento de frequência, razão de amortecimento e T_eff."""
    op = OperatingPoint(mode, cavity, phi, p_res, temperature)
    dyn = effective_dynamics(op, area_check=False)
    return {
        "phi": phi,
        "p_res_w": p_res,
        "p_intracavity_w": op.intracavity_power,
        "freq_shift_hz": dyn.frequency_shift_hz,
        "damping_ratio": dyn.damping_ratio,
        "t_eff_k": dyn.t_eff if dyn.stable else math.nan,
        "stable": dyn.stable,
    }


def _evaluate_row(args) -> list:
    mode, cavity, temperature, power, phis, p_res_values = args
    rows = []
    for phi, p_res in zip(phis, p_res_values):
        row = evaluate_point(mode, cavity, temperature, phi, p_res)
        row["power_w"] = power
        rows.append(row)
    return rows


def resonant_power(cavity: CavitySetup, power: float, phi: float, power_mode: str) -> float:
    """
    Converte a potência da grade em p_res.

    - "incident": potência incidente, p_res = inclinação·P_in
    - "intracavity": p_res dado diretamente
    - "at-detuning": potência intracavidade efetiva em φ, p_res = P·(1+φ²)
    """
    if power_mode == "incident":
        return cavity.coupling_slope * power
    if power_mode == "intracavity":
        return power
    if power_mode == "at-detuning":
        return power * (1.0 + phi ** 2)
    raise ValueError(f"modo de potência desconhecido '{power_mode}'")


def evaluate_grid(mode: MechanicalMode, cavity: CavitySetup, temperature: float,
                  powers: Sequence[float], phis: Sequence[float], power_mode: str,
                  workers: Optional[int] = None) -> pd.DataFrame:
    """
    Avalia effective_dynamics em todas as células (potência, φ).

    Args:
        mode: Modo mecânico
        cavity: Cavidade óptica
        temperature: Temperatura do banho (K)
        powers: Eixo de potência (W), interpretado segundo power_mode
        phis: Eixo de dessintonia
        power_mode: "incident", "intracavity" ou "at-detuning"
        workers: Número de processos (padrão: GlobalConfig)

    Returns:
        DataFrame com GRID_COLUMNS, ordenado por potência e depois por φ
    """
    phis = [float(phi) for phi in phis]
    jobs = [
        (mode, cavity, temperature, float(power), phis,
         [resonant_power(cavity, float(power), phi, power_mode) for phi in phis])
        for power in powers
    ]
    rows = [row for chunk in parallel_map(_evaluate_row, jobs, workers) for row in chunk]
    frame = pd.DataFrame(rows, columns=GRID_COLUMNS)
    unstable = int((~frame["stable"]).sum())
    if unstable:
        logger.warning(f"{unstable} de {len(frame)} células instáveis (Γ_eff <= 0)")
    logger.debug(f"Grade avaliada: {len(powers)} potências × {len(phis)} dessintonias")
    return frame


def damping_matrix(frame: pd.DataFrame, n_powers: int, n_phis: int) -> np.ndarray:
    """Matriz Γ_eff/Γ_m com forma (n_potências, n_dessintonias)."""
    return frame["damping_ratio"].to_numpy(dtype=float).reshape(n_powers, n_phis)
