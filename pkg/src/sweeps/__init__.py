"""
Varreduras de parâmetros e configuração de experimentos.
"""

from .experiment_config import (
    CalibrationSettings,
    ExperimentConfig,
    MapSettings,
    SpectrumSeries,
    load_experiment_config,
    parse_experiment_config,
)
from .grid import GRID_COLUMNS, evaluate_grid, evaluate_point, resonant_power
from .stability_map import StabilityMap, compute_stability_map, iso_damping_contours, refine_boundary

__all__ = [
    'CalibrationSettings', 'ExperimentConfig', 'MapSettings', 'SpectrumSeries',
    'load_experiment_config', 'parse_experiment_config',
    'GRID_COLUMNS', 'evaluate_grid', 'evaluate_point', 'resonant_power',
    'StabilityMap', 'compute_stability_map', 'iso_damping_contours', 'refine_boundary',
]
