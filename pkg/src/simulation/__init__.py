"""
Simulação estocástica no domínio do tempo.
"""

from .force_filter import ForceFilterRealization, check_time_step, realize_force_filter, zoh_discretize
from .integrator import (
    SCHEMES,
    STATUS_OK,
    STATUS_UNSTABLE_GROWTH,
    SimConfig,
    Trajectory,
    build_step_map,
    ensemble_temperature,
    ensemble_variance,
    integrate,
    run_ensemble,
    thermal_force_samples,
)
from .ringdown import RingdownEstimate, ringdown_rate
from .trajectory_io import (
    read_trajectory_raw,
    read_trajectory_text,
    write_trajectory_raw,
    write_trajectory_text,
)

__all__ = [
    'ForceFilterRealization', 'check_time_step', 'realize_force_filter', 'zoh_discretize',
    'SCHEMES', 'STATUS_OK', 'STATUS_UNSTABLE_GROWTH', 'SimConfig', 'Trajectory',
    'build_step_map', 'ensemble_temperature', 'ensemble_variance', 'integrate',
    'run_ensemble', 'thermal_force_samples',
    'RingdownEstimate', 'ringdown_rate',
    'read_trajectory_raw', 'read_trajectory_text', 'write_trajectory_raw', 'write_trajectory_text',
]
