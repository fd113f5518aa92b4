"""
Núcleo físico em forma fechada.
"""

from .types import (
    CavitySetup,
    EffectiveDynamics,
    MechanicalMode,
    OperatingPoint,
    cavity_bandwidth_from_length,
)
from .optomechanics import (
    area_temperature,
    cavity_delta,
    displacement_psd,
    displacement_variance,
    effective_dynamics,
    effective_susceptibility,
    instability_threshold,
    intracavity_power,
    langevin_psd,
    mech_susceptibility,
    nonlinear_phase,
    radiation_force_transfer,
    threshold_incident_power,
)

__all__ = [
    'CavitySetup', 'EffectiveDynamics', 'MechanicalMode', 'OperatingPoint',
    'cavity_bandwidth_from_length',
    'area_temperature', 'cavity_delta', 'displacement_psd', 'displacement_variance',
    'effective_dynamics', 'effective_susceptibility', 'instability_threshold',
    'intracavity_power', 'langevin_psd', 'mech_susceptibility', 'nonlinear_phase',
    'radiation_force_transfer', 'threshold_incident_power',
]
