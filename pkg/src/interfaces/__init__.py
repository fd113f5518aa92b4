"""
Módulo de Interfaces Segregadas.

- core_interfaces: Interfaces básicas e fundamentais
- composite_interfaces: Combinações de interfaces básicas
"""

from .core_interfaces import (
    IAvailabilityCheck,
    IIdentifiable,
    IProviderRegistry,
    ISpectrumSource,
    IStatisticsProvider,
)
from .composite_interfaces import (
    IDependencyContainer,
    ISpectrumProvider,
    ISweepService,
)

__all__ = [
    'IAvailabilityCheck',
    'IIdentifiable',
    'IProviderRegistry',
    'ISpectrumSource',
    'IStatisticsProvider',
    'IDependencyContainer',
    'ISpectrumProvider',
    'ISweepService',
]
