"""
Módulo de serviços com Dependency Inversion.
Implementa abstrações de alto nível.
"""

from .sweep_service import STATUS_OK, STATUS_UNSTABLE_ONLY, SweepService

__all__ = ['STATUS_OK', 'STATUS_UNSTABLE_ONLY', 'SweepService']
