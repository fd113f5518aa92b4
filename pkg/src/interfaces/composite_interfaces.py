"""
Interfaces Compostas - Composite Interfaces.
Combina interfaces segregadas para funcionalidades específicas.
"""

from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional, Sequence

from .core_interfaces import IAvailabilityCheck, IIdentifiable, ISpectrumSource, IStatisticsProvider


# ========================================
# INTERFACES COMPOSTAS - Spectrum Provider
# ========================================

class ISpectrumProvider(IIdentifiable, IAvailabilityCheck, ISpectrumSource, IStatisticsProvider):
    """
    Interface completa para provedores de espectro.
    Uma implementação por proveniência (closed-form, simulated, ingested).
    """
    pass


# ========================================
# INTERFACES COMPOSTAS - Services
# ========================================

class ISweepService(IIdentifiable):
    """Serviço de alto nível com uma operação por comando da CLI."""

    @abstractmethod
    def spectrum(self, config: Any, phis: Optional[Sequence[float]] = None, power: Optional[float] = None,
                 power_mode: Optional[str] = None, svg: bool = False) -> Dict[str, Any]:
        pass

    @abstractmethod
    def response_sweep(self, config: Any, svg: bool = False) -> Dict[str, Any]:
        pass

    @abstractmethod
    def stability_map(self, config: Any, svg: bool = False) -> Dict[str, Any]:
        pass

    @abstractmethod
    def temperature_sweep(self, config: Any, with_background: bool = True, svg: bool = False) -> Dict[str, Any]:
        pass

    @abstractmethod
    def simulate(self, config: Any, phi: float, power: float, power_mode: str) -> Dict[str, Any]:
        pass

    @abstractmethod
    def fit(self, spectrum_path: str, config: Any, calibration_path: Optional[str] = None,
            phi: Optional[float] = None) -> Dict[str, Any]:
        pass

    @abstractmethod
    def calibrate(self, spectrum_paths: Sequence[str], config: Any) -> Dict[str, Any]:
        pass


# ========================================
# INTERFACES COMPOSTAS - Dependency Injection
# ========================================

class IDependencyContainer(ABC):
    """Interface para container de injeção de dependências."""

    @abstractmethod
    def register_singleton(self, interface: type, implementation: Any) -> None:
        """Registra um singleton."""
        pass

    @abstractmethod
    def register_singleton_factory(self, interface: type, factory: Callable[[], Any]) -> None:
        """Registra um singleton criado na primeira resolução."""
        pass

    @abstractmethod
    def resolve(self, interface: type) -> Any:
        """Resolve uma dependência."""
        pass

    @abstractmethod
    def is_registered(self, interface: type) -> bool:
        """Verifica se uma interface está registrada."""
        pass
