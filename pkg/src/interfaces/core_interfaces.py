"""
Interfaces Segregadas - Core Interfaces.
Interfaces pequenas, específicas e coesas.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from src.analysis.spectrum import NoiseSpectrum
    from src.providers.base_provider import SpectrumRequest


# ========================================
# INTERFACES BÁSICAS - Core Contracts
# ========================================

class IIdentifiable(ABC):
    """Interface para objetos que têm identificação."""

    @abstractmethod
    def get_name(self) -> str:
        """Retorna o nome/identificador."""
        pass


class IAvailabilityCheck(ABC):
    """Interface para verificação de disponibilidade."""

    @abstractmethod
    def is_available(self) -> bool:
        """Verifica se está disponível."""
        pass


class IStatisticsProvider(ABC):
    """Interface para provedores de estatísticas."""

    @abstractmethod
    def get_stats(self) -> Dict[str, Any]:
        """Retorna estatísticas."""
        pass


# ========================================
# INTERFACES DE ESPECTRO - Spectra
# ========================================

class ISpectrumSource(ABC):
    """Interface específica para produção de espectros de deslocamento."""

    @abstractmethod
    def get_spectrum(self, request: 'SpectrumRequest') -> 'NoiseSpectrum':
        """Produz um espectro unilateral para a requisição."""
        pass


# ========================================
# INTERFACES DE REGISTRO - Registry
# ========================================

class IProviderRegistry(ABC):
    """Interface específica para registro de provedores de espectro."""

    @abstractmethod
    def register_provider(self, provider: Any) -> bool:
        """Registra um provedor."""
        pass

    @abstractmethod
    def get_provider(self, provider_name: str) -> Optional[Any]:
        """Obtém um provedor pelo nome (proveniência)."""
        pass

    @abstractmethod
    def get_spectrum(self, provenance: str, request: 'SpectrumRequest') -> 'NoiseSpectrum':
        """Produz um espectro pelo provedor da proveniência indicada."""
        pass

    @abstractmethod
    def get_all_stats(self) -> Dict[str, Dict[str, Any]]:
        """Estatísticas de uso por provedor."""
        pass
