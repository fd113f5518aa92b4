"""
Sistema de registro extensível para provedores de espectro.
Aberto para extensão, fechado para modificação.
"""

from typing import Any, Dict, Optional

from src.config import GlobalConfig
from src.exceptions import ValidationError
from src.interfaces import IProviderRegistry, ISpectrumProvider
from src.providers import ClosedFormProvider, FileProvider, SimulationProvider, SpectrumRequest

logger = GlobalConfig.get_logger('provider_registry')


class ProviderRegistry(IProviderRegistry):
    """
    Registro de provedores de espectro indexado pela proveniência.
    Permite adicionar novas fontes sem modificar código existente.
    """

    def __init__(self, auto_register: bool = True):
        self._providers: Dict[str, ISpectrumProvider] = {}
        if auto_register:
            self._auto_register_default_providers()

    def _auto_register_default_providers(self):
        """Registra os provedores padrão (closed-form, simulated, ingested)."""
        for provider in (ClosedFormProvider(), SimulationProvider(), FileProvider()):
            self.register_provider(provider)

    def register_provider(self, provider: ISpectrumProvider) -> bool:
        """
        Registra um novo provedor.

        Args:
            provider: Instância que implementa ISpectrumProvider

        Returns:
            True se registrado com sucesso
        """
        name = provider.get_name()
        if name in self._providers:
            logger.info(f"Provedor '{name}' já existe. Substituindo...")
        self._providers[name] = provider
        logger.debug(f"Provedor '{name}' registrado")
        return True

    def get_provider(self, provider_name: str) -> Optional[ISpectrumProvider]:
        return self._providers.get(provider_name)

    def get_spectrum(self, provenance: str, request: SpectrumRequest):
        """
        Produz um espectro pelo provedor da proveniência indicada.

        Raises:
            ValidationError: Proveniência sem provedor disponível
        """
        provider = self.get_provider(provenance)
        if provider is None or not provider.is_available():
            raise ValidationError(f"nenhum provedor disponível para '{provenance}'")
        return provider.get_spectrum(request)

    def get_all_stats(self) -> Dict[str, Dict[str, Any]]:
        """Estatísticas de uso de todos os provedores registrados."""
        return {name: provider.get_stats() for name, provider in self._providers.items()}


# Instância global do registro de provedores
provider_registry = ProviderRegistry()
