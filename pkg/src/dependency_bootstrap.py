"""
Sistema de Bootstrap para Injeção de Dependências.
Configura o registro de provedores e o serviço de varreduras.
"""

from typing import Any, Dict, Optional

from src.config import GlobalConfig
from src.dependency_container import container
from src.interfaces import IProviderRegistry, ISweepService
from src.provider_registry import provider_registry
from src.services.sweep_service import SweepService

logger = GlobalConfig.get_logger('bootstrap')


def configure_dependencies(workers: Optional[int] = None) -> None:
    """
    Configura todas as dependências do sistema (Composition Root).

    Args:
        workers: Limite de processos repassado ao serviço
    """
    logger.debug("Iniciando configuração do sistema de dependências")
    container.clear()

    # 1. Registro de provedores como singleton
    container.register_singleton(IProviderRegistry, provider_registry)

    # 2. Serviço de varreduras criado na primeira resolução
    def sweep_service_factory():
        return SweepService(container.resolve(IProviderRegistry), workers)

    container.register_singleton_factory(ISweepService, sweep_service_factory)
    logger.debug("Sistema de dependências configurado")


def get_sweep_service() -> ISweepService:
    """Obtém o serviço de varreduras, configurando o container se necessário."""
    if not container.is_registered(ISweepService):
        configure_dependencies()
    return container.resolve(ISweepService)


def get_dependency_info() -> Dict[str, Any]:
    """Interfaces registradas e estatísticas dos provedores."""
    info: Dict[str, Any] = {"registered_interfaces": container.get_registered_interfaces()}
    if container.is_registered(IProviderRegistry):
        info["providers"] = container.resolve(IProviderRegistry).get_all_stats()
    return info
