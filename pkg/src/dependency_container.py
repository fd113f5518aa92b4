"""
Container de Injeção de Dependências.

Guarda, por interface, como obter a implementação: uma instância pronta
ou uma factory preguiçosa cujo resultado é reaproveitado (o serviço de
varredura, que carrega o pool de processos, só é criado quando algum
comando precisa dele).
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Type

from src.config import GlobalConfig
from src.interfaces import IDependencyContainer

logger = GlobalConfig.get_logger('container')

SINGLETON = "Singleton"
LAZY = "Singleton (Lazy)"


@dataclass
class _Registration:
    kind: str
    instance: Any = None
    factory: Optional[Callable[[], Any]] = None
    created: bool = False

    def get(self) -> Any:
        if self.kind == LAZY and not self.created:
            self.instance = self.factory()
            self.created = True
        return self.instance

    def describe(self) -> str:
        # preguiçoso já criado passa a ser singleton comum
        return SINGLETON if self.created else self.kind


class DependencyContainer(IDependencyContainer):
    """Registro interface -> implementação usado pelo bootstrap da CLI."""

    def __init__(self):
        self._registry: Dict[Type, _Registration] = {}

    def _register(self, interface: Type, registration: _Registration) -> None:
        if interface in self._registry:
            logger.debug(f"Substituindo registro de {interface.__name__}")
        self._registry[interface] = registration
        logger.debug(f"{registration.kind} registrado: {interface.__name__}")

    def register_singleton(self, interface: Type, implementation: Any) -> None:
        """Registra uma instância já construída."""
        self._register(interface, _Registration(SINGLETON, instance=implementation))

    def register_singleton_factory(self, interface: Type, factory: Callable[[], Any]) -> None:
        """
        Registra um singleton criado na primeira resolução.

        Args:
            interface: Interface ou tipo base
            factory: Função que cria a instância (chamada apenas uma vez)
        """
        self._register(interface, _Registration(LAZY, factory=factory))

    def resolve(self, interface: Type) -> Any:
        """
        Resolve uma dependência.

        Raises:
            KeyError: Se a interface não estiver registrada
        """
        registration = self._registry.get(interface)
        if registration is None:
            raise KeyError(f"Interface {interface.__name__} não registrada no container")
        return registration.get()

    def is_registered(self, interface: Type) -> bool:
        return interface in self._registry

    def clear(self) -> None:
        self._registry.clear()
        logger.debug("Container de dependências limpo")

    def get_registered_interfaces(self) -> Dict[str, str]:
        """Nome da interface -> tipo de registro, na ordem de registro."""
        return {interface.__name__: registration.describe() for interface, registration in self._registry.items()}


# Instância global do container
container = DependencyContainer()
