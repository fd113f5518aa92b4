"""
Classe base comum aos provedores de espectro.
"""

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from src.config import GlobalConfig
from src.interfaces import ISpectrumProvider
from src.model.types import OperatingPoint
from src.simulation.integrator import SimConfig

logger = GlobalConfig.get_logger('base_provider')


@dataclass(frozen=True, eq=False)
class SpectrumRequest:
    """
    Pedido de espectro.

    Cada provedor usa apenas os campos da sua proveniência:
    closed-form (op, freqs), simulated (op, sim, segment_len, workers,
    trajectories), ingested (path). Trajetórias já integradas dispensam
    uma nova integração do ensemble.
    """

    op: Optional[OperatingPoint] = None
    freqs: Optional[np.ndarray] = None
    sim: Optional[SimConfig] = None
    segment_len: Optional[int] = None
    workers: Optional[int] = None
    path: Optional[str] = None
    trajectories: Optional[tuple] = None


class BaseProvider(ISpectrumProvider, ABC):
    """
    Classe base para todos os provedores de espectro.
    Implementa o rastreamento de estatísticas que todos compartilham.
    """

    def __init__(self, name: str):
        self.name = name
        self.status = "unavailable"

        self.request_count = 0
        self.error_count = 0
        self.last_request_time = None

        self._setup()
        logger.debug(f"Provedor {self.name} inicializado")

    @abstractmethod
    def _setup(self):
        """Configuração específica do provedor."""
        pass

    @abstractmethod
    def _spectrum_impl(self, request: SpectrumRequest):
        """Produção do espectro específica do provedor."""
        pass

    def get_name(self) -> str:
        return self.name

    def is_available(self) -> bool:
        return self.status == "available"

    def get_spectrum(self, request: SpectrumRequest):
        """
        Produz o espectro com rastreamento de estatísticas.
        Erros são contados, registrados e propagados.
        """
        self.request_count += 1
        self.last_request_time = time.time()
        logger.debug(f"Espectro via {self.name} (requisição #{self.request_count})")
        try:
            return self._spectrum_impl(request)
        except Exception as e:
            self.error_count += 1
            logger.error(f"Erro no provedor {self.name}: {e}")
            raise

    def get_stats(self) -> Dict[str, Any]:
        return {
            "request_count": self.request_count,
            "error_count": self.error_count,
            "last_request_time": self.last_request_time,
            "success_rate": (
                (self.request_count - self.error_count) / self.request_count
                if self.request_count > 0 else 0
            ),
            "status": self.status,
            "provider_name": self.name,
        }
