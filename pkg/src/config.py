"""
Configurações globais do sistema.
Centraliza todas as configurações de processo (workers, logging, caminhos padrão).
"""

import os
import logging
import sys
from typing import Dict, Any, Optional
from dotenv import load_dotenv

# Carrega variáveis de ambiente
load_dotenv()


def _env_int(name: str, default: int) -> int:
    """Lê um inteiro do ambiente, caindo no padrão se o valor for inválido."""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


class GlobalConfig:
    """Classe para configurações globais do sistema."""

    # Paralelismo (células de grade e ensembles de trajetórias)
    WORKERS = max(1, _env_int("OPTOSPRING_WORKERS", os.cpu_count() or 1))

    # Caminhos padrão
    DEFAULT_CONFIG_PATH = os.getenv("OPTOSPRING_CONFIG", os.path.join("config", "defaults.toml"))
    OUTPUT_DIR = os.getenv("OPTOSPRING_OUTPUT_DIR", "results")

    # Configurações de log
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    DEBUG_MODE = os.getenv("DEBUG_MODE", "false").lower() == "true"
    LOG_FILE = os.getenv("OPTOSPRING_LOG_FILE", "")

    # Integração temporal
    DEFAULT_SAMPLES_PER_PERIOD = 40
    MAX_STEP_FRACTION = 0.05
    DIVERGENCE_FACTOR = 1e6
    CHUNK_SIZE = 1 << 18

    @classmethod
    def setup_logging(cls) -> logging.Logger:
        """
        Configura o sistema de logging estruturado.

        Returns:
            Logger configurado
        """
        logger = logging.getLogger('optospring')
        logger.setLevel(getattr(logging, cls.LOG_LEVEL.upper(), logging.INFO))

        # Remove handlers existentes para evitar duplicação
        if logger.handlers:
            logger.handlers.clear()

        formatter = logging.Formatter(
            fmt='%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        # stdout fica livre para a saída da CLI
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        if cls.LOG_FILE and not cls.DEBUG_MODE:
            try:
                log_dir = os.path.dirname(cls.LOG_FILE)
                if log_dir:
                    os.makedirs(log_dir, exist_ok=True)
                file_handler = logging.FileHandler(cls.LOG_FILE, encoding='utf-8')
                file_handler.setFormatter(formatter)
                logger.addHandler(file_handler)
            except OSError as e:
                logger.warning(f"Não foi possível criar log de arquivo: {e}")

        # Reduz ruído de bibliotecas externas
        logging.getLogger('matplotlib').setLevel(logging.WARNING)

        logger.debug("Sistema de logging configurado")
        return logger

    @classmethod
    def get_logger(cls, name: Optional[str] = None) -> logging.Logger:
        """
        Retorna um logger configurado.

        Args:
            name: Nome do logger (usa o raiz se não especificado)

        Returns:
            Logger configurado
        """
        if name is None:
            return logging.getLogger('optospring')

        return logging.getLogger(f'optospring.{name}')

    @classmethod
    def get_workers(cls, override: Optional[int] = None) -> int:
        """
        Retorna o número de workers a usar.

        Args:
            override: Valor explícito (tem prioridade sobre o ambiente)

        Returns:
            Número de workers (mínimo 1)
        """
        if override is not None:
            return max(1, int(override))
        return cls.WORKERS

    @classmethod
    def get_simulation_params(cls, **overrides) -> Dict[str, Any]:
        """
        Retorna parâmetros numéricos padronizados da integração temporal.

        Args:
            **overrides: Parâmetros para sobrescrever os padrões

        Returns:
            Dicionário com parâmetros de integração
        """
        params = {
            "samples_per_period": cls.DEFAULT_SAMPLES_PER_PERIOD,
            "max_step_fraction": cls.MAX_STEP_FRACTION,
            "divergence_factor": cls.DIVERGENCE_FACTOR,
            "chunk_size": cls.CHUNK_SIZE,
        }
        params.update(overrides)
        return params

    @classmethod
    def get_debug_info(cls) -> Dict[str, Any]:
        """
        Retorna informações de debug.

        Returns:
            Dicionário com informações de configuração
        """
        return {
            "workers": cls.WORKERS,
            "default_config": cls.DEFAULT_CONFIG_PATH,
            "output_dir": cls.OUTPUT_DIR,
            "log_level": cls.LOG_LEVEL,
            "debug_mode": cls.DEBUG_MODE,
            "log_file": cls.LOG_FILE or None,
        }


# Inicializa o logging quando o módulo é importado
GlobalConfig.setup_logging()
