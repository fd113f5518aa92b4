"""
Hierarquia de exceções do domínio.
A CLI converte estas exceções em códigos de saída.
"""

from typing import Optional


class OptospringError(Exception):
    """Base de todas as exceções do pacote."""


class ValidationError(OptospringError, ValueError):
    """Parâmetro físico inválido na construção de um tipo do domínio."""


class ConfigError(OptospringError, ValueError):
    """Arquivo de experimento ou combinação de opções inválida."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if field:
            location.append(f"campo '{field}'")
        if line is not None:
            location.append(f"linha {line}")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


class UnstableOperatingPointError(OptospringError):
    """Grandeza de equilíbrio pedida num ponto com amortecimento efetivo não positivo."""

    def __init__(self, message: str, gamma_eff: Optional[float] = None):
        self.gamma_eff = gamma_eff
        super().__init__(message)


class SimulationConfigError(OptospringError, ValueError):
    """Configuração de simulação incompatível com o ponto de operação."""


class FitError(OptospringError, RuntimeError):
    """Falha de convergência ou janela de ajuste degenerada."""


class SpectrumFileError(OptospringError, ValueError):
    """Arquivo de espectro malformado."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = path or "<espectro>"
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {message}")


class CalibrationError(OptospringError, ValueError):
    """Tom de calibração ausente, referência ausente ou extrapolação."""


class BackgroundOverlapError(OptospringError, ValueError):
    """Outro modo mecânico cai dentro da janela de ajuste."""
