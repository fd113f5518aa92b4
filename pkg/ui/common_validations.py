"""
Validações comuns das opções da linha de comando.
Cada função devolve {"valid": bool, "error": str, ...}.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from src.config import GlobalConfig
from ui.constants import ERROR_MESSAGES, LIMITS

logger = GlobalConfig.get_logger('validations')


def validate_power_options(power_in: Optional[float], power_cavity: Optional[float]) -> Dict[str, Any]:
    """
    Resolve a semântica de potência pedida na linha de comando.

    Args:
        power_in: Potência incidente (W)
        power_cavity: Potência intracavidade na ressonância, p_res (W)

    Returns:
        Resultado da validação com "power" e "power_mode" (None se nenhuma foi dada)
    """
    if power_in is not None and power_cavity is not None:
        logger.warning("Opções de potência conflitantes")
        return {"valid": False, "error": ERROR_MESSAGES["power_conflict"]}

    for value in (power_in, power_cavity):
        if value is not None and value <= 0:
            return {"valid": False, "error": f"Potência deve ser > 0 (recebido {value})"}

    if power_in is not None:
        return {"valid": True, "power": power_in, "power_mode": "incident"}
    if power_cavity is not None:
        return {"valid": True, "power": power_cavity, "power_mode": "intracavity"}
    return {"valid": True, "power": None, "power_mode": None}


def validate_detunings(phis: Sequence[float]) -> Dict[str, Any]:
    """Verifica se as dessintonias estão em (-3, 3)."""
    limit = LIMITS["detuning_limit"]
    for phi in phis:
        if not -limit < phi < limit:
            return {"valid": False, "error": ERROR_MESSAGES["detuning_range"].format(phi=phi, limit=limit)}
    return {"valid": True, "phis": tuple(phis)}


def validate_output_dir(path: str) -> Dict[str, Any]:
    """
    Garante que o diretório de saída existe e aceita escrita.

    Args:
        path: Diretório pedido

    Returns:
        Resultado da validação com "path" resolvido
    """
    target = Path(path)
    try:
        target.mkdir(parents=True, exist_ok=True)
        probe = target / ".write_probe"
        probe.write_text("", encoding="utf-8")
        probe.unlink()
    except OSError as e:
        logger.error(f"Diretório de saída inválido: {e}")
        return {"valid": False, "error": ERROR_MESSAGES["output_dir"].format(path=path, error=e)}
    return {"valid": True, "path": target}


def validate_spectrum_file(path: str) -> Dict[str, Any]:
    """Verifica existência e tamanho não nulo do arquivo de espectro."""
    target = Path(path)
    if not target.is_file():
        return {"valid": False, "error": ERROR_MESSAGES["spectrum_file"].format(error=f"'{path}' não encontrado")}
    if target.stat().st_size == 0:
        return {"valid": False, "error": ERROR_MESSAGES["spectrum_file"].format(error=f"'{path}' vazio")}
    return {"valid": True, "path": target}
