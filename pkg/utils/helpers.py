"""
Funções auxiliares e utilitários para o sistema.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Iterable, List, Mapping, Optional, Union

import pandas as pd

from src.config import GlobalConfig

logger = GlobalConfig.get_logger('helpers')

FLOAT_FORMAT = "%.15g"

def measure_execution_time(func):
    """Decorator para medir tempo de execução de funções"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        execution_time = round(time.perf_counter() - start_time, 3)
        logger.debug(f"{func.__name__} executado em {format_duration(execution_time)}")

        # Adiciona informação de tempo ao resultado se for dict
        if isinstance(result, dict) and "error" not in result:
            result["execution_time"] = execution_time

        return result
    return wrapper

def format_duration(seconds: float) -> str:
    """
    Formata duração em formato legível.

    Args:
        seconds: Duração em segundos

    Returns:
        String formatada
    """
    if seconds < 1:
        return f"{seconds*1000:.0f}ms"
    elif seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        minutes = seconds // 60
        secs = seconds % 60
        return f"{minutes:.0f}m {secs:.0f}s"
    else:
        hours = seconds // 3600
        minutes = (seconds % 3600) // 60
        return f"{hours:.0f}h {minutes:.0f}m"

def format_float(value: Optional[float]) -> str:
    """Formato numérico canônico das saídas ('%.15g'; 'nan' para ausente)."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return FLOAT_FORMAT % value

def write_csv(frame: pd.DataFrame, path: Union[str, Path], header: Mapping[str, Any]) -> Path:
    """
    Grava um CSV com cabeçalho '#' autodescritivo.

    Sem carimbo de data: a mesma entrada produz os mesmos bytes.

    Args:
        frame: Tabela a gravar
        path: Arquivo de destino
        header: Pares chave -> valor escritos como '# chave: valor'

    Returns:
        Caminho gravado
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for key, value in header.items():
            text = format_float(value) if isinstance(value, float) else str(value)
            handle.write(f"# {key}: {text}\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    logger.info(f"CSV gravado: {path} ({len(frame)} linhas)")
    return path

def parallel_map(func: Callable[[Any], Any], items: Iterable[Any], workers: Optional[int] = None) -> List[Any]:
    """
    map() em processos, preservando a ordem dos itens.

    Com um worker (ou um item) roda no processo atual.
    """
    items = list(items)
    n_workers = min(GlobalConfig.get_workers(workers), max(len(items), 1))
    if n_workers <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(func, items))
