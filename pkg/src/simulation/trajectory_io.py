"""
Exportação e leitura de trajetórias.

Formato texto: linhas de cabeçalho '#', depois 'time_s,x_m'.
Formato bruto: cabeçalho de 16 bytes little-endian
    magic b'OSPR' (4) | versão uint32 (4) | dt float64 (8)
seguido das amostras em float64 little-endian.
"""

import struct
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd

from src.config import GlobalConfig
from src.exceptions import SpectrumFileError
from src.simulation.integrator import Trajectory

logger = GlobalConfig.get_logger('trajectory_io')

RAW_MAGIC = b"OSPR"
RAW_VERSION = 1
RAW_HEADER = struct.Struct("<4sId")

PathLike = Union[str, Path]


def write_trajectory_raw(trajectory: Trajectory, path: PathLike) -> Path:
    """Grava a trajetória no formato binário OSPR."""
    path = Path(path)
    with open(path, "wb") as handle:
        handle.write(RAW_HEADER.pack(RAW_MAGIC, RAW_VERSION, trajectory.dt))
        handle.write(np.asarray(trajectory.samples, dtype="<f8").tobytes())
    logger.info(f"Trajetória bruta gravada: {path} ({trajectory.samples.size} amostras)")
    return path


def read_trajectory_raw(path: PathLike) -> Tuple[float, np.ndarray]:
    """
    Lê um arquivo OSPR.

    Returns:
        Tupla (dt, amostras)

    Raises:
        SpectrumFileError: Magic, versão ou tamanho inválidos
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < RAW_HEADER.size:
        raise SpectrumFileError("arquivo menor que o cabeçalho", str(path))
    magic, version, dt = RAW_HEADER.unpack_from(data)
    if magic != RAW_MAGIC:
        raise SpectrumFileError(f"magic inválido {magic!r}", str(path))
    if version != RAW_VERSION:
        raise SpectrumFileError(f"versão não suportada {version}", str(path))
    payload = data[RAW_HEADER.size:]
    if len(payload) % 8:
        raise SpectrumFileError("carga útil não é múltipla de 8 bytes", str(path))
    return dt, np.frombuffer(payload, dtype="<f8").astype(float)


def write_trajectory_text(trajectory: Trajectory, path: PathLike) -> Path:
    """Grava 'time_s,x_m' com cabeçalho descrevendo unidades e origem."""
    path = Path(path)
    op = trajectory.op
    header = [
        "# optospring trajectory",
        "# units: time_s [s], x_m [m]",
        f"# dt_s={trajectory.dt:.15g}",
        f"# phi={op.phi:.15g}",
        f"# p_res_w={op.p_res:.15g}",
        f"# temperature_k={op.temperature_bath:.15g}",
        f"# seed={trajectory.config.seed}",
        f"# trajectory_index={trajectory.trajectory_index}",
        f"# scheme={trajectory.config.scheme}",
        f"# status={trajectory.status}",
    ]
    frame = pd.DataFrame({"time_s": trajectory.times, "x_m": trajectory.samples})
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(header) + "\n")
        frame.to_csv(handle, index=False, float_format="%.17g", lineterminator="\n")
    logger.info(f"Trajetória em texto gravada: {path}")
    return path


def read_trajectory_text(path: PathLike) -> Tuple[float, np.ndarray]:
    """Lê o formato texto; dt vem do cabeçalho ou do espaçamento da coluna de tempo."""
    path = Path(path)
    dt = None
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            if line.startswith("# dt_s="):
                dt = float(line.split("=", 1)[1])
    frame = pd.read_csv(path, comment="#")
    if list(frame.columns) != ["time_s", "x_m"]:
        raise SpectrumFileError(f"colunas inesperadas {list(frame.columns)}", str(path))
    if dt is None:
        if len(frame) < 2:
            raise SpectrumFileError("dt ausente e menos de duas amostras", str(path))
        dt = float(frame["time_s"].iloc[1] - frame["time_s"].iloc[0])
    return dt, frame["x_m"].to_numpy(dtype=float)
