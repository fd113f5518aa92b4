"""
Arquivos de espectro e relatórios de ajuste.

Espectro: linhas '# chave=valor' (unidades, proveniência, resolution_bw,
convenção), depois o cabeçalho 'freq_hz,psd_m2_per_hz' e as linhas de dados.
A leitura é feita linha a linha para que erros apontem o número da linha.
"""

from pathlib import Path
from typing import Any, Dict, Mapping, Union

import numpy as np

from src.config import GlobalConfig
from src.exceptions import SpectrumFileError, ValidationError
from src.analysis.spectrum import PROVENANCES, NoiseSpectrum

logger = GlobalConfig.get_logger('spectrum_io')

COLUMNS = ("freq_hz", "psd_m2_per_hz")
PathLike = Union[str, Path]


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def write_spectrum(spectrum: NoiseSpectrum, path: PathLike, extra: Mapping[str, Any] = None) -> Path:
    """Grava o espectro unilateral com cabeçalho autodescritivo."""
    path = Path(path)
    header = {
        "units": "freq_hz [Hz], psd_m2_per_hz [m^2/Hz]",
        "convention": "one-sided",
        "provenance": spectrum.provenance,
        "resolution_bw": spectrum.resolution_bw,
    }
    header.update(spectrum.metadata)
    if extra:
        header.update(extra)

    lines = ["# optospring spectrum"]
    lines += [f"# {key}={_format_value(value)}" for key, value in header.items()]
    lines.append(",".join(COLUMNS))
    lines += [f"{f:.15g},{p:.15g}" for f, p in zip(spectrum.freqs, spectrum.psd)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Espectro gravado: {path} ({spectrum.freqs.size} pontos)")
    return path


def _parse_header_value(raw: str) -> Any:
    try:
        return float(raw)
    except ValueError:
        return raw


def read_spectrum(path: PathLike) -> NoiseSpectrum:
    """
    Lê um arquivo de espectro; os metadados do cabeçalho vão para spectrum.metadata.

    Raises:
        SpectrumFileError: Linha malformada, PSD negativa ou grade inválida
    """
    path = Path(path)
    name = str(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpectrumFileError(f"não foi possível ler: {e}", name) from e

    header: Dict[str, Any] = {}
    freqs, psd = [], []
    seen_columns = False
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if "=" in stripped:
                key, value = stripped[1:].split("=", 1)
                header[key.strip()] = _parse_header_value(value.strip())
            continue
        if not seen_columns:
            if tuple(part.strip() for part in stripped.split(",")) != COLUMNS:
                raise SpectrumFileError(f"cabeçalho de colunas esperado '{','.join(COLUMNS)}'", name, number)
            seen_columns = True
            continue
        parts = stripped.split(",")
        if len(parts) != 2:
            raise SpectrumFileError(f"esperadas 2 colunas, encontradas {len(parts)}", name, number)
        try:
            f, p = float(parts[0]), float(parts[1])
        except ValueError:
            raise SpectrumFileError(f"valor numérico inválido: '{stripped}'", name, number)
        if not (np.isfinite(f) and np.isfinite(p)):
            raise SpectrumFileError("valor não finito", name, number)
        if p < 0:
            raise SpectrumFileError(f"PSD negativa ({p:.6g})", name, number)
        if freqs and f <= freqs[-1]:
            raise SpectrumFileError("frequências devem ser estritamente crescentes", name, number)
        freqs.append(f)
        psd.append(p)

    if not seen_columns:
        raise SpectrumFileError("cabeçalho de colunas ausente", name)
    if len(freqs) < 2:
        raise SpectrumFileError("menos de dois pontos de dados", name)

    provenance = header.pop("provenance", "ingested")
    if provenance not in PROVENANCES:
        raise SpectrumFileError(f"proveniência desconhecida '{provenance}'", name)
    resolution_bw = header.pop("resolution_bw", None)
    for key in ("units", "convention"):
        header.pop(key, None)
    freqs_arr = np.asarray(freqs)
    if not isinstance(resolution_bw, float):
        resolution_bw = float((freqs_arr[-1] - freqs_arr[0]) / (freqs_arr.size - 1))

    try:
        return NoiseSpectrum(freqs_arr, np.asarray(psd), provenance, resolution_bw, header)
    except ValidationError as e:
        raise SpectrumFileError(str(e), name) from e


def format_report(values: Mapping[str, Any]) -> str:
    """Relatório estruturado 'chave=valor', uma entrada por linha, na ordem dada."""
    return "\n".join(f"{key}={_format_value(value)}" for key, value in values.items()) + "\n"


def write_report(values: Mapping[str, Any], path: PathLike) -> Path:
    path = Path(path)
    path.write_text(format_report(values), encoding="utf-8")
    logger.info(f"Relatório gravado: {path}")
    return path
