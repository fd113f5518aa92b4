"""
Arquivo de experimento (TOML) com os parâmetros físicos e as grades de varredura.

Erros de sintaxe trazem linha/coluna; erros de campo trazem o caminho
pontuado do campo (ex.: 'cavity.finesse') e a linha em que ele aparece.
"""

import hashlib
import json
import math
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import GlobalConfig
from src.exceptions import ConfigError, SimulationConfigError, ValidationError
from src.model.types import CavitySetup, MechanicalMode, OperatingPoint
from src.simulation.integrator import SCHEMES, SimConfig

logger = GlobalConfig.get_logger('experiment_config')

POWER_MODES = ("incident", "intracavity")
DETUNING_LIMIT = 3.0
LENGTH_TOLERANCE = 0.05


@dataclass(frozen=True)
class SpectrumSeries:
    """Série de espectros a potência fixa."""

    name: str
    power_w: float
    power_mode: str
    detunings: Tuple[float, ...]


@dataclass(frozen=True)
class MapSettings:
    phi_min: float = -1.0
    phi_max: float = 1.0
    phi_count: int = 81
    power_max_w: float = 20.0
    power_count: int = 41
    contour_levels: Tuple[float, ...] = (0.5, 2.0, 5.0, 10.0)

    def phis(self) -> np.ndarray:
        return np.linspace(self.phi_min, self.phi_max, self.phi_count)

    def powers(self) -> np.ndarray:
        return np.linspace(0.0, self.power_max_w, self.power_count)


@dataclass(frozen=True)
class CalibrationSettings:
    drive_amplitude_m: float = 1e-13
    drive_freq_hz: float = 814e3
    incident_power_w: float = 50e-6


@dataclass(frozen=True)
class ExperimentConfig:
    """Parâmetros de um experimento completo."""

    modes: Tuple[MechanicalMode, ...]
    target_mode: str
    cavity: CavitySetup
    bath_temperature: float = 300.0
    power_mode: str = "incident"
    incident_powers: Tuple[float, ...] = ()
    intracavity_powers: Tuple[float, ...] = ()
    detunings: Tuple[float, ...] = ()
    spectrum_series: Tuple[SpectrumSeries, ...] = ()
    stability_map: MapSettings = field(default_factory=MapSettings)
    sim: Optional[SimConfig] = None
    welch_segment: Optional[int] = None
    calibration: CalibrationSettings = field(default_factory=CalibrationSettings)
    fit_window_fwhm: float = 20.0
    output_dir: str = GlobalConfig.OUTPUT_DIR
    source: str = ""

    def mode(self, name: Optional[str] = None) -> MechanicalMode:
        """Modo pelo nome (padrão: modo alvo)."""
        wanted = name or self.target_mode
        for candidate in self.modes:
            if candidate.name == wanted:
                return candidate
        raise ConfigError(f"modo '{wanted}' não definido", field="experiment.target_mode")

    def other_modes(self, name: Optional[str] = None) -> List[MechanicalMode]:
        target = self.mode(name)
        return [m for m in self.modes if m.name != target.name]

    def powers(self) -> Tuple[float, ...]:
        """Potências da varredura de resposta no modo de potência configurado."""
        return self.incident_powers if self.power_mode == "incident" else self.intracavity_powers

    def operating_point(self, phi: float, power: float, power_mode: Optional[str] = None,
                        mode_name: Optional[str] = None) -> OperatingPoint:
        """
        Ponto de operação a partir de uma potência incidente ou da potência
        intracavidade na ressonância (p_res).
        """
        mode = self.mode(mode_name)
        kind = power_mode or self.power_mode
        if kind == "incident":
            return OperatingPoint.from_incident_power(mode, self.cavity, phi, power, self.bath_temperature)
        if kind == "intracavity":
            return OperatingPoint(mode, self.cavity, phi, power, self.bath_temperature)
        raise ConfigError(f"modo de potência desconhecido '{kind}'", field="experiment.power_mode")

    def max_resonant_power(self) -> Optional[float]:
        """Maior p_res alcançável com as potências incidentes configuradas."""
        if not self.incident_powers:
            return None
        return self.cavity.coupling_slope * max(self.incident_powers)

    def with_overrides(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def fingerprint(self, extra: Optional[Mapping[str, Any]] = None) -> str:
        """sha256 do arquivo de origem e dos parâmetros da linha de comando."""
        digest = hashlib.sha256(self.source.encode("utf-8"))
        if extra:
            digest.update(json.dumps(extra, sort_keys=True, default=str).encode("utf-8"))
        return digest.hexdigest()


# ---------------------------------------------------------------------------
# Leitura
# ---------------------------------------------------------------------------

_HEADER = re.compile(r"^\s*\[\[?\s*([A-Za-z0-9_.\-\"' ]+?)\s*\]\]?\s*(#.*)?$")


def _find_header(lines: Sequence[str], name: str, occurrence: int = 0, after: int = 0) -> Optional[int]:
    """Índice da linha de [name] (ou da n-ésima [[name]]) a partir de after."""
    seen = 0
    for index in range(after, len(lines)):
        match = _HEADER.match(lines[index])
        if match and match.group(1).replace(" ", "") == name:
            if seen == occurrence:
                return index
            seen += 1
    return None


class _Reader:
    """
    Acesso tipado a uma tabela TOML com diagnósticos por campo.

    start é o índice da linha de cabeçalho da tabela; as chaves são procuradas
    entre esse cabeçalho e o próximo. Tabelas inline (sem cabeçalho próprio)
    reportam a linha da chave que as define.
    """

    def __init__(self, data: Mapping[str, Any], prefix: str, text: str,
                 start: Optional[int] = None, inline_line: Optional[int] = None):
        self.data = data
        self.prefix = prefix
        self.text = text
        self.lines = text.splitlines()
        self.start = start
        self.inline_line = inline_line

    def _path(self, key: str) -> str:
        return f"{self.prefix}.{key}" if self.prefix else key

    def _region(self) -> range:
        first = 0 if self.start is None else self.start + 1
        for index in range(first, len(self.lines)):
            if _HEADER.match(self.lines[index]):
                return range(first, index)
        return range(first, len(self.lines))

    def _line(self, key: str) -> Optional[int]:
        if self.inline_line is not None:
            return self.inline_line
        pattern = re.compile(rf"^\s*{re.escape(key)}\s*=")
        for index in self._region():
            if pattern.match(self.lines[index]):
                return index + 1
        # chave ausente: aponta para o cabeçalho da tabela
        return None if self.start is None else self.start + 1

    def child(self, data: Mapping[str, Any], name: str, occurrence: int = 0) -> "_Reader":
        """Leitor para o item `occurrence` do array de tabelas [[prefix.name]]."""
        path = self._path(name)
        after = 0 if self.start is None else self.start
        return _Reader(data, f"{path}[{occurrence}]", self.text,
                       start=_find_header(self.lines, path, occurrence, after))

    def fail(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, field=self._path(key), line=self._line(key))

    def number(self, key: str, default: Any = ..., positive: bool = False):
        if key not in self.data:
            if default is ...:
                raise self.fail(key, "campo obrigatório ausente")
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(key, f"esperado número, recebido {value!r}")
        if not math.isfinite(value):
            raise self.fail(key, f"valor não finito {value!r}")
        if positive and value <= 0:
            raise self.fail(key, f"deve ser > 0 (recebido {value!r})")
        return float(value)

    def integer(self, key: str, default: Any = ..., minimum: int = 1):
        if key not in self.data:
            if default is ...:
                raise self.fail(key, "campo obrigatório ausente")
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(key, f"esperado inteiro, recebido {value!r}")
        if value < minimum:
            raise self.fail(key, f"deve ser >= {minimum} (recebido {value!r})")
        return value

    def string(self, key: str, default: Any = ..., choices: Sequence[str] = ()):
        if key not in self.data:
            if default is ...:
                raise self.fail(key, "campo obrigatório ausente")
            return default
        value = self.data[key]
        if not isinstance(value, str):
            raise self.fail(key, f"esperado texto, recebido {value!r}")
        if choices and value not in choices:
            raise self.fail(key, f"valor '{value}' inválido (opções: {', '.join(choices)})")
        return value

    def numbers(self, key: str, default: Any = ..., positive: bool = False) -> Tuple[float, ...]:
        if key not in self.data:
            if default is ...:
                raise self.fail(key, "campo obrigatório ausente")
            return default
        values = self.data[key]
        if not isinstance(values, list):
            raise self.fail(key, f"esperada lista, recebido {values!r}")
        result = []
        for value in values:
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise self.fail(key, f"elemento inválido {value!r}")
            if positive and value <= 0:
                raise self.fail(key, f"elementos devem ser > 0 (recebido {value!r})")
            result.append(float(value))
        return tuple(result)

    def table(self, key: str) -> "_Reader":
        value = self.data.get(key, {})
        if not isinstance(value, dict):
            raise self.fail(key, "esperada tabela")
        path = self._path(key)
        header = _find_header(self.lines, path, after=0 if self.start is None else self.start)
        if header is None and key in self.data:
            return _Reader(value, path, self.text, inline_line=self._line(key))
        return _Reader(value, path, self.text, start=header)


def _detuning_grid(reader: _Reader) -> Tuple[float, ...]:
    if "detunings" in reader.data:
        grid = reader.numbers("detunings")
    elif "detuning_range" in reader.data:
        spec = reader.table("detuning_range")
        start = spec.number("start")
        stop = spec.number("stop")
        count = spec.integer("count", minimum=2)
        grid = tuple(float(v) for v in np.linspace(start, stop, count))
    else:
        raise reader.fail("detunings", "defina 'detunings' ou 'detuning_range'")
    if not grid:
        raise reader.fail("detunings", "grade de dessintonia vazia")
    for phi in grid:
        if not -DETUNING_LIMIT < phi < DETUNING_LIMIT:
            raise reader.fail("detunings", f"dessintonia {phi!r} fora de (-{DETUNING_LIMIT}, {DETUNING_LIMIT})")
    return grid


def _parse_modes(root: _Reader) -> Tuple[MechanicalMode, ...]:
    entries = root.data.get("modes")
    if not isinstance(entries, list) or not entries:
        raise ConfigError("pelo menos um [[modes]] é obrigatório", field="modes")
    modes = []
    for index, entry in enumerate(entries):
        reader = root.child(entry, "modes", index)
        name = reader.string("name")
        try:
            modes.append(MechanicalMode.from_frequency_hz(
                reader.number("frequency_hz", positive=True),
                reader.number("mass_kg", positive=True),
                reader.number("q_factor", positive=True),
                name=name,
            ))
        except ValidationError as e:
            raise ConfigError(str(e), field=reader.prefix, line=reader._line("name")) from e
    names = [m.name for m in modes]
    if len(set(names)) != len(names):
        raise ConfigError("nomes de modo repetidos", field="modes")
    return tuple(modes)


def _parse_cavity(reader: _Reader) -> CavitySetup:
    try:
        cavity = CavitySetup.from_bandwidth_hz(
            wavelength=reader.number("wavelength_m", positive=True),
            length=reader.number("length_m", positive=True),
            finesse=reader.number("finesse", positive=True),
            bandwidth_hz=reader.number("bandwidth_hz", positive=True),
            coupling_slope=reader.number("coupling_slope", positive=True),
        )
    except ValidationError as e:
        raise ConfigError(str(e), field="cavity") from e
    ratio = cavity.length_consistency()
    if abs(ratio - 1.0) > LENGTH_TOLERANCE:
        logger.warning(
            f"Banda da cavidade {cavity.bandwidth_hz:.4g} Hz difere de c·γ/(2L) por {100 * (ratio - 1):.1f}%"
        )
    return cavity


def _parse_series(reader: _Reader) -> Tuple[SpectrumSeries, ...]:
    entries = reader.data.get("series", [])
    if not isinstance(entries, list):
        raise reader.fail("series", "esperada lista de tabelas [[spectrum.series]]")
    series = []
    for index, entry in enumerate(entries):
        item = reader.child(entry, "series", index)
        if "incident_power_w" in entry:
            power, kind = item.number("incident_power_w", positive=True), "incident"
        elif "resonant_power_w" in entry:
            power, kind = item.number("resonant_power_w", positive=True), "intracavity"
        else:
            raise item.fail("incident_power_w", "defina 'incident_power_w' ou 'resonant_power_w'")
        series.append(SpectrumSeries(
            name=item.string("name", default=f"series{index}"),
            power_w=power,
            power_mode=kind,
            detunings=_detuning_grid(item),
        ))
    return tuple(series)


def _parse_simulation(reader: _Reader) -> Tuple[Optional[SimConfig], Optional[int]]:
    if not reader.data:
        return None, None
    try:
        sim = SimConfig(
            duration=reader.number("duration_s", positive=True),
            dt=reader.number("dt_s", default=None, positive=True),
            seed=reader.integer("seed", default=0, minimum=0),
            burn_in=reader.number("burn_in_s", default=0.0),
            n_trajectories=reader.integer("trajectories", default=1),
            initial_displacement=reader.number("initial_displacement_m", default=0.0),
            scheme=reader.string("scheme", default="kick-drift", choices=SCHEMES),
        )
    except SimulationConfigError as e:
        raise ConfigError(str(e), field="simulation") from e
    return sim, reader.integer("welch_segment", default=None, minimum=8)


def _parse_map(reader: _Reader) -> MapSettings:
    defaults = MapSettings()
    settings = MapSettings(
        phi_min=reader.number("phi_min", default=defaults.phi_min),
        phi_max=reader.number("phi_max", default=defaults.phi_max),
        phi_count=reader.integer("phi_count", default=defaults.phi_count, minimum=2),
        power_max_w=reader.number("power_max_w", default=defaults.power_max_w, positive=True),
        power_count=reader.integer("power_count", default=defaults.power_count, minimum=2),
        contour_levels=reader.numbers("contour_levels", default=defaults.contour_levels),
    )
    if settings.phi_min >= settings.phi_max:
        raise reader.fail("phi_max", "phi_max deve ser maior que phi_min")
    if not (-DETUNING_LIMIT < settings.phi_min and settings.phi_max < DETUNING_LIMIT):
        raise reader.fail("phi_min", f"faixa de dessintonia fora de (-{DETUNING_LIMIT}, {DETUNING_LIMIT})")
    return settings


def parse_experiment_config(text: str, origin: str = "<texto>") -> ExperimentConfig:
    """
    Converte o texto TOML num ExperimentConfig validado.

    Raises:
        ConfigError: Sintaxe inválida ou campo inválido
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = re.search(r"line (\d+)", str(e))
        raise ConfigError(f"{origin}: TOML inválido: {e}", line=int(match.group(1)) if match else None) from e

    root = _Reader(data, "", text)
    experiment = root.table("experiment")
    modes = _parse_modes(root)
    cavity = _parse_cavity(root.table("cavity"))

    target = experiment.string("target_mode", default=modes[0].name)
    if target not in {m.name for m in modes}:
        raise experiment.fail("target_mode", f"modo '{target}' não definido em [[modes]]")

    power_mode = experiment.string("power_mode", default="incident", choices=POWER_MODES)
    incident = experiment.numbers("incident_powers_w", default=(), positive=True)
    resonant = experiment.numbers("resonant_powers_w", default=(), positive=True)
    if power_mode == "incident" and not incident:
        raise experiment.fail("incident_powers_w", "lista de potências incidentes vazia")
    if power_mode == "intracavity" and not resonant:
        raise experiment.fail("resonant_powers_w", "lista de potências intracavidade vazia")

    temperature = experiment.number("bath_temperature_k", default=300.0)
    if temperature < 0:
        raise experiment.fail("bath_temperature_k", "temperatura negativa")

    sim, welch_segment = _parse_simulation(root.table("simulation"))
    calibration_reader = root.table("calibration")
    calibration = CalibrationSettings(
        drive_amplitude_m=calibration_reader.number("drive_amplitude_m", default=1e-13, positive=True),
        drive_freq_hz=calibration_reader.number("drive_freq_hz", default=814e3, positive=True),
        incident_power_w=calibration_reader.number("incident_power_w", default=50e-6, positive=True),
    )

    config = ExperimentConfig(
        modes=modes,
        target_mode=target,
        cavity=cavity,
        bath_temperature=temperature,
        power_mode=power_mode,
        incident_powers=incident,
        intracavity_powers=resonant,
        detunings=_detuning_grid(experiment),
        spectrum_series=_parse_series(root.table("spectrum")),
        stability_map=_parse_map(root.table("stability_map")),
        sim=sim,
        welch_segment=welch_segment,
        calibration=calibration,
        fit_window_fwhm=root.table("fit").number("window_fwhm", default=20.0, positive=True),
        output_dir=experiment.string("output_dir", default=GlobalConfig.OUTPUT_DIR),
        source=text,
    )
    logger.debug(f"Configuração carregada de {origin}: {len(modes)} modos, {len(config.detunings)} dessintonias")
    return config


def load_experiment_config(path: Union[str, Path, None] = None) -> ExperimentConfig:
    """
    Lê o arquivo de experimento (padrão: GlobalConfig.DEFAULT_CONFIG_PATH).

    Raises:
        ConfigError: Arquivo ausente ou inválido
    """
    path = Path(path or GlobalConfig.DEFAULT_CONFIG_PATH)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"não foi possível ler '{path}': {e}") from e
    return parse_experiment_config(text, str(path))
