"""
optospring: linha de comando para reproduzir as curvas do efeito de mola
óptica (espectros, varreduras, mapa de estabilidade, simulações e ajustes).

Uso:
    python app.py <comando> --config config/defaults.toml [opções]
"""

import sys
from dataclasses import replace
from typing import Any, Callable, Dict, Optional, Sequence

import click

from src.config import GlobalConfig
from src.dependency_bootstrap import configure_dependencies, get_dependency_info, get_sweep_service
from src.exceptions import (
    BackgroundOverlapError,
    CalibrationError,
    ConfigError,
    FitError,
    OptospringError,
    SimulationConfigError,
    SpectrumFileError,
    UnstableOperatingPointError,
    ValidationError,
)
from src.sweeps.experiment_config import ExperimentConfig, load_experiment_config
from ui.common_validations import (
    validate_detunings,
    validate_output_dir,
    validate_power_options,
    validate_spectrum_file,
)
from ui.constants import ERROR_MESSAGES, EXIT_CODES, SUCCESS_MESSAGES
from utils.helpers import format_duration

logger = GlobalConfig.get_logger('app')

# Exceção -> código de saída
EXIT_MAP = (
    ((ConfigError, ValidationError, SimulationConfigError, SpectrumFileError,
      CalibrationError, BackgroundOverlapError), EXIT_CODES["config_error"]),
    ((UnstableOperatingPointError,), EXIT_CODES["unstable_only"]),
    ((FitError,), EXIT_CODES["fit_failure"]),
)


def _fail(message: str, code: int) -> None:
    click.secho(message, fg='red', bold=True, err=True)
    sys.exit(code)


def _check(result: Dict[str, Any]) -> Dict[str, Any]:
    if not result["valid"]:
        _fail(result["error"], EXIT_CODES["config_error"])
    return result


def _run(command: str, action: Callable[[], Dict[str, Any]]) -> None:
    """Executa o comando, imprime os arquivos gravados e mapeia erros em códigos de saída."""
    try:
        result = action()
    except OptospringError as e:
        code = next((code for group, code in EXIT_MAP if isinstance(e, group)), EXIT_CODES["config_error"])
        logger.error(f"{command}: {e}")
        template = ERROR_MESSAGES["fit_failed"] if code == EXIT_CODES["fit_failure"] else ERROR_MESSAGES["config"]
        _fail(template.format(error=e), code)

    for path in result.get("files", []):
        click.echo(SUCCESS_MESSAGES["file_written"].format(path=path))
    if "execution_time" in result:
        logger.info(SUCCESS_MESSAGES["command_done"].format(
            command=command, duration=format_duration(result["execution_time"])))
    logger.debug(f"Dependências: {get_dependency_info()}")

    if result.get("status") == "unstable_only":
        click.secho(ERROR_MESSAGES["all_unstable"], fg='yellow', err=True)
        sys.exit(EXIT_CODES["unstable_only"])
    click.secho(f"{command}: ok", fg='green', bold=True)


def _load(ctx: click.Context, mode: Optional[str] = None) -> ExperimentConfig:
    """Lê o arquivo de experimento e aplica as sobreposições globais da linha de comando."""
    options = ctx.ensure_object(dict)
    try:
        config = load_experiment_config(options.get("config"))
        changes: Dict[str, Any] = {}
        if options.get("out"):
            changes["output_dir"] = str(_check(validate_output_dir(options["out"]))["path"])
        if mode:
            changes["target_mode"] = mode
        if options.get("seed") is not None:
            if config.sim is None:
                raise ConfigError(ERROR_MESSAGES["no_simulation"], field="simulation")
            changes["sim"] = replace(config.sim, seed=options["seed"])
        if changes:
            config = config.with_overrides(**changes)
        config.mode()
    except (ConfigError, ValidationError, SimulationConfigError) as e:
        logger.error(f"Configuração inválida: {e}")
        _fail(ERROR_MESSAGES["config"].format(error=e), EXIT_CODES["config_error"])
    return config


def _phis(values: Sequence[float]) -> Optional[tuple]:
    if not values:
        return None
    return _check(validate_detunings(values))["phis"]


def _store(ctx: click.Context, param: click.Parameter, value: Any) -> Any:
    if value is not None:
        ctx.ensure_object(dict)[param.name] = value
    return value


def _experiment_options(func):
    """--config, --out e --seed, aceitas antes ou depois do subcomando."""
    func = click.option('--seed', type=int, default=None, expose_value=False, callback=_store,
                        help='Semente das simulações.')(func)
    func = click.option('-o', '--out', type=click.Path(file_okay=False), default=None, expose_value=False,
                        callback=_store, help='Diretório de saída.')(func)
    func = click.option('-c', '--config', type=click.Path(dir_okay=False), default=None, expose_value=False,
                        callback=_store,
                        help='Arquivo de experimento TOML (padrão: OPTOSPRING_CONFIG ou config/defaults.toml).')(func)
    return func


@click.group(name="optospring")
@_experiment_options
@click.option('-w', '--workers', type=int, default=None, help='Limite de processos (padrão: OPTOSPRING_WORKERS).')
@click.pass_context
def optospring(ctx, workers):
    """Efeito de mola óptica: modelo, simulação e análise espectral."""
    ctx.ensure_object(dict)
    logger.debug(f"Configuração de processo: {GlobalConfig.get_debug_info()}")
    configure_dependencies(workers)


def _common_options(func):
    func = click.option('--mode', default=None, help='Modo mecânico alvo (nome em [[modes]]).')(func)
    func = click.option('--svg', is_flag=True, help='Gera também o gráfico SVG.')(func)
    return func


def _power_options(func):
    func = click.option('--power-cavity', type=float, default=None,
                        help='Potência intracavidade na ressonância p_res (W).')(func)
    func = click.option('--power-in', type=float, default=None, help='Potência incidente (W).')(func)
    return func


@optospring.command()
@_experiment_options
@click.option('--phi', type=float, multiple=True, help='Dessintonia (repetível); padrão: séries do arquivo.')
@_power_options
@_common_options
@click.pass_context
def spectrum(ctx, phi, power_in, power_cavity, mode, svg):
    """Espectros de ruído térmico em forma fechada."""
    power = _check(validate_power_options(power_in, power_cavity))
    phis = _phis(phi)
    config = _load(ctx, mode)
    _run("spectrum", lambda: get_sweep_service().spectrum(config, phis, power["power"], power["power_mode"], svg))


@optospring.command(name="response-sweep")
@_experiment_options
@click.option('--phi', type=float, multiple=True, help='Substitui a grade de dessintonias.')
@_power_options
@_common_options
@click.pass_context
def response_sweep(ctx, phi, power_in, power_cavity, mode, svg):
    """Deslocamento de frequência e razão de amortecimento vs dessintonia."""
    config = _with_grid(_load(ctx, mode), _phis(phi), _check(validate_power_options(power_in, power_cavity)))
    _run("response-sweep", lambda: get_sweep_service().response_sweep(config, svg))


@optospring.command(name="stability-map")
@_experiment_options
@_common_options
@click.pass_context
def stability_map(ctx, mode, svg):
    """Mapa de Γ_eff/Γ_m no plano (φ, P), fronteira e iso-curvas."""
    config = _load(ctx, mode)
    _run("stability-map", lambda: get_sweep_service().stability_map(config, svg))


@optospring.command(name="temperature-sweep")
@_experiment_options
@click.option('--phi', type=float, multiple=True, help='Substitui a grade de dessintonias.')
@_power_options
@click.option('--no-background', is_flag=True, help='Ignora as caudas dos outros modos.')
@_common_options
@click.pass_context
def temperature_sweep(ctx, phi, power_in, power_cavity, no_background, mode, svg):
    """Temperatura efetiva vs dessintonia, com e sem o fundo dos outros modos."""
    config = _with_grid(_load(ctx, mode), _phis(phi), _check(validate_power_options(power_in, power_cavity)))
    _run("temperature-sweep", lambda: get_sweep_service().temperature_sweep(config, not no_background, svg))


@optospring.command()
@_experiment_options
@click.option('--phi', type=float, required=True, help='Dessintonia do ponto simulado.')
@_power_options
@click.option('--mode', default=None, help='Modo mecânico alvo (nome em [[modes]]).')
@click.pass_context
def simulate(ctx, phi, power_in, power_cavity, mode):
    """Simulação de Langevin comparada à forma fechada."""
    power = _check(validate_power_options(power_in, power_cavity))
    _check(validate_detunings([phi]))
    config = _load(ctx, mode)
    value, power_mode = power["power"], power["power_mode"]
    if value is None:
        if not config.powers():
            _fail(ERROR_MESSAGES["config"].format(error="informe --power-in ou --power-cavity"),
                  EXIT_CODES["config_error"])
        value, power_mode = max(config.powers()), config.power_mode
    _run("simulate", lambda: get_sweep_service().simulate(config, phi, value, power_mode))


@optospring.command()
@_experiment_options
@click.argument('spectrum_file', type=click.Path(dir_okay=False))
@click.option('--calibration', type=click.Path(dir_okay=False), default=None, help='Tabela de calibração.')
@click.option('--phi', type=float, default=None, help='Dessintonia do espectro (padrão: cabeçalho do arquivo).')
@click.option('--mode', default=None, help='Modo mecânico alvo (nome em [[modes]]).')
@click.pass_context
def fit(ctx, spectrum_file, calibration, phi, mode):
    """Ajuste lorentziano e temperaturas de um espectro em arquivo."""
    _check(validate_spectrum_file(spectrum_file))
    if calibration:
        _check(validate_spectrum_file(calibration))
    config = _load(ctx, mode)
    _run("fit", lambda: get_sweep_service().fit(spectrum_file, config, calibration, phi))


@optospring.command()
@_experiment_options
@click.argument('spectrum_files', nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.pass_context
def calibrate(ctx, spectrum_files):
    """Tabela de ganho de detecção a partir de espectros com o tom de calibração."""
    for path in spectrum_files:
        _check(validate_spectrum_file(path))
    config = _load(ctx)
    _run("calibrate", lambda: get_sweep_service().calibrate(spectrum_files, config))


def _with_grid(config: ExperimentConfig, phis: Optional[tuple], power: Dict[str, Any]) -> ExperimentConfig:
    """Sobrepõe a grade de dessintonias e a potência da varredura."""
    changes: Dict[str, Any] = {}
    if phis:
        changes["detunings"] = phis
    if power["power"] is not None:
        changes["power_mode"] = power["power_mode"]
        key = "incident_powers" if power["power_mode"] == "incident" else "intracavity_powers"
        changes[key] = (power["power"],)
    return config.with_overrides(**changes) if changes else config


if __name__ == "__main__":
    optospring()
