"""
Serviço de varreduras que implementa a abstração ISweepService.
Uma operação por comando da CLI; cada uma grava seus arquivos e devolve
um resumo {"status", "files", ...}.
"""

import math
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.analysis.calibration import apply_calibration, build_calibration, read_calibration, write_calibration
from src.analysis.fitting import auto_window, fit_lorentzian
from src.analysis.spectrum_io import write_report, write_spectrum
from src.analysis.temperature import background_corrected_temperature, observable_temperature, temperature_from_area
from src.config import GlobalConfig
from src.exceptions import BackgroundOverlapError, ConfigError, SimulationConfigError
from src.interfaces import IProviderRegistry, ISweepService
from src.model.optomechanics import effective_dynamics
from src.providers import SpectrumRequest
from src.simulation.integrator import ensemble_temperature, integrate, run_ensemble
from src.simulation.ringdown import ringdown_rate
from src.simulation.trajectory_io import write_trajectory_raw
from src.sweeps.experiment_config import ExperimentConfig, SpectrumSeries
from src.sweeps.grid import evaluate_grid
from src.sweeps.stability_map import compute_stability_map
from ui.constants import COLUMN_UNITS, ERROR_MESSAGES, OUTPUT_FILES, SUCCESS_MESSAGES
from utils.helpers import measure_execution_time, write_csv

logger = GlobalConfig.get_logger('sweep_service')

STATUS_OK = "ok"
STATUS_UNSTABLE_ONLY = "unstable_only"


def _units(columns: Sequence[str]) -> str:
    return ", ".join(f"{column} [{COLUMN_UNITS.get(column, '-')}]" for column in columns)


def _relative_error(simulated: float, expected: float) -> float:
    if expected == 0:
        return math.nan
    return abs(simulated - expected) / abs(expected)


class SweepService(ISweepService):
    """
    Serviço de alto nível para os comandos da CLI.
    Obtém espectros pelo registro de provedores (abstração injetada).
    """

    def __init__(self, provider_registry: IProviderRegistry, workers: Optional[int] = None):
        """
        Inicializa o serviço com dependência injetada.

        Args:
            provider_registry: Registro de provedores de espectro
            workers: Limite de processos (padrão: GlobalConfig)
        """
        self._provider_registry = provider_registry
        self._workers = workers
        logger.debug("SweepService inicializado")

    def get_name(self) -> str:
        return "SweepService"

    # ------------------------------------------------------------------
    # Utilitários
    # ------------------------------------------------------------------

    @staticmethod
    def _output_dir(config: ExperimentConfig) -> Path:
        path = Path(config.output_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    @staticmethod
    def _header(config: ExperimentConfig, command: str, columns: Sequence[str],
                extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        mode = config.mode()
        header = {
            "optospring": command,
            "units": _units(columns),
            "config_sha256": config.fingerprint({"command": command, **(extra or {})}),
            "mode": mode.name,
            "mode_frequency_hz": mode.frequency_hz,
            "bath_temperature_k": config.bath_temperature,
        }
        if extra:
            header.update(extra)
        return header

    def _series(self, config: ExperimentConfig, phis: Optional[Sequence[float]], power: Optional[float],
                power_mode: Optional[str]) -> List[SpectrumSeries]:
        if phis:
            if power is None:
                if not config.spectrum_series:
                    raise ConfigError("nenhuma potência informada e nenhuma série configurada", field="spectrum.series")
                base = config.spectrum_series[0]
                power, power_mode = base.power_w, base.power_mode
            return [SpectrumSeries("cli", power, power_mode or config.power_mode, tuple(phis))]

        if not config.spectrum_series:
            raise ConfigError("nenhuma série de espectros configurada; use --phi", field="spectrum.series")
        if power is None:
            return list(config.spectrum_series)
        return [replace(series, power_w=power, power_mode=power_mode or series.power_mode)
                for series in config.spectrum_series]

    # ------------------------------------------------------------------
    # Comandos
    # ------------------------------------------------------------------

    @measure_execution_time
    def spectrum(self, config: ExperimentConfig, phis: Optional[Sequence[float]] = None, power: Optional[float] = None,
                 power_mode: Optional[str] = None, svg: bool = False) -> Dict[str, Any]:
        """
        Um espectro em forma fechada por dessintonia; pontos instáveis são
        registrados e ignorados.

        Returns:
            {"status", "files", "skipped"}; status "unstable_only" se nada foi gravado
        """
        out = self._output_dir(config)
        files: List[Path] = []
        skipped: List[Tuple[str, float]] = []

        for series in self._series(config, phis, power, power_mode):
            plotted = []
            for phi in series.detunings:
                op = config.operating_point(phi, series.power_w, series.power_mode)
                dyn = effective_dynamics(op, area_check=False)
                if not dyn.stable:
                    logger.warning(SUCCESS_MESSAGES["skipped_unstable"].format(phi=phi, ratio=dyn.damping_ratio))
                    skipped.append((series.name, phi))
                    continue

                spectrum = self._provider_registry.get_spectrum("closed-form", SpectrumRequest(op=op))
                path = out / OUTPUT_FILES["spectrum"].format(series=series.name, phi=phi)
                extra = {
                    "series": series.name,
                    "phi": float(phi),
                    "power_w": float(series.power_w),
                    "power_mode": series.power_mode,
                    "p_res_w": op.p_res,
                    "mode": op.mode.name,
                    "t_eff_k": dyn.t_eff,
                    "config_sha256": config.fingerprint({"command": "spectrum", "series": series.name, "phi": phi,
                                                         "power": series.power_w}),
                }
                files.append(write_spectrum(spectrum, path, extra))
                plotted.append((f"φ = {phi:+.3g}", spectrum))

            if svg and plotted:
                from ui.svg_charts import spectra_overlay
                title = f"{series.name}: {series.power_w * 1e3:.3g} mW ({series.power_mode})"
                files.append(spectra_overlay(plotted, out / OUTPUT_FILES["spectrum_svg"].format(series=series.name), title))

        status = STATUS_UNSTABLE_ONLY if skipped and not files else STATUS_OK
        if status == STATUS_UNSTABLE_ONLY:
            logger.warning(ERROR_MESSAGES["all_unstable"])
        return {"status": status, "files": files, "skipped": skipped}

    @measure_execution_time
    def response_sweep(self, config: ExperimentConfig, svg: bool = False) -> Dict[str, Any]:
        """Deslocamento de frequência e razão de amortecimento na grade (potência, φ)."""
        powers = config.powers()
        if not powers:
            raise ConfigError(f"nenhuma potência configurada para o modo '{config.power_mode}'",
                              field="experiment.incident_powers_w")
        frame = evaluate_grid(config.mode(), config.cavity, config.bath_temperature, powers,
                              config.detunings, config.power_mode, self._workers)

        out = self._output_dir(config)
        header = self._header(config, "response-sweep", frame.columns, {"power_mode": config.power_mode})
        files = [write_csv(frame, out / OUTPUT_FILES["response"], header)]
        if svg:
            from ui.svg_charts import response_curves
            files.append(response_curves(frame, out / OUTPUT_FILES["response_svg"]))

        status = STATUS_OK if frame["stable"].any() else STATUS_UNSTABLE_ONLY
        return {"status": status, "files": files, "unstable_cells": int((~frame["stable"]).sum())}

    @measure_execution_time
    def stability_map(self, config: ExperimentConfig, svg: bool = False) -> Dict[str, Any]:
        """
        Mapa Γ_eff/Γ_m no plano (φ, P intracavidade), fronteira refinada e iso-curvas.

        No modo de potência incidente, células fora do alcance da curva de
        Airy (P > inclinação·max(P_in)/(1+φ²)) ficam NaN.
        """
        settings = config.stability_map
        limit = config.max_resonant_power() if config.power_mode == "incident" else None
        stability = compute_stability_map(
            config.mode(), config.cavity, settings.phis(), settings.powers(), config.bath_temperature,
            max_resonant_power=limit, contour_levels=settings.contour_levels, workers=self._workers,
        )

        finite = stability.damping_ratio[np.isfinite(stability.damping_ratio)]
        scale = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)

        out = self._output_dir(config)
        map_frame = stability.to_frame()
        boundary = stability.boundary_frame(config.cavity.coupling_slope)
        contours = stability.contours_frame()
        common = {
            "power_axis": "intracavity power at phi",
            "max_resonant_power_w": limit if limit is not None else "none",
        }
        files = [
            write_csv(map_frame, out / OUTPUT_FILES["map"], self._header(
                config, "stability-map", map_frame.columns,
                {**common, "color_scale_min": scale[0], "color_scale_max": scale[1]})),
            write_csv(boundary, out / OUTPUT_FILES["map_boundary"],
                      self._header(config, "stability-map/boundary", boundary.columns, common)),
            write_csv(contours, out / OUTPUT_FILES["map_contours"], self._header(
                config, "stability-map/contours", contours.columns,
                {**common, "levels": " ".join(f"{level:g}" for level in settings.contour_levels)})),
        ]
        if svg:
            from ui.svg_charts import stability_heatmap
            stability_heatmap(stability, out / OUTPUT_FILES["map_svg"])
            files.append(out / OUTPUT_FILES["map_svg"])

        return {"status": STATUS_OK, "files": files, "boundary_points": len(boundary), "color_scale": scale}

    @measure_execution_time
    def temperature_sweep(self, config: ExperimentConfig, with_background: bool = True,
                          svg: bool = False) -> Dict[str, Any]:
        """T_eff do modo isolado e temperatura observável com o fundo dos outros modos."""
        others = config.other_modes() if with_background else []
        rows = []
        for power in config.powers():
            for phi in config.detunings:
                op = config.operating_point(phi, power)
                dyn = effective_dynamics(op, area_check=False)
                single = dyn.t_eff if dyn.stable else math.nan
                observed = math.nan
                if dyn.stable:
                    try:
                        observed = observable_temperature(op, others, config.fit_window_fwhm)
                    except BackgroundOverlapError as e:
                        logger.warning(f"phi={phi:.4g}: {e}")
                rows.append({
                    "power_w": power,
                    "phi": phi,
                    "t_eff_single_k": single,
                    "t_eff_with_background_k": observed,
                    "stable": dyn.stable,
                })

        frame = pd.DataFrame(rows, columns=["power_w", "phi", "t_eff_single_k", "t_eff_with_background_k", "stable"])
        out = self._output_dir(config)
        header = self._header(config, "temperature-sweep", frame.columns, {
            "power_mode": config.power_mode,
            "background_modes": " ".join(m.name for m in others) or "none",
            "window_fwhm": config.fit_window_fwhm,
        })
        files = [write_csv(frame, out / OUTPUT_FILES["temperature"], header)]
        if svg:
            from ui.svg_charts import temperature_curves
            files.append(temperature_curves(frame, out / OUTPUT_FILES["temperature_svg"]))

        status = STATUS_OK if frame["stable"].any() else STATUS_UNSTABLE_ONLY
        return {"status": status, "files": files}

    @measure_execution_time
    def simulate(self, config: ExperimentConfig, phi: float, power: float, power_mode: str) -> Dict[str, Any]:
        """
        Simulação temporal comparada ao modelo em forma fechada.

        Ponto estável: trajetória, espectro de Welch, ajuste e tabela
        simulado vs forma fechada. Ponto instável: relatório da taxa de
        crescimento no lugar do espectro.

        Raises:
            SimulationConfigError: Configuração sem tabela [simulation]
            FitError: Ajuste do espectro simulado sem convergência
        """
        if config.sim is None:
            raise SimulationConfigError(ERROR_MESSAGES["no_simulation"])

        op = config.operating_point(phi, power, power_mode)
        sim = config.sim.resolved(op)
        dyn = effective_dynamics(op)
        out = self._output_dir(config)

        if not dyn.stable:
            return self._simulate_unstable(config, op, sim, dyn, out)

        trajectories = tuple(run_ensemble(op, sim, self._workers))
        request = SpectrumRequest(op=op, sim=sim, segment_len=config.welch_segment, trajectories=trajectories)
        spectrum = self._provider_registry.get_spectrum("simulated", request)

        fit = fit_lorentzian(spectrum, auto_window(spectrum, config.fit_window_fwhm))
        t_fit = temperature_from_area(fit, op.mode)
        t_variance = ensemble_temperature(trajectories, dyn.omega_eff)

        comparison = pd.DataFrame(
            [
                ("omega_eff_rad_s", 2 * math.pi * fit.center, dyn.omega_eff),
                ("gamma_eff_rad_s", 2 * math.pi * fit.fwhm, dyn.gamma_eff),
                ("t_eff_k", t_fit, dyn.t_eff),
                ("t_eff_variance_k", t_variance, dyn.t_eff),
            ],
            columns=["quantity", "simulated", "closed_form"],
        )
        comparison["relative_error"] = [
            _relative_error(s, c) for s, c in zip(comparison["simulated"], comparison["closed_form"])
        ]

        params = {"phi": float(phi), "power_w": float(power), "power_mode": power_mode,
                  "seed": sim.seed, "trajectories": sim.n_trajectories, "dt_s": sim.dt,
                  "duration_s": sim.duration, "scheme": sim.scheme}
        files = [
            write_trajectory_raw(trajectories[0], out / OUTPUT_FILES["trajectory"].format(phi=phi)),
            write_spectrum(spectrum, out / OUTPUT_FILES["sim_spectrum"].format(phi=phi), {
                **params, "mode": op.mode.name,
                "config_sha256": config.fingerprint({"command": "simulate", **params}),
            }),
            write_csv(comparison, out / OUTPUT_FILES["sim_comparison"].format(phi=phi),
                      self._header(config, "simulate", comparison.columns, params)),
        ]
        report = {"status": "ok", **params, **fit.as_dict(),
                  "t_eff_fit_k": t_fit, "t_eff_variance_k": t_variance, "t_eff_closed_form_k": dyn.t_eff}
        files.append(write_report(report, out / OUTPUT_FILES["sim_report"].format(phi=phi)))
        return {"status": STATUS_OK, "files": files, "comparison": comparison, "fit": fit}

    def _simulate_unstable(self, config, op, sim, dyn, out: Path) -> Dict[str, Any]:
        logger.warning(f"phi={op.phi:.4g} instável (Γ_eff = {dyn.gamma_eff:.4g} rad/s): medindo taxa de crescimento")
        trajectory = integrate(op, replace(sim, n_trajectories=1))
        estimate = ringdown_rate(trajectory)
        growth = -estimate.rate
        expected = -dyn.gamma_eff / 2.0

        report = {
            "status": "unstable growth",
            "phi": float(op.phi),
            "p_res_w": op.p_res,
            "seed": sim.seed,
            "trajectory_status": trajectory.status,
            "samples": int(trajectory.samples.size),
            "growth_rate_rad_s": growth,
            "growth_rate_expected_rad_s": expected,
            "relative_error": _relative_error(growth, expected),
            "r_squared": estimate.r_squared,
            "good_fit": estimate.good_fit,
        }
        files = [
            write_trajectory_raw(trajectory, out / OUTPUT_FILES["trajectory"].format(phi=op.phi)),
            write_report(report, out / OUTPUT_FILES["sim_report"].format(phi=op.phi)),
        ]
        return {"status": STATUS_UNSTABLE_ONLY, "files": files, "growth": estimate, "expected_growth": expected}

    @measure_execution_time
    def fit(self, spectrum_path: str, config: ExperimentConfig, calibration_path: Optional[str] = None,
            phi: Optional[float] = None) -> Dict[str, Any]:
        """
        Ajuste de um espectro em arquivo, com calibração opcional, e as duas
        rotas de temperatura (área e largura de linha).

        Raises:
            SpectrumFileError: Arquivo malformado
            CalibrationError: phi fora da faixa da tabela
            FitError: Ajuste sem convergência
        """
        spectrum = self._provider_registry.get_spectrum("ingested", SpectrumRequest(path=str(spectrum_path)))
        if phi is None and isinstance(spectrum.metadata.get("phi"), float):
            phi = spectrum.metadata["phi"]

        gain = 1.0
        if calibration_path:
            if phi is None:
                raise ConfigError(ERROR_MESSAGES["missing_phi"].format(path=spectrum_path), field="phi")
            table = read_calibration(calibration_path)
            gain = table.gain(phi)
            spectrum = apply_calibration(spectrum, table, phi)

        mode = config.mode()
        window = auto_window(spectrum, config.fit_window_fwhm)
        fit = fit_lorentzian(spectrum, window)
        t_area = temperature_from_area(fit, mode)
        t_linewidth = config.bath_temperature * mode.gamma_m / (2 * math.pi * fit.fwhm)

        report: Dict[str, Any] = {
            "source": str(spectrum_path),
            "mode": mode.name,
            "phi": phi if phi is not None else "unknown",
            "calibration_gain": gain,
            **fit.as_dict(),
            "t_eff_area_k": t_area,
            "t_eff_linewidth_k": t_linewidth,
        }

        others = config.other_modes()
        if others:
            try:
                corrected = background_corrected_temperature(spectrum, mode, others, config.bath_temperature, window)
                report["t_eff_background_corrected_k"] = corrected.temperature_k
                report["background_reliable"] = corrected.reliable
            except BackgroundOverlapError as e:
                logger.warning(f"Correção de fundo ignorada: {e}")

        out = self._output_dir(config)
        path = write_report(report, out / OUTPUT_FILES["fit_report"].format(stem=Path(spectrum_path).stem))
        return {"status": STATUS_OK, "files": [path], "fit": fit, "report": report}

    @measure_execution_time
    def calibrate(self, spectrum_paths: Sequence[str], config: ExperimentConfig) -> Dict[str, Any]:
        """
        Tabela de ganho a partir de espectros com o tom de calibração; cada
        arquivo informa seu phi no cabeçalho.
        """
        spectra = []
        for path in spectrum_paths:
            spectrum = self._provider_registry.get_spectrum("ingested", SpectrumRequest(path=str(path)))
            phi = spectrum.metadata.get("phi")
            if not isinstance(phi, float):
                raise ConfigError(ERROR_MESSAGES["missing_phi"].format(path=path), field="phi")
            spectra.append((phi, spectrum))

        settings = config.calibration
        table = build_calibration(spectra, settings.drive_amplitude_m, settings.drive_freq_hz)
        path = write_calibration(table, self._output_dir(config) / OUTPUT_FILES["calibration"])
        return {"status": STATUS_OK, "files": [path], "table": table}
