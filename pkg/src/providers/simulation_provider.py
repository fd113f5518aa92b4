"""
Provedor de espectros estimados a partir de trajetórias simuladas.
"""

from src.analysis.spectrum import average_spectra, welch_psd
from src.config import GlobalConfig
from src.exceptions import SimulationConfigError, UnstableOperatingPointError, ValidationError
from src.providers.base_provider import BaseProvider, SpectrumRequest
from src.simulation.integrator import run_ensemble

logger = GlobalConfig.get_logger('simulation_provider')


class SimulationProvider(BaseProvider):
    """Média de Welch sobre um ensemble de trajetórias."""

    def __init__(self):
        super().__init__("simulated")

    def _setup(self):
        self.status = "available"

    def _spectrum_impl(self, request: SpectrumRequest):
        trajectories = request.trajectories
        if trajectories is None:
            if request.op is None:
                raise ValidationError("ponto de operação obrigatório para simulação")
            if request.sim is None:
                raise SimulationConfigError("configuração de simulação ausente")
            trajectories = run_ensemble(request.op, request.sim, request.workers)
        if not trajectories:
            raise ValidationError("ensemble de trajetórias vazio")

        diverged = [t for t in trajectories if t.diverged]
        if diverged:
            raise UnstableOperatingPointError(
                f"{len(diverged)} de {len(trajectories)} trajetórias divergiram (phi={trajectories[0].op.phi:.4g})"
            )
        spectra = [welch_psd(t, request.segment_len) for t in trajectories]
        logger.info(f"Espectro simulado: média de {len(spectra)} trajetórias")
        return average_spectra(spectra)
