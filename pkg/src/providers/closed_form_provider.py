"""
Provedor de espectros do modelo em forma fechada.
"""

from src.analysis.spectrum import closed_form_spectrum
from src.exceptions import ValidationError
from src.providers.base_provider import BaseProvider, SpectrumRequest


class ClosedFormProvider(BaseProvider):
    """Espectro unilateral 2·|χ_eff|²·S_F numa grade uniforme."""

    def __init__(self):
        super().__init__("closed-form")

    def _setup(self):
        self.status = "available"

    def _spectrum_impl(self, request: SpectrumRequest):
        if request.op is None:
            raise ValidationError("ponto de operação obrigatório para espectro em forma fechada")
        return closed_form_spectrum(request.op, request.freqs)
