"""
Provedor de espectros lidos de arquivo (dados medidos ou exportados).
"""

from src.analysis.spectrum_io import read_spectrum
from src.exceptions import ValidationError
from src.providers.base_provider import BaseProvider, SpectrumRequest


class FileProvider(BaseProvider):

    def __init__(self):
        super().__init__("ingested")

    def _setup(self):
        self.status = "available"

    def _spectrum_impl(self, request: SpectrumRequest):
        if not request.path:
            raise ValidationError("caminho do arquivo de espectro obrigatório")
        return read_spectrum(request.path)
