"""
Provedores de espectro, um por proveniência.
"""

from .base_provider import BaseProvider, SpectrumRequest
from .closed_form_provider import ClosedFormProvider
from .simulation_provider import SimulationProvider
from .file_provider import FileProvider

__all__ = ['BaseProvider', 'SpectrumRequest', 'ClosedFormProvider', 'SimulationProvider', 'FileProvider']
