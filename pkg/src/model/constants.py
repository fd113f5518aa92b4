"""
Tabela única de constantes físicas (SI).
"""

SPEED_OF_LIGHT = 2.998e8        # m/s
BOLTZMANN = 1.380649e-23        # J/K

# Regime de pequeno deslocamento de frequência da temperatura efetiva
SMALL_SHIFT_LIMIT = 1e-3
# Divergência aceita entre as duas rotas de temperatura antes de sinalizar
TEMPERATURE_DISCREPANCY_LIMIT = 0.02
