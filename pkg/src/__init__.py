# Módulo principal do sistema
__version__ = "1.0.0" 