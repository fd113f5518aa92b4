# Utilitários e funções auxiliares