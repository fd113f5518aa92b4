"""
Constantes centralizadas para eliminar strings hardcoded e magic numbers.
"""

# Códigos de saída da CLI
EXIT_CODES = {
    "success": 0,
    "config_error": 2,
    "unstable_only": 3,
    "fit_failure": 4,
}

# Mensagens de erro padronizadas
ERROR_MESSAGES = {
    "config": "Erro de configuração: {error}",
    "power_conflict": "Use apenas uma entre --power-in e --power-cavity",
    "detuning_range": "Dessintonia {phi} fora de (-{limit}, {limit})",
    "no_simulation": "Configuração sem tabela [simulation]",
    "all_unstable": "Todos os pontos pedidos são instáveis (Γ_eff <= 0)",
    "fit_failed": "Falha no ajuste: {error}",
    "spectrum_file": "Arquivo de espectro inválido: {error}",
    "calibration": "Erro de calibração: {error}",
    "output_dir": "Diretório de saída inválido '{path}': {error}",
    "missing_phi": "O arquivo '{path}' não informa phi no cabeçalho; use --phi",
    "UNKNOWN_ERROR": "Erro desconhecido",
}

# Mensagens de sucesso
SUCCESS_MESSAGES = {
    "file_written": "Gravado: {path}",
    "skipped_unstable": "phi={phi:.4g} instável (Γ_eff/Γ_m = {ratio:.4g}), espectro ignorado",
    "command_done": "{command} concluído em {duration}",
}

# Unidades das colunas emitidas (cabeçalho dos CSV)
COLUMN_UNITS = {
    "power_w": "W",
    "phi": "1",
    "p_res_w": "W",
    "p_intracavity_w": "W",
    "incident_power_w": "W",
    "freq_shift_hz": "Hz",
    "damping_ratio": "1",
    "t_eff_k": "K",
    "t_eff_single_k": "K",
    "t_eff_with_background_k": "K",
    "stable": "bool",
    "reachable": "bool",
    "level": "1",
    "segment": "index",
    "quantity": "-",
    "simulated": "SI",
    "closed_form": "SI",
    "relative_error": "1",
}

# Cores para diferentes séries
COLORS = {
    "cooling": "#1f77b4",
    "heating": "#d62728",
    "neutral": "#6c757d",
    "boundary": "#000000",
}

# Limites e configurações
LIMITS = {
    "detuning_limit": 3.0,
    "min_spectrum_points": 8,
}

# Nomes dos arquivos de saída por comando
OUTPUT_FILES = {
    "spectrum": "spectrum_{series}_phi{phi:+.4f}.csv",
    "spectrum_svg": "spectrum_{series}.svg",
    "response": "response_sweep.csv",
    "response_svg": "response_sweep.svg",
    "map": "stability_map.csv",
    "map_boundary": "stability_boundary.csv",
    "map_contours": "stability_contours.csv",
    "map_svg": "stability_map.svg",
    "temperature": "temperature_sweep.csv",
    "temperature_svg": "temperature_sweep.svg",
    "trajectory": "trajectory_phi{phi:+.4f}.ospr",
    "sim_spectrum": "simulated_spectrum_phi{phi:+.4f}.csv",
    "sim_report": "simulation_report_phi{phi:+.4f}.txt",
    "sim_comparison": "simulation_comparison_phi{phi:+.4f}.csv",
    "fit_report": "{stem}_fit.txt",
    "calibration": "calibration.csv",
}
