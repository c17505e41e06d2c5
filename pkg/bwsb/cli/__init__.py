"""
Interfaz de línea de comandos: archivos de escenario, informes CSV/JSON, SVG y verificación
"""

from .scenario_file import ScenarioFile, OutputSection, load_scenario_file, parse_scenario_text, resolve_scenario
from .report import trajectory_frame, write_trajectory_csv, read_trajectory_csv, summary_frame, write_summary
from .svg_plot import marching_squares, render_svg, write_svg
from .verify import PropertyVerifier, VerifyBudget, random_safe_configuration
from .main import main, build_parser, command_run, command_verify, command_scenarios

__all__ = [
    'ScenarioFile',
    'OutputSection',
    'load_scenario_file',
    'parse_scenario_text',
    'resolve_scenario',
    'trajectory_frame',
    'write_trajectory_csv',
    'read_trajectory_csv',
    'summary_frame',
    'write_summary',
    'marching_squares',
    'render_svg',
    'write_svg',
    'PropertyVerifier',
    'VerifyBudget',
    'random_safe_configuration',
    'main',
    'build_parser',
    'command_run',
    'command_verify',
    'command_scenarios',
]
