"""
Evasión por estados: Main QP de los obstáculos del mundo de bolas y paso del lazo cerrado
"""

from .main_qp import (
    AvoidanceGains,
    ObstacleCommand,
    LabeledRow,
    MainQpResult,
    nominal_obstacle_control,
    check_safe_configuration,
    main_qp_rows,
    assemble_main_qp,
    solve_main_qp,
    solve_obstacle_commands,
    step_obstacles,
)
from .loop import Plant, LoopState, StepLimits, initial_loop_state, algorithm1_step

__all__ = [
    'AvoidanceGains',
    'ObstacleCommand',
    'LabeledRow',
    'MainQpResult',
    'nominal_obstacle_control',
    'check_safe_configuration',
    'main_qp_rows',
    'assemble_main_qp',
    'solve_main_qp',
    'solve_obstacle_commands',
    'step_obstacles',
    'Plant',
    'LoopState',
    'StepLimits',
    'initial_loop_state',
    'algorithm1_step',
]
