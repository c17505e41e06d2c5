"""
Simulación: integrador, plantas, escenarios, detección de deadlock y ejecución
"""

from .integrators import rk4_step, integrate
from .systems import (
    FullyActuatedPlant,
    UnicyclePlant,
    GoalController,
    unicycle_dynamics,
    unicycle_track,
    lookahead_point,
)
from .monitors import EquilibriumClass, DeadlockMonitor, detect_deadlock, classify_equilibrium
from .scenarios import (
    SystemKind,
    ControllerKind,
    ObstacleSpec,
    BarrierSpec,
    Scenario,
    builtin_scenarios,
    get_builtin,
)
from .runner import StepRecord, TrajectorySummary, TrajectoryLog, run_trajectory, run_scenario

__all__ = [
    'rk4_step',
    'integrate',
    'FullyActuatedPlant',
    'UnicyclePlant',
    'GoalController',
    'unicycle_dynamics',
    'unicycle_track',
    'lookahead_point',
    'EquilibriumClass',
    'DeadlockMonitor',
    'detect_deadlock',
    'classify_equilibrium',
    'SystemKind',
    'ControllerKind',
    'ObstacleSpec',
    'BarrierSpec',
    'Scenario',
    'builtin_scenarios',
    'get_builtin',
    'StepRecord',
    'TrajectorySummary',
    'TrajectoryLog',
    'run_trajectory',
    'run_scenario',
]
