"""
Ball-World Safety Bench - filtros CBF-QP y evasión de conjuntos inseguros no convexos
mediante un mundo de bolas y un difeomorfismo estrellas -> bolas
"""

__version__ = "1.0.0"
__author__ = "BWSB Team"

from .errors import BwsbError
from .geometry import BallWorld, StarWorld, StarObstacle, Workspace
from .optimization import QuadraticProgram, solve_qp
from .control import ControlAffineSystem, BarrierFunction, standard_filter
from .diffeo import DiffeoParams, StarToBallMap
from .avoidance import AvoidanceGains, solve_main_qp, algorithm1_step
from .simulation import Scenario, builtin_scenarios, get_builtin, run_scenario, run_trajectory

__all__ = [
    'BwsbError',
    'BallWorld',
    'StarWorld',
    'StarObstacle',
    'Workspace',
    'QuadraticProgram',
    'solve_qp',
    'ControlAffineSystem',
    'BarrierFunction',
    'standard_filter',
    'DiffeoParams',
    'StarToBallMap',
    'AvoidanceGains',
    'solve_main_qp',
    'algorithm1_step',
    'Scenario',
    'builtin_scenarios',
    'get_builtin',
    'run_scenario',
    'run_trajectory',
]
