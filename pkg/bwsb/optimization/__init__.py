"""
Programación cuadrática: solver de conjunto activo y oráculo de enumeración
"""

from .qp_solver import QpStatus, QuadraticProgram, QpSolution, solve_qp, kkt_residual
from .oracle import enumerate_active_sets, random_qp

__all__ = [
    'QpStatus',
    'QuadraticProgram',
    'QpSolution',
    'solve_qp',
    'kkt_residual',
    'enumerate_active_sets',
    'random_qp',
]
