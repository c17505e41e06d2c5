"""
Barreras de control, filtro CBF-QP y constructores de filas C1-C3
"""

from .cbf import (
    ControlAffineSystem,
    BarrierFunction,
    ClassKappaFn,
    central_difference_gradient,
    circle_barrier,
    funnel_barrier,
    star_barrier,
    cbf_constraint_value,
    standard_filter,
)
from .constraints import (
    ConstraintRow,
    build_c1_row,
    build_c1_boundary_row,
    build_c2_row,
    build_c3_row,
)

__all__ = [
    'ControlAffineSystem',
    'BarrierFunction',
    'ClassKappaFn',
    'central_difference_gradient',
    'circle_barrier',
    'funnel_barrier',
    'star_barrier',
    'cbf_constraint_value',
    'standard_filter',
    'ConstraintRow',
    'build_c1_row',
    'build_c1_boundary_row',
    'build_c2_row',
    'build_c3_row',
]
