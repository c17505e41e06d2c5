"""
Métricas Prometheus de bwsb
"""

from .metrics import (
    qp_solves_total,
    main_qp_infeasible_total,
    radius_floor_bindings_total,
    boundary_cap_bindings_total,
    trajectories_total,
    deadlocks_total,
    step_holds_total,
    step_subdivisions_total,
    last_min_barrier,
    write_metrics,
)

__all__ = [
    'qp_solves_total',
    'main_qp_infeasible_total',
    'radius_floor_bindings_total',
    'boundary_cap_bindings_total',
    'trajectories_total',
    'deadlocks_total',
    'step_holds_total',
    'step_subdivisions_total',
    'last_min_barrier',
    'write_metrics',
]
