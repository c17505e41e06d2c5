# bwsb/monitor/metrics.py
from pathlib import Path

from prometheus_client import REGISTRY, Counter, Gauge, generate_latest

# Solver QP
qp_solves_total = Counter("bwsb_qp_solves_total", "QPs resueltos por el solver de conjunto activo", ["status"])
main_qp_infeasible_total = Counter("bwsb_main_qp_infeasible_total", "Main QP infactibles (no deberían ocurrir)")

# Obstáculos en el mundo de bolas
radius_floor_bindings_total = Counter("bwsb_radius_floor_bindings_total", "Veces que el radio mínimo se activó")
boundary_cap_bindings_total = Counter("bwsb_boundary_cap_bindings_total", "Veces que el tope de crecimiento de rho_0 se activó")

# Simulación
trajectories_total = Counter("bwsb_trajectories_total", "Trayectorias simuladas", ["outcome"])
deadlocks_total = Counter("bwsb_deadlocks_total", "Deadlocks detectados")
step_holds_total = Counter("bwsb_step_holds_total", "Pasos sin avance seguro: el lazo mantiene el estado")
step_subdivisions_total = Counter("bwsb_step_subdivisions_total", "Pasos partidos en dos mitades")
last_min_barrier = Gauge("bwsb_last_min_barrier", "Mínimo valor de barrera en la última trayectoria", ["world"])


def write_metrics(path) -> Path:
    """Vuelca el registro en formato de exposición de texto (sin servidor HTTP)"""
    path = Path(path)
    path.write_bytes(generate_latest(REGISTRY))
    return path
