"""
Oráculo por enumeración exhaustiva de conjuntos activos (sólo para QPs pequeños)
"""
from itertools import combinations
from typing import Optional

import numpy as np

from .qp_solver import QpSolution, QpStatus, QuadraticProgram, _solve_equality_qp


def enumerate_active_sets(qp: QuadraticProgram, tolerance: float = 1e-9) -> QpSolution:
    """Prueba todos los subconjuntos de filas y devuelve el que cumple KKT"""
    H, c, A, b = qp.hessian, qp.linear_cost, qp.constraint_matrix, qp.constraint_bound
    m = qp.n_constraints
    best: Optional[QpSolution] = None
    for size in range(0, min(m, qp.n_variables) + 1):
        for subset in combinations(range(m), size):
            rows = list(subset)
            A_s = A[rows]
            if size and np.linalg.matrix_rank(A_s) < size:
                continue
            z, mu_s = _solve_equality_qp(H, c, A_s, b[rows])
            if m and np.max(A @ z - b) > tolerance:
                continue
            if size and np.min(mu_s) < -tolerance:
                continue
            multipliers = np.zeros(m)
            multipliers[rows] = mu_s
            candidate = QpSolution(z=z, status=QpStatus.OPTIMAL, active_set=subset, multipliers=multipliers)
            if best is None or qp.objective(z) < qp.objective(best.z):
                best = candidate
    if best is None:
        return QpSolution(z=None, status=QpStatus.INFEASIBLE)
    return best


def random_qp(rng: np.random.Generator, feasible: bool = True, max_dim: int = 4,
              max_rows: int = 6) -> QuadraticProgram:
    """QP aleatorio estrictamente convexo; factible por construcción si feasible=True"""
    d = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(0 if feasible else 2, max_rows + 1))
    M = rng.normal(size=(d, d))
    H = M.T @ M + 0.1 * np.eye(d)
    c = rng.normal(size=d) * 2.0
    A = rng.normal(size=(m, d))
    if feasible:
        anchor = rng.normal(size=d)
        b = A @ anchor + np.abs(rng.normal(size=m)) * (rng.random(m) < 0.7)
    else:
        # a^T z <= -1 y -a^T z <= -1 no tienen solución común
        A[1] = -A[0]
        b = rng.normal(size=m)
        b[0] = b[1] = -1.0
    return QuadraticProgram(H, c, A, b)
