"""
Solver de conjunto activo primal para QPs densos estrictamente convexos

    minimizar  1/2 z^T H z + c^T z   sujeto a   A z <= b

Fase 1: punto factible (proyecciones baratas, y si fallan el problema minimax
min t s.t. A z - b <= t, cuyo dual da el certificado de infactibilidad).
Fase 2: conjunto activo primal con desempate por menor índice.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy.optimize import linprog

from ..config import settings
from ..errors import ConfigurationError, DimensionMismatchError, SolverFailureError
from ..monitor import metrics

logger = structlog.get_logger(__name__)


class QpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class QuadraticProgram:
    """QP con Hessiana simétrica definida positiva; m = 0 filas permitido"""
    hessian: np.ndarray
    linear_cost: np.ndarray
    constraint_matrix: Optional[np.ndarray] = None
    constraint_bound: Optional[np.ndarray] = None

    def __post_init__(self):
        H = np.array(self.hessian, dtype=float)
        c = np.array(self.linear_cost, dtype=float).reshape(-1)
        d = c.size
        if H.shape != (d, d):
            raise DimensionMismatchError(f"hessian shape {H.shape} does not match cost dimension {d}")
        A = np.zeros((0, d)) if self.constraint_matrix is None else np.array(self.constraint_matrix, dtype=float)
        b = np.zeros(0) if self.constraint_bound is None else np.array(self.constraint_bound, dtype=float).reshape(-1)
        if A.ndim == 1:
            A = A.reshape(1, -1)
        if A.shape != (b.size, d):
            raise DimensionMismatchError(f"constraint matrix {A.shape} inconsistent with bound {b.shape} and d={d}")
        for name, arr in (("hessian", H), ("linear cost", c), ("constraint matrix", A), ("constraint bound", b)):
            if not np.all(np.isfinite(arr)):
                raise ConfigurationError(f"{name} has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(H))))
        if not np.allclose(H, H.T, rtol=0.0, atol=1e-12 * scale):
            raise ConfigurationError("hessian is not symmetric")
        min_eig = float(np.linalg.eigvalsh(H)[0])
        if not min_eig > 0:
            raise ConfigurationError(f"hessian is not positive definite (smallest eigenvalue {min_eig:.3e})")
        object.__setattr__(self, "hessian", H)
        object.__setattr__(self, "linear_cost", c)
        object.__setattr__(self, "constraint_matrix", A)
        object.__setattr__(self, "constraint_bound", b)

    @property
    def n_variables(self) -> int:
        return self.linear_cost.size

    @property
    def n_constraints(self) -> int:
        return self.constraint_bound.size

    def objective(self, z: np.ndarray) -> float:
        return float(0.5 * z @ self.hessian @ z + self.linear_cost @ z)

    def permuted(self, order) -> "QuadraticProgram":
        """Mismo QP con las filas de (A, b) reordenadas"""
        order = np.asarray(order, dtype=int)
        return QuadraticProgram(self.hessian, self.linear_cost,
                                self.constraint_matrix[order], self.constraint_bound[order])


@dataclass(eq=False)
class QpSolution:
    """Minimizador certificado por KKT, o estado infactible con certificado"""
    z: Optional[np.ndarray]
    status: QpStatus
    active_set: Tuple[int, ...] = ()
    multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0
    certificate: Optional[np.ndarray] = None
    min_slack: float = float("nan")

    @property
    def optimal(self) -> bool:
        return self.status is QpStatus.OPTIMAL


def _solve_equality_qp(H, c, A_w, b_w) -> Tuple[np.ndarray, np.ndarray]:
    """min 1/2 z^T H z + c^T z  s.t.  A_w z = b_w, por el sistema KKT completo"""
    d = c.size
    k = b_w.size
    if k == 0:
        return np.linalg.solve(H, -c), np.zeros(0)
    kkt = np.zeros((d + k, d + k))
    kkt[:d, :d] = H
    kkt[:d, d:] = A_w.T
    kkt[d:, :d] = A_w
    rhs = np.concatenate([-c, b_w])
    sol = np.linalg.solve(kkt, rhs)
    return sol[:d], sol[d:]


def _is_independent(A_w: np.ndarray, row: np.ndarray) -> bool:
    if A_w.shape[0] == 0:
        return bool(np.any(row))
    stacked = np.vstack([A_w, row])
    return np.linalg.matrix_rank(stacked) == stacked.shape[0]


def _phase_one(qp: QuadraticProgram, slack_tol: float):
    """Devuelve (z factible, None, min_slack) o (None, certificado, min_slack)"""
    H, c, A, b = qp.hessian, qp.linear_cost, qp.constraint_matrix, qp.constraint_bound

    # Candidatos baratos: mínimo sin restricciones y proyecciones sucesivas sobre la fila más violada
    z = np.linalg.solve(H, -c)
    for _ in range(2 * qp.n_constraints + 1):
        viol = A @ z - b
        worst = int(np.argmax(viol))
        if viol[worst] <= 0:
            return z, None, float(np.max(viol))
        row = A[worst]
        norm2 = float(row @ row)
        if norm2 == 0.0:
            break
        z = z - (viol[worst] / norm2) * row

    # Minimax: min t  s.t.  A z - t <= b, con t >= -1 para que el LP esté acotado
    d, m = qp.n_variables, qp.n_constraints
    cost = np.zeros(d + 1)
    cost[-1] = 1.0
    A_ub = np.hstack([A, -np.ones((m, 1))])
    bounds = [(None, None)] * d + [(-1.0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverFailureError(f"feasibility phase failed: {res.message}")
    t_star = float(res.x[-1])
    if t_star > slack_tol:
        certificate = -np.asarray(res.ineqlin.marginals, dtype=float)
        certificate = np.clip(certificate, 0.0, None)
        total = certificate.sum()
        if total > 0:
            certificate = certificate / total
        return None, certificate, t_star
    return np.asarray(res.x[:-1], dtype=float), None, t_star


def solve_qp(qp: QuadraticProgram, max_iterations: Optional[int] = None) -> QpSolution:
    """
    Resuelve el QP; status INFEASIBLE lleva un certificado y >= 0 con A^T y ~ 0 y b^T y < 0.
    Supera el límite de iteraciones -> SolverFailureError.
    """
    H, c, A, b = qp.hessian, qp.linear_cost, qp.constraint_matrix, qp.constraint_bound
    d, m = qp.n_variables, qp.n_constraints
    cap = settings.QP_ITERATION_FACTOR * (d + m) if max_iterations is None else max_iterations

    if m == 0:
        z, _ = _solve_equality_qp(H, c, A, b)
        metrics.qp_solves_total.labels(status="optimal").inc()
        return QpSolution(z=z, status=QpStatus.OPTIMAL, multipliers=np.zeros(0), min_slack=float("-inf"))

    z, certificate, min_slack = _phase_one(qp, settings.QP_FEASIBILITY_SLACK)
    if z is None:
        metrics.qp_solves_total.labels(status="infeasible").inc()
        logger.debug("qp infeasible", min_slack=min_slack, n_constraints=m)
        return QpSolution(z=None, status=QpStatus.INFEASIBLE, certificate=certificate, min_slack=min_slack)

    # Conjunto de trabajo inicial: filas activas linealmente independientes (orden ascendente)
    active_tol = 1e-12 * (1.0 + float(np.max(np.abs(b))))
    working: List[int] = []
    for i in range(m):
        if b[i] - A[i] @ z <= active_tol and _is_independent(A[working], A[i]):
            working.append(i)

    step_tol = 1e-14
    for iteration in range(1, cap + 1):
        A_w, b_w = A[working], b[working]
        z_eq, mu_w = _solve_equality_qp(H, c, A_w, b_w)
        p = z_eq - z

        if np.linalg.norm(p) <= step_tol * (1.0 + np.linalg.norm(z)):
            z = z_eq
            if not working or float(np.min(mu_w)) >= -settings.QP_KKT_TOLERANCE * 1e-4:
                multipliers = np.zeros(m)
                multipliers[working] = np.clip(mu_w, 0.0, None)
                metrics.qp_solves_total.labels(status="optimal").inc()
                return QpSolution(z=z, status=QpStatus.OPTIMAL, active_set=tuple(sorted(working)),
                                  multipliers=multipliers, iterations=iteration, min_slack=min_slack)
            # Sale la restricción con multiplicador más negativo (menor índice en empate)
            drop = min(zip(mu_w, working), key=lambda item: (item[0], item[1]))[1]
            working.remove(drop)
            continue

        # Paso con bloqueo: la primera fila (menor índice en empate) que se activa entra
        alpha = 1.0
        blocking = None
        Ap = A @ p
        slack = b - A @ z
        for i in range(m):
            if i in working or Ap[i] <= 1e-15:
                continue
            ratio = max(slack[i], 0.0) / Ap[i]
            if ratio < alpha - 1e-15 and _is_independent(A_w, A[i]):
                alpha, blocking = ratio, i
        z = z + alpha * p
        if blocking is not None:
            working.append(blocking)
            working.sort()

    metrics.qp_solves_total.labels(status="failure").inc()
    raise SolverFailureError(f"active-set iteration cap {cap} exceeded (d={d}, m={m})")


def kkt_residual(qp: QuadraticProgram, sol: QpSolution) -> float:
    """max(estacionariedad, violación primal, multiplicadores negativos, holgura complementaria)"""
    if sol.z is None:
        raise ValueError("kkt_residual needs an optimal solution")
    H, c, A, b = qp.hessian, qp.linear_cost, qp.constraint_matrix, qp.constraint_bound
    z, mu = sol.z, sol.multipliers
    if mu.size != qp.n_constraints:
        mu = np.zeros(qp.n_constraints)
    stationarity = float(np.max(np.abs(H @ z + c + A.T @ mu))) if z.size else 0.0
    if qp.n_constraints == 0:
        return stationarity
    residual = A @ z - b
    violation = max(0.0, float(np.max(residual)))
    negative = max(0.0, float(np.max(-mu)))
    complementarity = float(np.max(np.abs(mu * residual)))
    return max(stationarity, violation, negative, complementarity)
