"""
Main QP del mundo de bolas: los obstáculos (centros y radios) esquivan al estado q

    min ||u_q - u_q_hat||^2 + kappa ||u_rho - u_rho_hat||^2   s.t.  C1, C1 frontera, C2, C3

Vector de decisión z = (u_q1, ..., u_qM, u_rho_0, u_rho_1, ..., u_rho_M).
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import structlog

from ..config import settings
from ..control.constraints import (ConstraintRow, build_c1_boundary_row, build_c1_row, build_c2_row,
                                   build_c3_row)
from ..errors import ConfigurationError, MainQpInfeasibleError, SolverFailureError, UnsafeConfigurationError
from ..geometry.ball_world import BallWorld
from ..monitor import metrics
from ..optimization import QpSolution, QuadraticProgram, solve_qp

logger = structlog.get_logger(__name__)

Gamma = Callable[[float], float]


@dataclass(frozen=True)
class AvoidanceGains:
    """kappa: peso de los radios frente a los centros; kp: ganancia de retorno a la configuración inicial"""
    kappa: float = field(default_factory=lambda: settings.AVOIDANCE_KAPPA)
    kp: float = field(default_factory=lambda: settings.AVOIDANCE_KP)

    def __post_init__(self):
        if not (self.kappa > 0 and self.kp > 0):
            raise ConfigurationError(f"avoidance gains must be positive (kappa={self.kappa}, kp={self.kp})")


@dataclass(frozen=True, eq=False)
class ObstacleCommand:
    """Velocidades de centros apiladas (n*M) y tasas de radio (M+1, índice 0 = frontera)"""
    center_velocities: np.ndarray
    radius_rates: np.ndarray

    def __post_init__(self):
        u_q = np.asarray(self.center_velocities, dtype=float).reshape(-1)
        u_rho = np.asarray(self.radius_rates, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(u_q)) and np.all(np.isfinite(u_rho))):
            raise ConfigurationError("obstacle command has non-finite entries")
        object.__setattr__(self, "center_velocities", u_q)
        object.__setattr__(self, "radius_rates", u_rho)

    @property
    def n_obstacles(self) -> int:
        return self.radius_rates.size - 1

    def center_velocity(self, i: int) -> np.ndarray:
        """Velocidad del centro del obstáculo i (1-based)"""
        n = self.center_velocities.size // max(self.n_obstacles, 1)
        return self.center_velocities[(i - 1) * n:i * n]

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.center_velocities, self.radius_rates])

    @classmethod
    def from_vector(cls, z: np.ndarray, dim: int, n_obstacles: int) -> "ObstacleCommand":
        split = dim * n_obstacles
        return cls(z[:split], z[split:])


@dataclass(frozen=True, eq=False)
class LabeledRow:
    """Fila C1-C3 con su etiqueta y las posiciones de sus variables en z"""
    label: str
    row: ConstraintRow
    indices: Tuple[int, ...]


@dataclass(eq=False)
class MainQpResult:
    command: ObstacleCommand
    solution: QpSolution
    rows: List[LabeledRow]
    active: Tuple[str, ...]
    max_violation: float


def nominal_obstacle_control(world: BallWorld, gains: AvoidanceGains) -> ObstacleCommand:
    """Control proporcional hacia la configuración inicial de centros y radios"""
    u_q = [gains.kp * (ball.initial_center - ball.center) for ball in world.obstacles]
    u_rho = [gains.kp * (world.initial_boundary_radius - world.boundary_radius)]
    u_rho += [gains.kp * (ball.initial_radius - ball.radius) for ball in world.obstacles]
    center_velocities = np.concatenate(u_q) if u_q else np.zeros(0)
    return ObstacleCommand(center_velocities, np.array(u_rho))


def _offsets(world: BallWorld):
    n, M = world.dim, world.n_obstacles

    def q_idx(i):
        return tuple(range((i - 1) * n, i * n))

    def rho_idx(i):
        return (n * M + i,)

    return q_idx, rho_idx


def check_safe_configuration(world: BallWorld, q, tolerance: Optional[float] = None):
    """Rechaza configuraciones con alguna barrera del mundo de bolas negativa"""
    tol = settings.SAFETY_TOLERANCE if tolerance is None else tolerance
    for name, value in world.barrier_values(q).items():
        if value < -tol:
            raise UnsafeConfigurationError(f"unsafe ball-world configuration: {name}={value:.3e}", name, value)


def main_qp_rows(world: BallWorld, q, qdot, gamma: Gamma) -> List[LabeledRow]:
    """M filas C1, 1 fila C1 frontera, M(M-1)/2 filas C2 y M filas C3, en ese orden"""
    q_idx, rho_idx = _offsets(world)
    rows: List[LabeledRow] = []
    for i, ball in enumerate(world.obstacles, start=1):
        rows.append(LabeledRow(f"C1_{i}", build_c1_row(ball, q, qdot, gamma), q_idx(i) + rho_idx(i)))
    rows.append(LabeledRow("C1_0", build_c1_boundary_row(world, q, qdot, gamma), rho_idx(0)))
    for i in range(1, world.n_obstacles + 1):
        for j in range(i + 1, world.n_obstacles + 1):
            row = build_c2_row(world.obstacles[i - 1], world.obstacles[j - 1], gamma)
            rows.append(LabeledRow(f"C2_{i}_{j}", row, q_idx(i) + q_idx(j) + rho_idx(i) + rho_idx(j)))
    for i, ball in enumerate(world.obstacles, start=1):
        rows.append(LabeledRow(f"C3_{i}", build_c3_row(ball, world, gamma), q_idx(i) + rho_idx(i) + rho_idx(0)))
    return rows


def _assemble(world: BallWorld, rows: List[LabeledRow], gains: AvoidanceGains) -> QuadraticProgram:
    n, M = world.dim, world.n_obstacles
    d = n * M + M + 1
    weights = np.concatenate([np.ones(n * M), np.full(M + 1, gains.kappa)])
    nominal = nominal_obstacle_control(world, gains).as_vector()
    A = np.zeros((len(rows), d))
    b = np.empty(len(rows))
    for k, labeled in enumerate(rows):
        A[k, list(labeled.indices)] = labeled.row.coefficients
        b[k] = labeled.row.bound
    return QuadraticProgram(np.diag(2.0 * weights), -2.0 * weights * nominal, A, b)


def assemble_main_qp(world: BallWorld, q, qdot, gains: AvoidanceGains, gamma: Gamma) -> QuadraticProgram:
    """QP de los comandos de obstáculos; exige una configuración segura"""
    check_safe_configuration(world, q)
    return _assemble(world, main_qp_rows(world, q, qdot, gamma), gains)


def configuration_dump(world: BallWorld, q, qdot) -> Dict[str, object]:
    return {
        "q": np.asarray(q).tolist(),
        "qdot": np.asarray(qdot).tolist(),
        "boundary": {"center": world.boundary_center.tolist(), "radius": world.boundary_radius},
        "obstacles": [{"center": ball.center.tolist(), "radius": ball.radius} for ball in world.obstacles],
        "barriers": world.barrier_values(q),
    }


def solve_main_qp(world: BallWorld, q, qdot, gains: AvoidanceGains, gamma: Gamma) -> MainQpResult:
    """Resuelve el Main QP y certifica cada fila en el comando devuelto"""
    check_safe_configuration(world, q)
    rows = main_qp_rows(world, q, qdot, gamma)
    qp = _assemble(world, rows, gains)
    solution = solve_qp(qp)
    if not solution.optimal:
        dump = configuration_dump(world, q, qdot)
        metrics.main_qp_infeasible_total.inc()
        logger.error("main qp infeasible", configuration=dump, min_slack=solution.min_slack)
        raise MainQpInfeasibleError(f"main QP infeasible (min slack {solution.min_slack:.3e})", dump,
                                    solution.certificate)

    z = solution.z
    violations = [labeled.row.coefficients @ z[list(labeled.indices)] - labeled.row.bound for labeled in rows]
    max_violation = float(max(violations)) if violations else 0.0
    if max_violation > settings.ROW_TOLERANCE:
        logger.error("main qp row violated", violation=max_violation, configuration=configuration_dump(world, q, qdot))
        raise SolverFailureError(f"main QP solution violates a row by {max_violation:.3e}")

    active = tuple(rows[k].label for k in solution.active_set)
    command = ObstacleCommand.from_vector(z, world.dim, world.n_obstacles)
    return MainQpResult(command=command, solution=solution, rows=rows, active=active, max_violation=max_violation)


def solve_obstacle_commands(world: BallWorld, q, qdot, gains: AvoidanceGains, gamma: Gamma) -> ObstacleCommand:
    return solve_main_qp(world, q, qdot, gains, gamma).command


def step_obstacles(world: BallWorld, cmd: ObstacleCommand, dt: float, events: Optional[list] = None,
                   step: Optional[int] = None, radius_floor: Optional[float] = None,
                   growth_cap: Optional[float] = None) -> BallWorld:
    """Euler explícito de centros y radios; radio mínimo y tope de la frontera registrados como eventos"""
    floor = settings.RADIUS_FLOOR if radius_floor is None else radius_floor
    cap = (settings.BOUNDARY_GROWTH_CAP if growth_cap is None else growth_cap) * world.initial_boundary_radius
    if cmd.n_obstacles != world.n_obstacles:
        raise ConfigurationError(f"command for {cmd.n_obstacles} obstacles, world has {world.n_obstacles}")

    centers, radii = [], []
    for i, ball in enumerate(world.obstacles, start=1):
        centers.append(ball.center + dt * cmd.center_velocity(i))
        radius = ball.radius + dt * cmd.radius_rates[i]
        if radius < floor:
            radius = floor
            metrics.radius_floor_bindings_total.inc()
            logger.warning("radius floor binding", obstacle=i, step=step)
            if events is not None:
                events.append({"kind": "radius_floor", "step": step, "obstacle": i})
        radii.append(radius)

    boundary = world.boundary_radius + dt * cmd.radius_rates[0]
    if boundary > cap:
        boundary = cap
        metrics.boundary_cap_bindings_total.inc()
        logger.warning("boundary growth cap binding", step=step, cap=cap)
        if events is not None:
            events.append({"kind": "boundary_cap", "step": step})
    boundary = max(boundary, floor)
    return world.with_state(centers, radii, boundary)
