"""
Filas de restricción C1-C3 del mundo de bolas: a^T u <= b equivale a h_dot + gamma(h) >= 0
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ConfigurationError
from ..geometry.ball_world import (BallObstacle, BallWorld, beta_ball, beta_boundary,
                                   containment_margin, pair_separation)

Gamma = Callable[[float], float]


@dataclass(frozen=True, eq=False)
class ConstraintRow:
    """a^T u <= b sobre las variables de decisión que restringe"""
    coefficients: np.ndarray
    bound: float

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(a)) and np.isfinite(self.bound)):
            raise ConfigurationError("constraint row has non-finite entries")
        object.__setattr__(self, "coefficients", a)
        object.__setattr__(self, "bound", float(self.bound))

    def slack(self, u) -> float:
        return self.bound - float(self.coefficients @ np.asarray(u, dtype=float))


def build_c1_row(ball: BallObstacle, q, qdot, gamma: Gamma) -> ConstraintRow:
    """C1: q fuera de la bola i; variables (u_qi, u_rho_i)"""
    q, qdot = np.asarray(q, dtype=float), np.asarray(qdot, dtype=float)
    rel = ball.center - q
    h = beta_ball(ball, q)
    return ConstraintRow(np.concatenate([-2.0 * rel, [2.0 * ball.radius]]),
                         -2.0 * float(rel @ qdot) + gamma(h))


def build_c1_boundary_row(world: BallWorld, q, qdot, gamma: Gamma) -> ConstraintRow:
    """C1 frontera: q dentro de la bola exterior; variable u_rho_0"""
    q, qdot = np.asarray(q, dtype=float), np.asarray(qdot, dtype=float)
    h = beta_boundary(world, q)
    return ConstraintRow(np.array([-2.0 * world.boundary_radius]),
                         2.0 * float((world.boundary_center - q) @ qdot) + gamma(h))


def build_c2_row(ball_i: BallObstacle, ball_j: BallObstacle, gamma: Gamma) -> ConstraintRow:
    """C2: bolas i y j disjuntas; variables (u_qi, u_qj, u_rho_i, u_rho_j)"""
    rel = ball_i.center - ball_j.center
    total = ball_i.radius + ball_j.radius
    return ConstraintRow(np.concatenate([-2.0 * rel, 2.0 * rel, [2.0 * total, 2.0 * total]]),
                         gamma(pair_separation(ball_i, ball_j)))


def build_c3_row(ball: BallObstacle, world: BallWorld, gamma: Gamma) -> ConstraintRow:
    """C3: bola i dentro de la frontera; variables (u_qi, u_rho_i, u_rho_0)"""
    gap = world.boundary_radius - ball.radius
    if not gap > 0:
        raise ConfigurationError(f"boundary radius {world.boundary_radius} must exceed obstacle radius {ball.radius}")
    rel = ball.center - world.boundary_center
    return ConstraintRow(np.concatenate([2.0 * rel, [2.0 * gap, -2.0 * gap]]),
                         gamma(containment_margin(ball, world)))
