"""
Mundo de bolas: obstáculos como bolas cerradas dentro de una bola frontera
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigurationError, DimensionMismatchError
from .vectors import Vector, as_vector, frozen


@dataclass(frozen=True, eq=False)
class BallObstacle:
    """Obstáculo esférico con su configuración inicial (inmutable)"""
    center: Vector
    radius: float
    initial_center: Vector
    initial_radius: float

    def __post_init__(self):
        center = as_vector(self.center, name="ball center")
        initial = as_vector(self.initial_center, dim=center.size, name="initial ball center")
        if not (self.radius > 0 and self.initial_radius > 0):
            raise ConfigurationError(f"ball radii must be positive (radius={self.radius}, initial={self.initial_radius})")
        object.__setattr__(self, "center", frozen(center))
        object.__setattr__(self, "initial_center", frozen(initial))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "initial_radius", float(self.initial_radius))

    @classmethod
    def at_rest(cls, center, radius: float) -> "BallObstacle":
        """Obstáculo cuya configuración inicial coincide con la actual"""
        return cls(center=center, radius=radius, initial_center=center, initial_radius=radius)

    @property
    def dim(self) -> int:
        return self.center.size

    def moved(self, center, radius: float) -> "BallObstacle":
        """Nuevo estado conservando la configuración inicial"""
        return BallObstacle(center=center, radius=radius,
                            initial_center=self.initial_center, initial_radius=self.initial_radius)


@dataclass(frozen=True, eq=False)
class BallWorld:
    """Bola frontera (q_0, rho_0) con M obstáculos esféricos"""
    boundary_center: Vector
    boundary_radius: float
    obstacles: Tuple[BallObstacle, ...] = field(default_factory=tuple)
    initial_boundary_radius: Optional[float] = None

    def __post_init__(self):
        center = as_vector(self.boundary_center, name="boundary center")
        if not self.boundary_radius > 0:
            raise ConfigurationError(f"boundary radius must be positive, got {self.boundary_radius}")
        obstacles = tuple(self.obstacles)
        for i, ball in enumerate(obstacles, start=1):
            if ball.dim != center.size:
                raise DimensionMismatchError(f"obstacle {i} has dimension {ball.dim}, world has {center.size}")
        initial = self.initial_boundary_radius if self.initial_boundary_radius is not None else self.boundary_radius
        object.__setattr__(self, "boundary_center", frozen(center))
        object.__setattr__(self, "boundary_radius", float(self.boundary_radius))
        object.__setattr__(self, "obstacles", obstacles)
        object.__setattr__(self, "initial_boundary_radius", float(initial))

    @property
    def dim(self) -> int:
        return self.boundary_center.size

    @property
    def n_obstacles(self) -> int:
        return len(self.obstacles)

    def with_state(self, centers: Sequence[Vector], radii: Sequence[float],
                   boundary_radius: float) -> "BallWorld":
        """Snapshot con nuevos centros y radios; la configuración inicial se conserva"""
        if len(centers) != self.n_obstacles or len(radii) != self.n_obstacles:
            raise DimensionMismatchError("centers/radii do not match the number of obstacles")
        moved = tuple(ball.moved(c, r) for ball, c, r in zip(self.obstacles, centers, radii))
        return BallWorld(self.boundary_center, boundary_radius, moved, self.initial_boundary_radius)

    def barrier_values(self, q: Vector) -> Dict[str, float]:
        """Todas las barreras del mundo de bolas: beta_0, beta_i, h_ij y h_i0"""
        values = {"ball_beta_0": beta_boundary(self, q)}
        for i, ball in enumerate(self.obstacles, start=1):
            values[f"ball_beta_{i}"] = beta_ball(ball, q)
        for i in range(self.n_obstacles):
            for j in range(i + 1, self.n_obstacles):
                values[f"ball_h_{i + 1}_{j + 1}"] = pair_separation(self.obstacles[i], self.obstacles[j])
        for i, ball in enumerate(self.obstacles, start=1):
            values[f"ball_h_{i}_0"] = containment_margin(ball, self)
        return values


def _check_dim(a: Vector, b: Vector):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")


def beta_ball(ball: BallObstacle, q) -> float:
    """beta_i(q) = ||q_i - q||^2 - rho_i^2"""
    q = np.asarray(q, dtype=float)
    _check_dim(ball.center, q)
    diff = ball.center - q
    return float(diff @ diff - ball.radius ** 2)


def beta_boundary(world: BallWorld, q) -> float:
    """beta_0(q) = rho_0^2 - ||q_0 - q||^2"""
    q = np.asarray(q, dtype=float)
    _check_dim(world.boundary_center, q)
    diff = world.boundary_center - q
    return float(world.boundary_radius ** 2 - diff @ diff)


def pair_separation(ball_i: BallObstacle, ball_j: BallObstacle) -> float:
    """h_ij = ||q_i - q_j||^2 - (rho_i + rho_j)^2"""
    diff = ball_i.center - ball_j.center
    return float(diff @ diff - (ball_i.radius + ball_j.radius) ** 2)


def containment_margin(ball: BallObstacle, world: BallWorld) -> float:
    """h_i0 = (rho_0 - rho_i)^2 - ||q_i - q_0||^2"""
    diff = ball.center - world.boundary_center
    return float((world.boundary_radius - ball.radius) ** 2 - diff @ diff)


def is_safe_ball(world: BallWorld, q) -> bool:
    """True si q está dentro de la bola frontera y fuera de todos los obstáculos"""
    if beta_boundary(world, q) < 0:
        return False
    return all(beta_ball(ball, q) >= 0 for ball in world.obstacles)


def configuration_violations(world: BallWorld, q, tolerance: float = 0.0) -> Dict[str, float]:
    """Barreras del mundo de bolas por debajo de -tolerance"""
    return {name: value for name, value in world.barrier_values(q).items() if value < -tolerance}
