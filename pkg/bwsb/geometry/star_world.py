"""
Mundo real: obstáculos con forma de estrella y espacio de trabajo como conjuntos de nivel
Cada forma expone el conjunto de nivel beta (negativo dentro, cero en la frontera)
y la función de radio r(theta) que usa el mapa de rayos del difeomorfismo.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Protocol, Sequence, Tuple

import numpy as np
import structlog
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, minimize_scalar

from ..config import settings
from ..errors import ConfigurationError, SingularPointError
from .ball_world import BallObstacle, BallWorld
from .vectors import Vector, as_vector, frozen

logger = structlog.get_logger(__name__)

TWO_PI = 2.0 * math.pi


class StarShape(Protocol):
    """Forma estrellada centrada en el origen"""

    def level_set(self, d: np.ndarray) -> np.ndarray: ...

    def radius(self, theta: float) -> float: ...

    def radius_along(self, d: np.ndarray) -> float: ...


def _angle(d: np.ndarray) -> float:
    return math.atan2(float(d[1]), float(d[0]))


@dataclass(frozen=True)
class CircleShape:
    """Disco de radio constante"""
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigurationError(f"circle radius must be positive, got {self.r}")

    def level_set(self, d):
        d = np.asarray(d, dtype=float)
        return np.sum(d * d, axis=-1) - self.r ** 2

    def radius(self, theta: float) -> float:
        return self.r

    def radius_along(self, d) -> float:
        return self.r


@dataclass(frozen=True)
class TwoLobeShape:
    """
    Óvalo de Cassini con focos en (+-a, 0):
    beta = ((d1 - a)^2 + d2^2)((d1 + a)^2 + d2^2) - b^4
    Radio polar: r^2 = a^2 cos(2t) + sqrt(b^4 - a^4 sin^2(2t)); estrellado si b > a
    """
    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or not self.b > self.a:
            raise ConfigurationError(f"two-lobe shape needs 0 <= a < b (a={self.a}, b={self.b})")

    def level_set(self, d):
        d = np.asarray(d, dtype=float)
        d1, d2 = d[..., 0], d[..., 1]
        return ((d1 - self.a) ** 2 + d2 ** 2) * ((d1 + self.a) ** 2 + d2 ** 2) - self.b ** 4

    def _radius_from_double_angle(self, cos2: float, sin2: float) -> float:
        a2 = self.a * self.a
        return math.sqrt(a2 * cos2 + math.sqrt(self.b ** 4 - a2 * a2 * sin2 * sin2))

    def radius(self, theta: float) -> float:
        return self._radius_from_double_angle(math.cos(2.0 * theta), math.sin(2.0 * theta))

    def radius_along(self, d) -> float:
        # Ángulo doble a partir de las componentes: puntos simétricos dan el mismo radio bit a bit
        d1, d2 = float(d[0]), float(d[1])
        n2 = d1 * d1 + d2 * d2
        return self._radius_from_double_angle((d1 * d1 - d2 * d2) / n2, 2.0 * d1 * d2 / n2)


@dataclass(frozen=True)
class RadiusFunctionShape:
    """Estrella dada sólo por r(theta); beta = ||d||^2 - r(theta)^2"""
    radius_function: Callable[[float], float]

    def level_set(self, d):
        d = np.asarray(d, dtype=float)
        if d.ndim == 1:
            return float(d @ d - self.radius_function(_angle(d)) ** 2)
        theta = np.arctan2(d[..., 1], d[..., 0])
        r = np.vectorize(self.radius_function, otypes=[float])(theta)
        return np.sum(d * d, axis=-1) - r ** 2

    def radius(self, theta: float) -> float:
        return float(self.radius_function(theta))

    def radius_along(self, d) -> float:
        return self.radius(_angle(d))


class RayRadiusTable:
    """
    Radio r(theta) de un conjunto de nivel genérico: raíz de beta a lo largo de cada rayo
    sobre una malla uniforme de theta, interpolada con un spline cúbico periódico
    """

    def __init__(self, level_set: Callable[[np.ndarray], float], size: Optional[int] = None,
                 tolerance: Optional[float] = None, max_radius: float = 1e6):
        self.size = settings.RAY_TABLE_SIZE if size is None else size
        self.tolerance = settings.RAY_ROOT_TOLERANCE if tolerance is None else tolerance
        if self.size < 8:
            raise ConfigurationError(f"ray table needs at least 8 angles, got {self.size}")
        if not self.tolerance > 0:
            raise ConfigurationError(f"ray root tolerance must be positive, got {self.tolerance}")
        origin = np.zeros(2)
        if not float(level_set(origin)) < 0:
            raise ConfigurationError("star center must lie strictly inside the level set (beta(center) < 0)")

        thetas = np.linspace(0.0, TWO_PI, self.size, endpoint=False)
        radii = np.empty(self.size)
        for k, theta in enumerate(thetas):
            direction = np.array([math.cos(theta), math.sin(theta)])
            along = lambda s: float(level_set(s * direction))
            upper = 1.0
            while along(upper) <= 0:
                upper *= 2.0
                if upper > max_radius:
                    raise ConfigurationError(f"level set is unbounded along theta={theta:.6f}")
            radii[k] = brentq(along, 0.0, upper, xtol=self.tolerance)

        self.thetas = thetas
        self.radii = radii
        self._spline = CubicSpline(np.append(thetas, TWO_PI), np.append(radii, radii[0]), bc_type="periodic")
        logger.debug("ray radius table built", size=self.size, min_radius=float(radii.min()))

    def __call__(self, theta: float) -> float:
        return float(self._spline(theta % TWO_PI))


@dataclass(frozen=True)
class LevelSetShape:
    """Conjunto de nivel arbitrario (vectorizado sobre el último eje) con radio tabulado"""
    function: Callable[[np.ndarray], np.ndarray]
    table: RayRadiusTable

    @classmethod
    def build(cls, function: Callable[[np.ndarray], np.ndarray], **table_kwargs) -> "LevelSetShape":
        return cls(function=function, table=RayRadiusTable(function, **table_kwargs))

    def level_set(self, d):
        return self.function(np.asarray(d, dtype=float))

    def radius(self, theta: float) -> float:
        return self.table(theta)

    def radius_along(self, d) -> float:
        return self.table(_angle(d))


@dataclass(frozen=True, eq=False)
class StarObstacle:
    """Obstáculo estrellado respecto a su centro x_i"""
    center: Vector
    shape: StarShape
    kind: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "center", frozen(as_vector(self.center, dim=2, name="star center")))

    @classmethod
    def circle(cls, center, radius: float) -> "StarObstacle":
        return cls(center, CircleShape(radius), kind="circle")

    @classmethod
    def two_lobe(cls, center, a: float = 1.0, b: float = 1.1) -> "StarObstacle":
        return cls(center, TwoLobeShape(a, b), kind="two-lobe")

    @classmethod
    def from_level_set(cls, center, level_set: Callable[[np.ndarray], np.ndarray], **table_kwargs) -> "StarObstacle":
        """level_set se evalúa sobre coordenadas relativas al centro"""
        return cls(center, LevelSetShape.build(level_set, **table_kwargs), kind="level-set")

    @classmethod
    def from_radius_function(cls, center, radius_function: Callable[[float], float]) -> "StarObstacle":
        return cls(center, RadiusFunctionShape(radius_function), kind="radius-function")

    def level_set(self, x) -> np.ndarray:
        """beta_i evaluado en x (acepta arrays (..., 2))"""
        return self.shape.level_set(np.asarray(x, dtype=float) - self.center)

    def radius_function(self, theta: float) -> float:
        return self.shape.radius(theta)

    def radius_towards(self, x) -> float:
        """r_i(theta) con theta el ángulo de x - x_i"""
        return self.shape.radius_along(np.asarray(x, dtype=float) - self.center)

    def min_radius(self) -> float:
        """Radio de la mayor bola centrada en x_i contenida en la estrella"""
        thetas = np.linspace(0.0, TWO_PI, 720, endpoint=False)
        radii = np.array([self.shape.radius(t) for t in thetas])
        k = int(np.argmin(radii))
        step = thetas[1] - thetas[0]
        refined = minimize_scalar(self.shape.radius, bounds=(thetas[k] - step, thetas[k] + step),
                                  method="bounded", options={"xatol": 1e-12})
        return float(min(refined.fun, radii[k]))

    def boundary_point(self, theta: float) -> Vector:
        return self.center + self.shape.radius(theta) * np.array([math.cos(theta), math.sin(theta)])


@dataclass(frozen=True, eq=False)
class Workspace:
    """Espacio de trabajo estrellado: beta_0 > 0 en el interior"""
    center: Vector
    shape: StarShape

    def __post_init__(self):
        object.__setattr__(self, "center", frozen(as_vector(self.center, dim=2, name="workspace center")))

    @classmethod
    def disk(cls, radius: float, center=(0.0, 0.0)) -> "Workspace":
        return cls(center, CircleShape(radius))

    def level_set(self, x) -> np.ndarray:
        return -self.shape.level_set(np.asarray(x, dtype=float) - self.center)

    def radius_towards(self, x) -> float:
        return self.shape.radius_along(np.asarray(x, dtype=float) - self.center)

    def contains(self, x) -> bool:
        return bool(self.level_set(x) > 0)


def beta_star(obs: StarObstacle, x) -> float:
    """Conjunto de nivel del obstáculo en x"""
    return float(obs.level_set(as_vector(x, dim=2, name="x")))


def ray_map(obs, x) -> Vector:
    """f_i(x) = ||x - x_i|| / r_i(theta) [cos theta, sin theta] = (x - x_i) / r_i(theta)"""
    x = as_vector(x, dim=2, name="x")
    d = x - obs.center
    if not np.any(d):
        raise SingularPointError(f"ray map is undefined at the star center {obs.center}")
    return d / obs.radius_towards(x)


def is_safe_real(workspace: Workspace, obstacles: Sequence[StarObstacle], x) -> bool:
    """True si x está en el espacio de trabajo y fuera de todos los obstáculos"""
    x = as_vector(x, dim=2, name="x")
    if workspace.level_set(x) < 0:
        return False
    return all(obs.level_set(x) >= 0 for obs in obstacles)


@dataclass(frozen=True, eq=False)
class StarWorld:
    """Espacio de trabajo más obstáculos estrellados"""
    workspace: Workspace
    obstacles: Tuple[StarObstacle, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    @property
    def n_obstacles(self) -> int:
        return len(self.obstacles)

    def is_safe(self, x) -> bool:
        return is_safe_real(self.workspace, self.obstacles, x)

    def barrier_values(self, x) -> Dict[str, float]:
        values = {"beta_0": float(self.workspace.level_set(x))}
        for i, obs in enumerate(self.obstacles, start=1):
            values[f"beta_{i}"] = float(obs.level_set(x))
        return values

    def default_ball_world(self) -> BallWorld:
        """Bolas inscritas en cada estrella y frontera coincidente con el espacio de trabajo"""
        balls = tuple(BallObstacle.at_rest(obs.center, obs.min_radius()) for obs in self.obstacles)
        boundary = float(self.workspace.shape.radius(0.0)) if isinstance(self.workspace.shape, CircleShape) \
            else float(min(self.workspace.shape.radius(t) for t in np.linspace(0, TWO_PI, 720, endpoint=False)))
        return BallWorld(self.workspace.center, boundary, balls)
