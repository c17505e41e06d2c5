"""
Funciones de barrera de control y filtro de seguridad CBF-QP estándar

    min ||u - u_hat||^2   s.t.   L_f h(x) + L_g h(x) u + gamma(h(x)) >= 0
"""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
import structlog

from ..config import settings
from ..errors import ConfigurationError, DimensionMismatchError, FilterFailureError
from ..geometry.star_world import StarObstacle
from ..geometry.vectors import Vector, as_vector
from ..optimization import QuadraticProgram, solve_qp

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ControlAffineSystem:
    """x_dot = f(x) + g(x) u"""
    drift: Callable[[Vector], Vector]
    input_map: Callable[[Vector], np.ndarray]
    state_dim: int
    input_dim: int

    @classmethod
    def linear(cls, drift_matrix, input_matrix=None) -> "ControlAffineSystem":
        """x_dot = A x + B u (B = I por defecto)"""
        A = np.array(drift_matrix, dtype=float)
        n = A.shape[0]
        B = np.eye(n) if input_matrix is None else np.array(input_matrix, dtype=float)
        if A.shape != (n, n) or B.shape[0] != n:
            raise DimensionMismatchError(f"linear system needs square A and B with {n} rows")
        return cls(drift=LinearField(A), input_map=ConstantMap(B), state_dim=n, input_dim=B.shape[1])

    def f(self, x) -> Vector:
        out = np.asarray(self.drift(x), dtype=float)
        if out.shape != (self.state_dim,):
            raise DimensionMismatchError(f"drift returned shape {out.shape}, expected ({self.state_dim},)")
        return out

    def g(self, x) -> np.ndarray:
        out = np.asarray(self.input_map(x), dtype=float)
        if out.shape != (self.state_dim, self.input_dim):
            raise DimensionMismatchError(f"input map returned shape {out.shape}")
        return out

    def dynamics(self, x, u) -> Vector:
        return self.f(x) + self.g(x) @ np.asarray(u, dtype=float)


@dataclass(frozen=True, eq=False)
class LinearField:
    matrix: np.ndarray

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class ConstantMap:
    matrix: np.ndarray

    def __call__(self, x):
        return self.matrix


def central_difference_gradient(fn: Callable[[Vector], float], x: Vector,
                                step_scale: Optional[float] = None) -> Vector:
    """Gradiente por diferencias centrales con paso step_scale * (1 + ||x||)"""
    x = np.asarray(x, dtype=float)
    h = (settings.FD_STEP_SCALE if step_scale is None else step_scale) * (1.0 + np.linalg.norm(x))
    if not h > 0:
        raise ConfigurationError(f"finite-difference step must be positive, got step_scale={step_scale}")
    grad = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        grad[k] = (float(fn(x + e)) - float(fn(x - e))) / (2.0 * h)
    return grad


@dataclass(frozen=True, eq=False)
class BarrierFunction:
    """h(x) con gradiente analítico opcional (si falta, diferencias centrales)"""
    value: Callable[[Vector], float]
    gradient_fn: Optional[Callable[[Vector], Vector]] = None
    name: str = "h"

    def __call__(self, x) -> float:
        return float(self.value(np.asarray(x, dtype=float)))

    def gradient(self, x) -> Vector:
        x = np.asarray(x, dtype=float)
        if self.gradient_fn is not None:
            return np.asarray(self.gradient_fn(x), dtype=float)
        return central_difference_gradient(self.value, x)


@dataclass(frozen=True, eq=False)
class _CircleValue:
    center: np.ndarray
    radius: float

    def __call__(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return np.sum(d * d, axis=-1) - self.radius ** 2


@dataclass(frozen=True, eq=False)
class _CircleGradient:
    center: np.ndarray

    def __call__(self, x):
        return 2.0 * (np.asarray(x, dtype=float) - self.center)


@dataclass(frozen=True, eq=False)
class _FunnelValue:
    center: np.ndarray
    matrix: np.ndarray

    def __call__(self, x):
        d = np.asarray(x, dtype=float) - self.center
        n2 = np.sum(d * d, axis=-1)
        return n2 ** 2 - np.einsum("...i,ij,...j->...", d, self.matrix, d)


@dataclass(frozen=True, eq=False)
class _FunnelGradient:
    center: np.ndarray
    matrix: np.ndarray

    def __call__(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return 4.0 * (d @ d) * d - (self.matrix + self.matrix.T) @ d


@dataclass(frozen=True, eq=False)
class _StarValue:
    obstacle: StarObstacle

    def __call__(self, x):
        return self.obstacle.level_set(x)


def circle_barrier(center=(0.0, 3.0), radius: float = 1.0) -> BarrierFunction:
    """h(x) = ||x - x_c||^2 - r^2 (obstáculo convexo)"""
    c = as_vector(center, name="circle center")
    return BarrierFunction(_CircleValue(c, float(radius)), _CircleGradient(c), name="circle")


def funnel_barrier(center=(0.0, 3.0), matrix=((10.0, 0.0), (0.0, -1.0))) -> BarrierFunction:
    """h(x) = ||x - x_c||^4 - (x - x_c)^T P (x - x_c): conjunto seguro en forma de embudo"""
    c = as_vector(center, name="funnel center")
    P = np.array(matrix, dtype=float)
    if P.shape != (c.size, c.size):
        raise DimensionMismatchError(f"funnel matrix must be {c.size}x{c.size}")
    return BarrierFunction(_FunnelValue(c, P), _FunnelGradient(c, P), name="funnel")


def star_barrier(obstacle: StarObstacle, name: str = "star") -> BarrierFunction:
    """h = beta_i del obstáculo; gradiente por diferencias finitas"""
    return BarrierFunction(_StarValue(obstacle), None, name=name)


@dataclass(frozen=True)
class ClassKappaFn:
    """gamma(s) = alpha * s"""
    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigurationError(f"class-K gain must be positive, got {self.alpha}")

    def __call__(self, s: float) -> float:
        return self.alpha * s


def cbf_constraint_value(sys: ControlAffineSystem, h: BarrierFunction, gamma: ClassKappaFn, x, u) -> float:
    """L_f h + L_g h u + gamma(h): >= 0 significa condición CBF cumplida"""
    grad = h.gradient(x)
    return float(grad @ sys.f(x) + grad @ sys.g(x) @ np.asarray(u, dtype=float) + gamma(h(x)))


def standard_filter(sys: ControlAffineSystem, h: Union[BarrierFunction, Sequence[BarrierFunction]],
                    gamma: ClassKappaFn, x, u_hat) -> Vector:
    """
    Filtro CBF-QP: la entrada más cercana a u_hat que cumple la condición CBF
    de cada barrera. Infactible -> FilterFailureError.
    """
    x = as_vector(x, dim=sys.state_dim, name="x")
    u_hat = as_vector(u_hat, dim=sys.input_dim, name="u_hat")
    barriers = [h] if isinstance(h, BarrierFunction) else list(h)

    f, g = sys.f(x), sys.g(x)
    rows, bounds = [], []
    for barrier in barriers:
        grad = barrier.gradient(x)
        # -L_g h u <= L_f h + gamma(h)
        rows.append(-(grad @ g))
        bounds.append(float(grad @ f + gamma(barrier(x))))
    A = np.array(rows).reshape(len(barriers), sys.input_dim)
    b = np.array(bounds)

    if np.all(A @ u_hat <= b):
        return u_hat.copy()

    qp = QuadraticProgram(2.0 * np.eye(sys.input_dim), -2.0 * u_hat, A, b)
    solution = solve_qp(qp)
    if not solution.optimal:
        logger.warning("cbf filter infeasible", x=x.tolist(), barriers=[bar.name for bar in barriers],
                       min_slack=solution.min_slack)
        raise FilterFailureError(f"CBF-QP infeasible at x={x.tolist()} (min slack {solution.min_slack:.3e})")
    return solution.z
