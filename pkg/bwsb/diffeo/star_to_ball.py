"""
Difeomorfismo mundo de estrellas -> mundo de bolas

    F(x) = sum_i sigma_i(x) (rho_i f_i(x) + q_i) + sigma_g(x) (x - x_g + q_g)
    sigma_i = gamma_g bbar_i / (gamma_g bbar_i + lambda beta_i),  sigma_g = 1 - sum_i sigma_i

El índice 0 es la frontera del espacio de trabajo. Por defecto los interruptores usan
beta_i y gamma_g = ||x - x_g||^2 tal cual. Con level_scale / goal_scale se evalúan sobre
v / (s + v): mismos ceros y signos en el conjunto seguro pero acotados, de modo que lambda
fija el ancho de la transición con independencia de la escala de beta.

La inversa sólo acepta iterados estrictamente seguros (todo beta_i > 0).
"""
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np
import structlog

from ..config import settings
from ..errors import DimensionMismatchError, DomainError, InverseConvergenceError, SingularJacobianWarning, \
    ConfigurationError
from ..geometry.ball_world import BallWorld
from ..geometry.star_world import StarWorld
from ..geometry.vectors import Vector, as_vector, frozen

logger = structlog.get_logger(__name__)

# Separación relativa al proyectar una conjetura inválida sobre la frontera
PULL_MARGIN = 1e-6
# Tolerancia de los tramos intermedios de la continuación
COARSE_TOLERANCE = 1e-8


def _scaled(v, scale: Optional[float]):
    return v if scale is None else v / (scale + v)


def _blend_worlds(start: BallWorld, end: BallWorld, t: float) -> BallWorld:
    if start is end or t == 0.0:
        return start
    if t == 1.0:
        return end
    centers = [(1.0 - t) * a.center + t * b.center for a, b in zip(start.obstacles, end.obstacles)]
    radii = [(1.0 - t) * a.radius + t * b.radius for a, b in zip(start.obstacles, end.obstacles)]
    return start.with_state(centers, radii, (1.0 - t) * start.boundary_radius + t * end.boundary_radius)


@dataclass(frozen=True, eq=False)
class DiffeoParams:
    """
    lambda (nitidez de los interruptores) y los puntos meta en ambos mundos.
    level_scale / goal_scale activan la normalización v / (s + v); None = fórmula literal.
    """
    sharpness: float = field(default_factory=lambda: settings.DIFFEO_LAMBDA)
    real_goal: Vector = (0.0, 0.0)
    ball_goal: Optional[Vector] = None
    level_scale: Optional[float] = None
    goal_scale: Optional[float] = None

    def __post_init__(self):
        if not self.sharpness > 0:
            raise ConfigurationError(f"diffeomorphism sharpness must be positive, got {self.sharpness}")
        for name in ("level_scale", "goal_scale"):
            value = getattr(self, name)
            if value is None:
                continue
            if not value > 0:
                raise ConfigurationError(f"diffeomorphism {name} must be positive, got {value}")
            object.__setattr__(self, name, float(value))
        real_goal = as_vector(self.real_goal, name="real goal")
        ball_goal = real_goal if self.ball_goal is None else as_vector(self.ball_goal, dim=real_goal.size,
                                                                       name="ball goal")
        object.__setattr__(self, "sharpness", float(self.sharpness))
        object.__setattr__(self, "real_goal", frozen(real_goal))
        object.__setattr__(self, "ball_goal", frozen(ball_goal))

    @property
    def normalized(self) -> bool:
        return self.level_scale is not None or self.goal_scale is not None

    def literal(self) -> "DiffeoParams":
        """Mismos parámetros con los interruptores de la fórmula literal"""
        return replace(self, level_scale=None, goal_scale=None)


@dataclass(frozen=True, eq=False)
class SwitchValues:
    """sigma_0..sigma_M, sigma_g, gamma_g, productos omitidos bbar_i y beta_i (sin normalizar)"""
    sigmas: np.ndarray
    goal_switch: float
    goal_distance: float
    omitted_products: np.ndarray
    level_values: np.ndarray


@dataclass(frozen=True, eq=False)
class DiffeoEvaluation:
    mapped: Vector
    switches: SwitchValues
    jacobian: Optional[np.ndarray] = None
    condition_number: float = float("nan")


class StarToBallMap:
    """F para un mundo de estrellas fijo; el mundo de bolas se pasa en cada evaluación"""

    def __init__(self, star_world: StarWorld, params: Optional[DiffeoParams] = None):
        self.star_world = star_world
        self.params = DiffeoParams() if params is None else params
        # Índice 0 = frontera del espacio de trabajo
        self.regions = (star_world.workspace,) + star_world.obstacles
        x_g = self.params.real_goal
        if not star_world.is_safe(x_g) or min(self._levels(x_g)) <= 0:
            raise ConfigurationError(f"real goal {x_g.tolist()} must lie strictly inside the safe set")

    @property
    def n_obstacles(self) -> int:
        return self.star_world.n_obstacles

    def with_params(self, params: DiffeoParams) -> "StarToBallMap":
        return StarToBallMap(self.star_world, params)

    def _levels(self, x: Vector) -> np.ndarray:
        return np.array([float(region.level_set(x)) for region in self.regions])

    def _check_world(self, world: BallWorld):
        if world.n_obstacles != self.n_obstacles:
            raise DimensionMismatchError(f"ball world has {world.n_obstacles} obstacles, star world has {self.n_obstacles}")

    def _switches(self, x: Vector, check_domain: bool) -> SwitchValues:
        levels = self._levels(x)
        if check_domain:
            worst = int(np.argmin(levels))
            if levels[worst] < -settings.DOMAIN_TOLERANCE:
                raise DomainError(f"x={x.tolist()} is inside region {worst} (beta={levels[worst]:.3e})")
            levels = np.clip(levels, 0.0, None)

        p = self.params
        diff = x - p.real_goal
        goal_distance = float(diff @ diff)
        count = levels.size
        omitted = np.array([np.prod(np.delete(levels, i)) for i in range(count)])
        g = _scaled(goal_distance, p.goal_scale)
        if p.level_scale is None:
            b, b_omitted = levels, omitted
        else:
            b = _scaled(levels, p.level_scale)
            b_omitted = np.array([np.prod(np.delete(b, i)) for i in range(count)])
        numer = g * b_omitted
        denom = numer + p.sharpness * b
        sigmas = np.divide(numer, denom, out=np.zeros(count), where=denom != 0.0)
        return SwitchValues(sigmas=sigmas, goal_switch=float(1.0 - sigmas.sum()), goal_distance=goal_distance,
                            omitted_products=omitted, level_values=levels)

    def _map(self, world: BallWorld, x: Vector, check_domain: bool):
        sw = self._switches(x, check_domain)
        out = sw.goal_switch * (x - self.params.real_goal + self.params.ball_goal)
        centers = (world.boundary_center,) + tuple(ball.center for ball in world.obstacles)
        radii = (world.boundary_radius,) + tuple(ball.radius for ball in world.obstacles)
        for sigma, region, center, radius in zip(sw.sigmas, self.regions, centers, radii):
            if sigma == 0.0:
                continue
            d = x - region.center
            out = out + sigma * (radius * d / region.radius_towards(x) + center)
        return out, sw

    def switches(self, x) -> SwitchValues:
        return self._switches(as_vector(x, dim=2, name="x"), check_domain=True)

    def evaluate(self, world: BallWorld, x, with_jacobian: bool = False) -> DiffeoEvaluation:
        self._check_world(world)
        x = as_vector(x, dim=2, name="x")
        mapped, sw = self._map(world, x, check_domain=True)
        if not with_jacobian:
            return DiffeoEvaluation(mapped=mapped, switches=sw)
        J = self.jacobian(world, x)
        return DiffeoEvaluation(mapped=mapped, switches=sw, jacobian=J, condition_number=float(np.linalg.cond(J)))

    def __call__(self, world: BallWorld, x, check_domain: bool = True) -> Vector:
        """F(x); con check_domain=False evalúa la extensión suave a través de las fronteras"""
        self._check_world(world)
        return self._map(world, as_vector(x, dim=2, name="x"), check_domain)[0]

    def _fd_jacobian(self, world: BallWorld, x: Vector, step_scale: float) -> np.ndarray:
        h = step_scale * (1.0 + np.linalg.norm(x))
        J = np.empty((x.size, x.size))
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = h
            J[:, k] = (self._map(world, x + e, False)[0] - self._map(world, x - e, False)[0]) / (2.0 * h)
        return J

    def jacobian(self, world: BallWorld, x, step_scale: Optional[float] = None,
                 check_domain: bool = True) -> np.ndarray:
        """dF/dx por diferencias centrales; número de condición excesivo -> SingularJacobianWarning"""
        self._check_world(world)
        x = as_vector(x, dim=2, name="x")
        if check_domain:
            self._switches(x, check_domain=True)
        scale = settings.FD_STEP_SCALE if step_scale is None else step_scale
        if not scale > 0:
            raise ConfigurationError(f"finite-difference step scale must be positive, got {scale}")
        J = self._fd_jacobian(world, x, scale)
        condition = float(np.linalg.cond(J))
        if not condition < settings.JACOBIAN_CONDITION_LIMIT:
            logger.warning("jacobian nearly singular", x=x.tolist(), condition=condition)
            warnings.warn(f"diffeomorphism jacobian condition number {condition:.3e} at x={x.tolist()}",
                          SingularJacobianWarning, stacklevel=2)
        return J

    # ---- Inversa -------------------------------------------------------

    def is_strictly_safe(self, x) -> bool:
        """Todo beta_i(x) > 0 (y x fuera de los centros, donde f_i no está definida)"""
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)) or float(np.min(self._levels(x))) <= 0.0:
            return False
        return all(np.any(x != region.center) for region in self.regions)

    def _pull_inside(self, x: Vector) -> Vector:
        """Lleva una conjetura inválida a lo largo del rayo de la región violada hasta su frontera"""
        for _ in range(len(self.regions)):
            if self.is_strictly_safe(x):
                return x
            levels = self._levels(x)
            k = int(np.argmin(levels))
            region = self.regions[k]
            d = x - region.center
            norm = float(np.linalg.norm(d))
            if norm == 0.0:
                break
            factor = 1.0 - PULL_MARGIN if k == 0 else 1.0 + PULL_MARGIN
            x = region.center + (factor * region.radius_towards(x) / norm) * d
        if self.is_strictly_safe(x):
            return x
        raise DomainError(f"cannot move x={x.tolist()} into the safe set")

    def _newton(self, world: BallWorld, q: Vector, x: Vector, tol: float, cap: int) -> Tuple[Vector, float]:
        """Newton amortiguado; un candidato con algún beta_i <= 0 se rechaza y el paso se reduce"""
        residual = self._map(world, x, False)[0] - q
        norm = float(np.linalg.norm(residual))
        for _ in range(cap):
            if norm <= tol:
                break
            J = self._fd_jacobian(world, x, settings.FD_STEP_SCALE)
            try:
                step = np.linalg.solve(J, residual)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(J, residual, rcond=None)[0]
            alpha = 1.0
            while alpha > 1e-10:
                candidate = x - alpha * step
                if self.is_strictly_safe(candidate):
                    cand_residual = self._map(world, candidate, False)[0] - q
                    cand_norm = float(np.linalg.norm(cand_residual))
                    if cand_norm < norm:
                        x, residual, norm = candidate, cand_residual, cand_norm
                        break
                alpha *= 0.5
            else:
                break
        return x, norm

    def track(self, start_world: BallWorld, end_world: BallWorld, q_start, q_end, x_start,
              tolerance: Optional[float] = None, max_iterations: Optional[int] = None) -> Vector:
        """
        Continuación en (mundo de bolas, q): parte de x_start, preimagen de q_start en start_world,
        y sigue la preimagen a lo largo del segmento hasta q_end en end_world. Cada tramo es un
        Newton restringido al conjunto seguro; un tramo fallido se reintenta con un cuarto de su
        longitud y el avance se duplica tras cada éxito.
        """
        self._check_world(start_world)
        self._check_world(end_world)
        q_start = as_vector(q_start, dim=2, name="q_start")
        q_end = as_vector(q_end, dim=2, name="q_end")
        x = self._pull_inside(as_vector(x_start, dim=2, name="x_start").copy())
        tol = settings.NEWTON_TOLERANCE if tolerance is None else tolerance
        cap = settings.NEWTON_MAX_ITER if max_iterations is None else max_iterations
        coarse = max(tol, COARSE_TOLERANCE)

        s, ds, norm = 0.0, 1.0, float("nan")
        while s < 1.0:
            t = min(1.0, s + ds)
            piece_tol = tol if t == 1.0 else coarse
            world = _blend_worlds(start_world, end_world, t)
            candidate, norm = self._newton(world, q_start + t * (q_end - q_start), x, piece_tol, cap)
            if norm <= piece_tol:
                x, s, ds = candidate, t, min(1.0, 2.0 * ds)
                continue
            ds /= 4.0
            if ds < settings.CONTINUATION_MIN_STEP:
                logger.warning("diffeomorphism continuation stalled", reached=s, q=q_end.tolist(), residual=norm)
                raise InverseConvergenceError(f"inverse continuation stalled at s={s:.3e} with residual {norm:.3e}",
                                              best_iterate=x, residual=norm)
        if not self.is_strictly_safe(x):
            raise DomainError(f"inverse returned x={x.tolist()} outside the safe set")
        return x

    def inverse(self, world: BallWorld, q, x_guess, tolerance: Optional[float] = None,
                max_iterations: Optional[int] = None) -> Vector:
        """F^-1(q) cerca de x_guess: continuación en q desde F(x_guess) con el mundo fijo"""
        self._check_world(world)
        x0 = self._pull_inside(as_vector(x_guess, dim=2, name="x_guess").copy())
        return self.track(world, world, self._map(world, x0, False)[0], q, x0, tolerance, max_iterations)


def eval_switches(diffeo: StarToBallMap, x) -> SwitchValues:
    return diffeo.switches(x)


def eval_diffeo(diffeo: StarToBallMap, world: BallWorld, x) -> Vector:
    return diffeo(world, x)


def jacobian(diffeo: StarToBallMap, world: BallWorld, x) -> np.ndarray:
    return diffeo.jacobian(world, x)


def inverse(diffeo: StarToBallMap, world: BallWorld, q, x_guess) -> Vector:
    return diffeo.inverse(world, q, x_guess)
