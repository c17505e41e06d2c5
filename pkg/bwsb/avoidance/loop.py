"""
Paso del lazo cerrado de evasión por estados (q es el estado que los obstáculos esquivan)
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Protocol, Tuple

import numpy as np
import structlog

from ..config import settings
from ..control.cbf import ControlAffineSystem
from ..diffeo import StarToBallMap
from ..errors import BwsbError, InverseConvergenceError, StepError, StepRejectedError
from ..geometry.ball_world import BallWorld
from ..geometry.vectors import Vector
from ..monitor import metrics
from .main_qp import AvoidanceGains, Gamma, solve_main_qp, step_obstacles

logger = structlog.get_logger(__name__)


class Plant(Protocol):
    """Sistema físico: expone las coordenadas de evasión y realiza un desplazamiento deseado"""

    def output(self, state: np.ndarray) -> Vector: ...

    def realize(self, state: np.ndarray, target: Vector, dt: float) -> Tuple[np.ndarray, np.ndarray]: ...


@dataclass(frozen=True, eq=False)
class LoopState:
    """Snapshot inmutable del lazo en el paso k; held = el último paso mantuvo el estado"""
    x: Vector
    q: Vector
    qdot: Vector
    u: Vector
    k: int
    dt: float
    world: BallWorld
    plant_state: np.ndarray
    active: Tuple[str, ...] = ()
    events: Tuple[dict, ...] = field(default_factory=tuple)
    held: bool = False

    @property
    def t(self) -> float:
        return self.k * self.dt


@dataclass(frozen=True, eq=False)
class StepLimits:
    """Subdivisiones del paso: mitades de dt y reducciones a la mitad del avance en q"""
    halvings: int = field(default_factory=lambda: settings.STEP_HALVINGS)
    shrinks: int = field(default_factory=lambda: settings.STEP_SHRINKS)


@dataclass(frozen=True, eq=False)
class _StepContext:
    system: ControlAffineSystem
    diffeo: StarToBallMap
    gains: AvoidanceGains
    gamma: Gamma
    nominal: Callable[[Vector], Vector]
    limits: StepLimits


@dataclass(frozen=True, eq=False)
class _Advance:
    x: Vector
    q: Vector
    world: BallWorld
    qdot: Vector
    active: Tuple[str, ...]
    events: Tuple[dict, ...]


def initial_loop_state(plant_state, plant: Plant, world: BallWorld, diffeo: StarToBallMap, dt: float,
                       nominal: Callable[[Vector], Vector]) -> LoopState:
    plant_state = np.asarray(plant_state, dtype=float)
    x = plant.output(plant_state)
    q = diffeo(world, x)
    return LoopState(x=x, q=q, qdot=np.zeros_like(q), u=np.asarray(nominal(x), dtype=float), k=0, dt=dt,
                     world=world, plant_state=plant_state)


def _strictly_safe_target(world: BallWorld, q: Vector) -> bool:
    return min(world.barrier_values(q).values()) > 0.0


def _attempt(x: Vector, q: Vector, world: BallWorld, dt: float, k: int, ctx: _StepContext) -> _Advance:
    """
    Un paso consistente de tamaño dt: q_dot = J_F(x) f, Main QP, Euler del mundo y
    x_target = F_new^-1(q + s dt q_dot) siguiendo la preimagen desde (mundo, q, x).
    s empieza en 1 y se reduce a la mitad mientras el objetivo salga del conjunto seguro
    del mundo de bolas o la continuación no lo alcance.
    """
    u_nominal = np.asarray(ctx.nominal(x), dtype=float)
    J = ctx.diffeo.jacobian(world, x, check_domain=False)
    qdot = J @ ctx.system.dynamics(x, u_nominal)

    result = solve_main_qp(world, q, qdot, ctx.gains, ctx.gamma)
    events: List[dict] = []
    new_world = step_obstacles(world, result.command, dt, events=events, step=k)

    scale = 1.0
    last: Optional[Exception] = None
    for _ in range(ctx.limits.shrinks):
        q_target = q + scale * dt * qdot
        if _strictly_safe_target(new_world, q_target):
            try:
                x_target = ctx.diffeo.track(world, new_world, q, q_target, x)
            except InverseConvergenceError as exc:
                last = exc
            else:
                if scale < 1.0:
                    events.append({"kind": "q_step_shrunk", "step": k, "scale": scale})
                return _Advance(x=x_target, q=q_target, world=new_world, qdot=qdot, active=result.active,
                                events=tuple(events))
        scale *= 0.5
    reason = f"no safe ball-world target down to scale {2 * scale:.1e}"
    raise StepRejectedError(reason + (f" (last: {last})" if last is not None else ""))


def _advance(x: Vector, q: Vector, world: BallWorld, dt: float, k: int, depth: int,
             ctx: _StepContext) -> _Advance:
    """Intenta el paso completo; si se rechaza lo parte en dos mitades hasta limits.halvings veces"""
    try:
        return _attempt(x, q, world, dt, k, ctx)
    except StepRejectedError:
        if depth >= ctx.limits.halvings:
            raise
    metrics.step_subdivisions_total.inc()
    first = _advance(x, q, world, dt / 2.0, k, depth + 1, ctx)
    second = _advance(first.x, first.q, first.world, dt / 2.0, k, depth + 1, ctx)
    events = first.events + second.events
    if depth == 0:
        events = events + ({"kind": "step_subdivided", "step": k},)
    return _Advance(x=second.x, q=second.q, world=second.world, qdot=first.qdot, active=second.active,
                    events=events)


def _hold(state: LoopState, plant: Plant, qdot: Vector, events: Tuple[dict, ...]) -> LoopState:
    plant_state, u = plant.realize(state.plant_state, state.x, state.dt)
    return LoopState(x=plant.output(plant_state), q=state.q, qdot=qdot, u=np.asarray(u, dtype=float),
                     k=state.k + 1, dt=state.dt, world=state.world, plant_state=plant_state, events=events,
                     held=True)


def algorithm1_step(state: LoopState, system: ControlAffineSystem, diffeo: StarToBallMap,
                    gains: AvoidanceGains, gamma: Gamma, nominal: Callable[[Vector], Vector],
                    plant: Plant, limits: Optional[StepLimits] = None) -> LoopState:
    """
    Un paso: q_dot = J_F(x)(f + g u_hat); Main QP; Euler de los obstáculos; objetivo
    x_target = F_new^-1(q + dt q_dot) con el mapa actualizado; la planta lo realiza.

    Si ningún objetivo seguro es alcanzable (ni reduciendo el avance en q ni partiendo dt)
    el lazo mantiene x, q y el mundo: la planta se detiene y el evento "hold" queda
    registrado. El lazo es invariante en el tiempo, así que un estado mantenido se
    mantiene en los pasos siguientes sin volver a intentarlo.
    Cualquier otro error del paso se propaga como StepError con el índice k.
    """
    k, dt = state.k, state.dt
    ctx = _StepContext(system, diffeo, gains, gamma, nominal, StepLimits() if limits is None else limits)
    try:
        if state.held:
            return _hold(state, plant, state.qdot, ())
        try:
            advance = _advance(state.x, state.q, state.world, dt, k, 0, ctx)
        except StepRejectedError as exc:
            metrics.step_holds_total.inc()
            J = diffeo.jacobian(state.world, state.x, check_domain=False)
            qdot = J @ system.dynamics(state.x, np.asarray(nominal(state.x), dtype=float))
            logger.warning("no safe step, holding state", step=k, x=state.x.tolist(), reason=str(exc))
            return _hold(state, plant, qdot, ({"kind": "hold", "step": k, "reason": str(exc)},))

        plant_state, u = plant.realize(state.plant_state, advance.x, dt)
        x_new = plant.output(plant_state)
        q_new = diffeo(advance.world, x_new, check_domain=False)
    except (BwsbError, np.linalg.LinAlgError) as exc:
        logger.error("algorithm step failed", step=k, error=str(exc))
        raise StepError(k, exc) from exc

    return LoopState(x=x_new, q=q_new, qdot=advance.qdot, u=np.asarray(u, dtype=float), k=k + 1, dt=dt,
                     world=advance.world, plant_state=plant_state, active=advance.active, events=advance.events)
