"""
Ejecución de escenarios: una trayectoria por estado inicial, en paralelo si se configura
"""
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog

from ..avoidance import LoopState, algorithm1_step, check_safe_configuration, initial_loop_state
from ..config import settings
from ..control import standard_filter
from ..errors import BwsbError, StepError
from ..geometry import BallWorld
from ..monitor import metrics
from .monitors import EquilibriumClass, classify_equilibrium, detect_deadlock
from .scenarios import ControllerKind, Scenario

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class StepRecord:
    """Un registro por paso; q, q_dot y el mundo de bolas sólo con el Main QP"""
    t: float
    x: np.ndarray
    u: np.ndarray
    xdot: np.ndarray
    barriers: Dict[str, float]
    q: Optional[np.ndarray] = None
    qdot: Optional[np.ndarray] = None
    world: Optional[BallWorld] = None
    active: Tuple[str, ...] = ()


@dataclass
class TrajectorySummary:
    final_state: List[float]
    outcome: EquilibriumClass
    converged: bool
    min_real_barrier: float
    min_ball_barrier: float
    qp_solves: int
    steps: int
    wall_time: float
    error: Optional[str] = None


@dataclass(eq=False)
class TrajectoryLog:
    index: int
    initial_state: Tuple[float, float]
    goal: np.ndarray
    records: List[StepRecord] = field(default_factory=list)
    events: List[dict] = field(default_factory=list)
    summary: Optional[TrajectorySummary] = None
    speeds: List[float] = field(default_factory=list)
    ball_speeds: List[float] = field(default_factory=list)

    def append(self, record: StepRecord):
        self.records.append(record)
        self.speeds.append(float(np.linalg.norm(record.xdot)))
        self.ball_speeds.append(float(np.linalg.norm(record.qdot)) if record.qdot is not None else float("nan"))

    @property
    def failed(self) -> bool:
        return self.summary is not None and self.summary.error is not None

    def barrier_series(self, name: str) -> np.ndarray:
        return np.array([record.barriers.get(name, np.nan) for record in self.records])

    def min_barrier(self, prefix: str) -> float:
        values = [v for record in self.records for k, v in record.barriers.items() if k.startswith(prefix)]
        return float(min(values)) if values else float("nan")


def _record_main_qp(state: LoopState, xdot, scenario: Scenario, world) -> StepRecord:
    barriers = scenario.real_barriers(state.x, world, [])
    barriers.update(state.world.barrier_values(state.q))
    return StepRecord(t=state.t, x=state.x, u=state.u, xdot=np.asarray(xdot, dtype=float), barriers=barriers,
                      q=state.q, qdot=state.qdot, world=state.world, active=state.active)


def run_trajectory(scenario: Scenario, index: int) -> TrajectoryLog:
    """Integra un estado inicial hasta el horizonte, la convergencia o un deadlock"""
    started = time.perf_counter()
    world = scenario.star_world()
    barriers = scenario.barrier_functions(world) if scenario.barriers else []
    model, plant, nominal, gamma = scenario.model(), scenario.plant(), scenario.nominal(), scenario.gamma()
    monitor = scenario.monitor()
    dt = scenario.dt
    log = TrajectoryLog(index=index, initial_state=tuple(scenario.initial_states[index]),
                        goal=np.asarray(scenario.goal, dtype=float))
    bound = logger.bind(scenario=scenario.name, trajectory=index)
    qp_solves = 0

    def stop_reason(x) -> Optional[str]:
        if float(np.linalg.norm(x - log.goal)) < monitor.goal_radius:
            return "converged"
        event = detect_deadlock(log, monitor)
        if event is not None:
            log.events.append({**event, "record": event["step"]})
            metrics.deadlocks_total.inc()
            bound.info("deadlock detected", **{k: v for k, v in event.items() if k != "kind"})
            return "deadlock"
        return None

    try:
        plant_state = scenario.plant_state(index)
        if scenario.controller is ControllerKind.MAIN_QP:
            diffeo = scenario.diffeo(world)
            state = initial_loop_state(plant_state, plant, world.default_ball_world(), diffeo, dt, nominal)
            check_safe_configuration(state.world, state.q, tolerance=0.0)
            gains = scenario.gains()
            log.append(_record_main_qp(state, model.dynamics(state.x, state.u), scenario, world))
            for _ in range(scenario.steps):
                if stop_reason(state.x):
                    break
                previous = state.x
                state = algorithm1_step(state, model, diffeo, gains, gamma, nominal, plant)
                qp_solves += 1
                for event in state.events:
                    log.events.append({**event, "record": len(log.records)})
                log.append(_record_main_qp(state, (state.x - previous) / dt, scenario, world))
        else:
            x = plant.output(plant_state)
            u = np.asarray(nominal(x), dtype=float)
            log.append(StepRecord(t=0.0, x=x, u=u, xdot=model.dynamics(x, u),
                                  barriers=scenario.real_barriers(x, world, barriers)))
            for k in range(scenario.steps):
                if stop_reason(x):
                    break
                u = np.asarray(nominal(x), dtype=float)
                if scenario.controller is ControllerKind.STANDARD:
                    try:
                        u = standard_filter(model, barriers, gamma, x, u)
                    except BwsbError as exc:
                        raise StepError(k, exc) from exc
                    qp_solves += 1
                plant_state = plant.apply(plant_state, u, dt)
                x_new = plant.output(plant_state)
                log.append(StepRecord(t=(k + 1) * dt, x=x_new, u=u, xdot=(x_new - x) / dt,
                                      barriers=scenario.real_barriers(x_new, world, barriers)))
                x = x_new
    except BwsbError as exc:
        step = exc.step if isinstance(exc, StepError) else None
        log.events.append({"kind": "error", "step": step, "record": max(len(log.records) - 1, 0),
                           "error": type(exc).__name__, "message": str(exc)})
        bound.error("trajectory aborted", step=step, error=str(exc))
        error = str(exc)
    else:
        error = None

    outcome = classify_equilibrium(log, monitor) if error is None else EquilibriumClass.NONE
    final = log.records[-1].x if log.records else np.asarray(scenario.initial_states[index], dtype=float)
    log.summary = TrajectorySummary(
        final_state=[float(v) for v in final],
        outcome=outcome,
        converged=outcome is EquilibriumClass.DESIRED,
        min_real_barrier=log.min_barrier("beta_") if not barriers else min(log.min_barrier("beta_"),
                                                                            log.min_barrier("h_")),
        min_ball_barrier=log.min_barrier("ball_"),
        qp_solves=qp_solves,
        steps=max(len(log.records) - 1, 0),
        wall_time=time.perf_counter() - started,
        error=error,
    )
    metrics.trajectories_total.labels(outcome=outcome.value).inc()
    metrics.last_min_barrier.labels(world=scenario.name).set(log.summary.min_real_barrier)
    bound.info("trajectory finished", outcome=outcome.value, steps=log.summary.steps,
               min_real_barrier=log.summary.min_real_barrier, wall_time=round(log.summary.wall_time, 3))
    return log


def run_scenario(scenario: Scenario, workers: Optional[int] = None) -> List[TrajectoryLog]:
    """Todas las trayectorias del escenario, ordenadas por índice del estado inicial"""
    workers = settings.PARALLEL_WORKERS if workers is None else workers
    indices = list(range(len(scenario.initial_states)))
    logger.info("running scenario", scenario=scenario.name, trajectories=len(indices),
                controller=scenario.controller.value, workers=workers)
    if workers <= 1 or len(indices) == 1:
        return [run_trajectory(scenario, i) for i in indices]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        logs = list(pool.map(run_trajectory, [scenario] * len(indices), indices))
    return sorted(logs, key=lambda log: log.index)
