"""
Escenarios: sólo datos (picklables) más los constructores de los objetos de simulación
"""
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..avoidance import AvoidanceGains
from ..config import settings
from ..control import BarrierFunction, ClassKappaFn, ControlAffineSystem, circle_barrier, funnel_barrier, star_barrier
from ..diffeo import DiffeoParams, StarToBallMap
from ..errors import ConfigurationError
from ..geometry import StarObstacle, StarWorld, Workspace
from .monitors import DeadlockMonitor
from .systems import FullyActuatedPlant, GoalController, UnicyclePlant

Pair = Tuple[float, float]
Matrix = Tuple[Tuple[float, float], Tuple[float, float]]

DRIFT_DIAG_6_1: Matrix = ((-6.0, 0.0), (0.0, -1.0))


class SystemKind(Enum):
    LINEAR = "linear"
    UNICYCLE = "unicycle"


class ControllerKind(Enum):
    NONE = "none"
    STANDARD = "standard-cbf-qp"
    MAIN_QP = "ball-world-main-qp"


@dataclass(frozen=True)
class ObstacleSpec:
    """kind: circle (radius) o two-lobe (a, b)"""
    kind: str
    center: Pair
    radius: Optional[float] = None
    a: float = 1.0
    b: float = 1.1

    def build(self) -> StarObstacle:
        if self.kind == "circle":
            if self.radius is None:
                raise ConfigurationError("circle obstacle needs a radius")
            return StarObstacle.circle(self.center, self.radius)
        if self.kind == "two-lobe":
            return StarObstacle.two_lobe(self.center, self.a, self.b)
        raise ConfigurationError(f"unknown obstacle kind '{self.kind}'")


@dataclass(frozen=True)
class BarrierSpec:
    """Barrera del filtro estándar: funnel, circle o star (beta del obstáculo `obstacle`, 1-based)"""
    kind: str
    center: Pair = (0.0, 3.0)
    radius: float = 1.0
    matrix: Matrix = ((10.0, 0.0), (0.0, -1.0))
    obstacle: int = 1

    def build(self, world: StarWorld) -> BarrierFunction:
        if self.kind == "funnel":
            return funnel_barrier(self.center, self.matrix)
        if self.kind == "circle":
            return circle_barrier(self.center, self.radius)
        if self.kind == "star":
            if not 1 <= self.obstacle <= world.n_obstacles:
                raise ConfigurationError(f"star barrier refers to missing obstacle {self.obstacle}")
            return star_barrier(world.obstacles[self.obstacle - 1], name=f"star_{self.obstacle}")
        raise ConfigurationError(f"unknown barrier kind '{self.kind}'")


@dataclass(frozen=True)
class Scenario:
    name: str
    initial_states: Tuple[Pair, ...]
    system: SystemKind = SystemKind.LINEAR
    controller: ControllerKind = ControllerKind.MAIN_QP
    drift_matrix: Matrix = DRIFT_DIAG_6_1
    nominal_gain: float = 0.0
    lookahead: float = 0.1
    initial_headings: Tuple[float, ...] = ()
    workspace_radius: float = 10.0
    obstacles: Tuple[ObstacleSpec, ...] = ()
    barriers: Tuple[BarrierSpec, ...] = ()
    goal: Pair = (0.0, 0.0)
    sharpness: float = field(default_factory=lambda: settings.DIFFEO_LAMBDA)
    level_scale: Optional[float] = None
    goal_scale: Optional[float] = None
    alpha: float = field(default_factory=lambda: settings.CBF_ALPHA)
    kappa: float = field(default_factory=lambda: settings.AVOIDANCE_KAPPA)
    kp: float = field(default_factory=lambda: settings.AVOIDANCE_KP)
    dt: float = field(default_factory=lambda: settings.DT)
    horizon: float = field(default_factory=lambda: settings.HORIZON)
    deadlock_window: int = field(default_factory=lambda: settings.DEADLOCK_WINDOW)
    velocity_threshold: float = field(default_factory=lambda: settings.DEADLOCK_VELOCITY)
    goal_radius: float = field(default_factory=lambda: settings.GOAL_RADIUS)
    description: str = ""

    def __post_init__(self):
        if not self.initial_states:
            raise ConfigurationError("scenario needs at least one initial state")
        for name in ("sharpness", "alpha", "kappa", "kp", "dt", "horizon", "workspace_radius", "lookahead"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"scenario parameter {name} must be positive")
        for name in ("level_scale", "goal_scale"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigurationError(f"scenario parameter {name} must be positive when set")
        if np.asarray(self.drift_matrix, dtype=float).shape != (2, 2):
            raise ConfigurationError("drift matrix must be 2x2")
        if self.system is SystemKind.UNICYCLE and len(self.initial_headings) != len(self.initial_states):
            raise ConfigurationError("unicycle scenario needs one heading per initial state")
        if self.controller is ControllerKind.STANDARD and not self.barriers:
            raise ConfigurationError("standard CBF-QP controller needs at least one barrier")

    # ---- Constructores -------------------------------------------------

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def star_world(self) -> StarWorld:
        return StarWorld(Workspace.disk(self.workspace_radius), tuple(spec.build() for spec in self.obstacles))

    def barrier_functions(self, world: Optional[StarWorld] = None) -> List[BarrierFunction]:
        world = self.star_world() if world is None else world
        return [spec.build(world) for spec in self.barriers]

    def model(self) -> ControlAffineSystem:
        """Modelo de las coordenadas de evasión (el punto adelantado es un integrador simple)"""
        if self.system is SystemKind.UNICYCLE:
            return ControlAffineSystem.linear(np.zeros((2, 2)))
        return ControlAffineSystem.linear(self.drift_matrix)

    def plant(self):
        if self.system is SystemKind.UNICYCLE:
            return UnicyclePlant(self.lookahead)
        return FullyActuatedPlant(self.model())

    def plant_state(self, index: int) -> np.ndarray:
        point = np.asarray(self.initial_states[index], dtype=float)
        if self.system is SystemKind.UNICYCLE:
            return UnicyclePlant(self.lookahead).initial_pose(point, self.initial_headings[index])
        return point

    def nominal(self) -> GoalController:
        return GoalController(np.asarray(self.goal, dtype=float), self.nominal_gain)

    def gamma(self) -> ClassKappaFn:
        return ClassKappaFn(self.alpha)

    def gains(self) -> AvoidanceGains:
        return AvoidanceGains(kappa=self.kappa, kp=self.kp)

    def diffeo(self, world: Optional[StarWorld] = None) -> StarToBallMap:
        params = DiffeoParams(self.sharpness, self.goal, level_scale=self.level_scale, goal_scale=self.goal_scale)
        return StarToBallMap(self.star_world() if world is None else world, params)

    def monitor(self) -> DeadlockMonitor:
        return DeadlockMonitor(self.deadlock_window, self.velocity_threshold, self.goal_radius)

    def real_barriers(self, x, world: Optional[StarWorld] = None,
                      barriers: Optional[List[BarrierFunction]] = None) -> Dict[str, float]:
        """Barreras del mundo real: beta_0..beta_M y las barreras del filtro estándar"""
        world = self.star_world() if world is None else world
        values = world.barrier_values(x)
        for barrier in (barriers if barriers is not None else self.barrier_functions(world)):
            values[f"h_{barrier.name}"] = barrier(x)
        return values

    def unsafe_initial_states(self) -> List[int]:
        world = self.star_world()
        barriers = self.barrier_functions(world) if self.barriers else []
        unsafe = []
        for k, x0 in enumerate(self.initial_states):
            if min(self.real_barriers(np.asarray(x0, dtype=float), world, barriers).values()) < 0:
                unsafe.append(k)
        return unsafe

    def with_overrides(self, **changes) -> "Scenario":
        return replace(self, **changes)


FIG3_OBSTACLES = (ObstacleSpec("two-lobe", (0.0, 3.0)), ObstacleSpec("two-lobe", (0.0, -3.0)))
FIG3_STARTS = tuple((x1, 6.0) for x1 in (-2.0, -1.0, -0.01, 0.0, 0.01, 1.0, 2.0))
FIG3_LEFT_STARTS = ((0.0, 4.0), (0.01, 4.0), (-0.01, 4.0), (0.3, 4.0), (-0.3, 4.0))
# Main QP: interruptores normalizados y ganancia de clase K alta
BALL_WORLD_TUNING = {"level_scale": 100.0, "goal_scale": 1.0, "alpha": 50.0}


def builtin_scenarios() -> Dict[str, Scenario]:
    """Escenarios incluidos, indexados por nombre"""
    return {
        "fig1-left": Scenario(
            name="fig1-left", controller=ControllerKind.STANDARD,
            barriers=(BarrierSpec("funnel", center=(0.0, 3.0), matrix=((10.0, 0.0), (0.0, -1.0))),),
            initial_states=((0.5, 6.0), (-1.0, 5.5)), dt=1e-3, horizon=30.0, deadlock_window=500,
            description="Filtro CBF-QP con barrera de embudo: equilibrio indeseado en el vértice",
        ),
        "fig1-right": Scenario(
            name="fig1-right", controller=ControllerKind.STANDARD,
            barriers=(BarrierSpec("circle", center=(0.0, 3.0), radius=1.0),),
            initial_states=((0.0, 6.0),), dt=1e-3, horizon=20.0, deadlock_window=500,
            description="Filtro CBF-QP con obstáculo circular: equilibrio indeseado en (0, 4)",
        ),
        "fig3-left": Scenario(
            name="fig3-left", obstacles=FIG3_OBSTACLES[:1], **BALL_WORLD_TUNING,
            initial_states=FIG3_LEFT_STARTS, dt=1e-2, horizon=20.0, deadlock_window=200,
            description="Un obstáculo de dos lóbulos: el arranque sobre x1 = 0 se detiene en la cima",
        ),
        "fig3-right": Scenario(
            name="fig3-right", obstacles=FIG3_OBSTACLES, initial_states=FIG3_STARTS, **BALL_WORLD_TUNING,
            dt=1e-2, horizon=20.0, deadlock_window=200,
            description="Dos obstáculos de dos lóbulos con evasión por estados",
        ),
        "fig3-right-standard": Scenario(
            name="fig3-right-standard", obstacles=FIG3_OBSTACLES, controller=ControllerKind.STANDARD,
            barriers=(BarrierSpec("star", obstacle=1), BarrierSpec("star", obstacle=2)),
            initial_states=FIG3_STARTS, dt=1e-3, horizon=20.0, deadlock_window=500,
            description="Mismo mundo con el filtro CBF-QP estándar (comparación)",
        ),
        "fig3-right-none": Scenario(
            name="fig3-right-none", obstacles=FIG3_OBSTACLES, controller=ControllerKind.NONE,
            initial_states=FIG3_STARTS, dt=1e-2, horizon=20.0, deadlock_window=50,
            description="Mismo mundo sin filtro de seguridad: estable pero no seguro",
        ),
        "unicycle-nav": Scenario(
            name="unicycle-nav", system=SystemKind.UNICYCLE, obstacles=FIG3_OBSTACLES,
            drift_matrix=((0.0, 0.0), (0.0, 0.0)), nominal_gain=1.0, lookahead=0.1,
            **BALL_WORLD_TUNING,
            initial_states=((1.5, 6.0), (-1.5, 6.0), (2.5, 5.0)),
            initial_headings=(-math.pi / 2, -math.pi / 2, -math.pi),
            dt=1e-2, horizon=20.0, deadlock_window=200,
            description="Robot diferencial cuyo punto adelantado usa la evasión por estados",
        ),
    }


def get_builtin(name: str) -> Scenario:
    scenarios = builtin_scenarios()
    if name not in scenarios:
        raise KeyError(f"unknown built-in scenario '{name}' (available: {', '.join(sorted(scenarios))})")
    return scenarios[name]
