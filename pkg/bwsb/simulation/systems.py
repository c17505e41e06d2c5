"""
Plantas simuladas: sistema totalmente actuado y robot diferencial (unicycle)
Ambas realizan un desplazamiento deseado de sus coordenadas de evasión por disparo
sobre la entrada congelada de un paso RK4.
"""
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
import structlog
from scipy.optimize import root

from ..control.cbf import ControlAffineSystem
from ..errors import ConfigurationError, ShootingError
from .integrators import rk4_step

logger = structlog.get_logger(__name__)

SHOOTING_TOLERANCE = 1e-12
SHOOTING_ACCEPT = 1e-9


def _shoot(step: Callable[[np.ndarray], np.ndarray], target: np.ndarray, u0: np.ndarray) -> np.ndarray:
    """Corrige u para que la salida tras un paso coincida con target"""
    residual = lambda u: step(u) - target
    if np.linalg.norm(residual(u0)) <= SHOOTING_TOLERANCE:
        return u0
    sol = root(residual, u0, method="hybr", options={"xtol": 1e-14})
    error = float(np.linalg.norm(residual(sol.x)))
    if not error <= SHOOTING_ACCEPT * (1.0 + float(np.linalg.norm(target))):
        logger.warning("shooting did not reach target", error=error, message=sol.message)
        raise ShootingError(f"plant missed its step target by {error:.3e}", residual=error)
    return sol.x


@dataclass(frozen=True, eq=False)
class FullyActuatedPlant:
    """El estado es la coordenada de evasión; g(x) cuadrada e invertible"""
    system: ControlAffineSystem

    def output(self, state) -> np.ndarray:
        return np.asarray(state, dtype=float)

    def apply(self, state, u, dt: float) -> np.ndarray:
        return rk4_step(self.system.dynamics, state, u, dt)

    def realize(self, state, target, dt: float) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(state, dtype=float)
        xdot_des = (np.asarray(target, dtype=float) - x) / dt
        u0 = np.linalg.solve(self.system.g(x), xdot_des - self.system.f(x))
        u = _shoot(lambda v: self.apply(x, v, dt), np.asarray(target, dtype=float), u0)
        return self.apply(x, u, dt), u


def unicycle_dynamics(pose, command) -> np.ndarray:
    """pose = (x, y, theta), command = (v, omega)"""
    v, omega = float(command[0]), float(command[1])
    theta = float(pose[2])
    return np.array([v * math.cos(theta), v * math.sin(theta), omega])


def lookahead_point(pose, lookahead: float) -> np.ndarray:
    theta = float(pose[2])
    return np.array([pose[0] + lookahead * math.cos(theta), pose[1] + lookahead * math.sin(theta)])


def unicycle_track(v_des, pose, lookahead: float) -> Tuple[float, float]:
    """Linealización por realimentación del punto adelantado: p_dot = v_des exactamente"""
    if not lookahead > 0:
        raise ConfigurationError(f"look-ahead offset must be positive, got {lookahead}")
    theta = float(pose[2])
    c, s = math.cos(theta), math.sin(theta)
    v1, v2 = float(v_des[0]), float(v_des[1])
    return c * v1 + s * v2, (-s * v1 + c * v2) / lookahead


@dataclass(frozen=True)
class UnicyclePlant:
    """Robot diferencial; la coordenada de evasión es el punto adelantado"""
    lookahead: float = 0.1

    def output(self, state) -> np.ndarray:
        return lookahead_point(state, self.lookahead)

    def apply(self, state, u, dt: float) -> np.ndarray:
        command = unicycle_track(u, state, self.lookahead)
        return rk4_step(unicycle_dynamics, state, np.array(command), dt)

    def realize(self, state, target, dt: float) -> Tuple[np.ndarray, np.ndarray]:
        pose = np.asarray(state, dtype=float)
        target = np.asarray(target, dtype=float)
        v_des = (target - self.output(pose)) / dt
        command0 = np.array(unicycle_track(v_des, pose, self.lookahead))
        step = lambda cmd: self.output(rk4_step(unicycle_dynamics, pose, cmd, dt))
        command = _shoot(step, target, command0)
        return rk4_step(unicycle_dynamics, pose, command, dt), command

    def initial_pose(self, point, heading: float) -> np.ndarray:
        """Pose cuyo punto adelantado es point"""
        return np.array([point[0] - self.lookahead * math.cos(heading),
                         point[1] - self.lookahead * math.sin(heading), heading])


@dataclass(frozen=True, eq=False)
class GoalController:
    """u_hat(x) = -gain (x - goal); gain = 0 da el control nulo"""
    goal: np.ndarray
    gain: float = 0.0

    def __call__(self, x) -> np.ndarray:
        return -self.gain * (np.asarray(x, dtype=float) - self.goal)
