"""
Detección de deadlock y clasificación del equilibrio final
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..config import settings
from ..errors import ConfigurationError


class EquilibriumClass(Enum):
    DESIRED = "desired"
    UNDESIRED = "undesired"
    NONE = "none"


@dataclass(frozen=True)
class DeadlockMonitor:
    window: int = field(default_factory=lambda: settings.DEADLOCK_WINDOW)
    velocity_threshold: float = field(default_factory=lambda: settings.DEADLOCK_VELOCITY)
    goal_radius: float = field(default_factory=lambda: settings.GOAL_RADIUS)

    def __post_init__(self):
        if self.window < 1 or not (self.velocity_threshold > 0 and self.goal_radius > 0):
            raise ConfigurationError(f"invalid deadlock monitor {self}")


def detect_deadlock(log, monitor: DeadlockMonitor) -> Optional[dict]:
    """
    Deadlock: velocidad media real < eps_v en la ventana, lejos de la meta, mientras
    el estado del mundo de bolas sigue moviéndose (media de ||q_dot|| >= eps_v).
    Sin mundo de bolas (q_dot = nan) la condición sobre q_dot no aplica.
    """
    if len(log.records) < monitor.window:
        return None
    speeds = np.asarray(log.speeds[-monitor.window:])
    if float(speeds.mean()) >= monitor.velocity_threshold:
        return None
    final = log.records[-1]
    if float(np.linalg.norm(final.x - log.goal)) <= monitor.goal_radius:
        return None
    ball_speeds = np.asarray(log.ball_speeds[-monitor.window:])
    mean_ball = float(np.nanmean(ball_speeds)) if not np.all(np.isnan(ball_speeds)) else float("nan")
    if not np.isnan(mean_ball) and mean_ball < monitor.velocity_threshold:
        return None
    return {
        "kind": "deadlock",
        "step": len(log.records) - 1,
        "t": final.t,
        "x": final.x.tolist(),
        "mean_speed": float(speeds.mean()),
        "mean_ball_speed": mean_ball,
    }


def classify_equilibrium(log, monitor: DeadlockMonitor) -> EquilibriumClass:
    """desired en la meta; undesired si se detuvo lejos de ella; none en otro caso"""
    if not log.records:
        return EquilibriumClass.NONE
    final = log.records[-1]
    if float(np.linalg.norm(final.x - log.goal)) < monitor.goal_radius:
        return EquilibriumClass.DESIRED
    if any(event.get("kind") == "deadlock" for event in log.events):
        return EquilibriumClass.UNDESIRED
    if len(log.speeds) >= monitor.window and float(np.mean(log.speeds[-monitor.window:])) < monitor.velocity_threshold:
        return EquilibriumClass.UNDESIRED
    return EquilibriumClass.NONE
