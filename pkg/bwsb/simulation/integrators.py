"""
Integración numérica con la entrada congelada durante el paso
"""
from typing import Callable

import numpy as np


def rk4_step(fn: Callable[[np.ndarray, np.ndarray], np.ndarray], x, u, dt: float) -> np.ndarray:
    """Runge-Kutta clásico de orden 4 para x_dot = fn(x, u) con u constante en [t, t + dt]"""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    k1 = fn(x, u)
    k2 = fn(x + 0.5 * dt * k1, u)
    k3 = fn(x + 0.5 * dt * k2, u)
    k4 = fn(x + dt * k3, u)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(fn: Callable[[np.ndarray, np.ndarray], np.ndarray], x0, u, dt: float, steps: int) -> np.ndarray:
    """Trayectoria (steps + 1, n) con entrada constante"""
    out = [np.asarray(x0, dtype=float)]
    for _ in range(steps):
        out.append(rk4_step(fn, out[-1], u, dt))
    return np.vstack(out)
