"""Classical fixed-step fourth-order Runge-Kutta."""

from collections.abc import Callable

import numpy as np


def rk4_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float) -> np.ndarray:
    """Advance the autonomous system ``y' = f(y)`` by one step of size ``dt``."""
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def n_steps_for(t_end: float, dt: float) -> int:
    """Number of fixed steps covering ``[0, t_end]``; ``t_end`` must be a multiple of ``dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    n = int(round(t_end / dt))
    if abs(n * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(f"t_end={t_end} is not a whole number of steps of dt={dt}")
    return n
