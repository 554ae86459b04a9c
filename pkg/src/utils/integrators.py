from typing import Callable, TypeVar

import numpy as np

State = TypeVar("State", np.ndarray, complex)


def rk4_step(rhs: Callable[[float, State], State], t: float, y: State, dt: float) -> State:
    """One classical fourth-order Runge-Kutta step of dy/dt = rhs(t, y)."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + dt * (k1 + 2.0 * (k2 + k3) + k4) / 6.0


def uniform_steps(length: float, step: float) -> tuple:
    """Number of steps and the uniform step size covering ``length``."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    n = max(1, int(np.ceil(abs(length) / step - 1e-9)))
    return n, length / n
