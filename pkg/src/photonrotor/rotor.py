"""Classical limit: the Chirikov map on a cylinder.

One step advances the rescaled momentum by kbar sin(k) and then the phase by
the new momentum.  The phase k lives on (-pi, pi]; the momentum X is a real
number (cylinder, not torus).  The kick parameter follows from the circuit
angles as kbar = 16 theta Phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class RotorState(NamedTuple):
    X: float
    k: float


def kbar(theta, Phi):
    """Classical kick strength of the circuit, 16 theta Phi."""
    return 16.0 * theta * Phi


def wrap_angle(k):
    """Wrap to (-pi, pi]."""
    w = math.remainder(k, 2.0 * math.pi)  # in [-pi, pi], ties to even
    if w <= -math.pi:
        w += 2.0 * math.pi
    return w


def chirikov_step(state, kick):
    """One forward step: X' = X + kbar sin k ; k' = k + X' (wrapped)."""
    x_next = state.X + kick * math.sin(state.k)
    k_next = wrap_angle(state.k + x_next)
    return RotorState(X=x_next, k=k_next)


def chirikov_step_back(state, kick):
    """Inverse step (phase first, then momentum); exact up to rounding."""
    k_prev = wrap_angle(state.k - state.X)
    x_prev = state.X - kick * math.sin(k_prev)
    return RotorState(X=x_prev, k=k_prev)


def step_jacobian(state, kick):
    """Jacobian of one step at a point; its determinant is exactly 1."""
    c = kick * math.cos(state.k)
    return np.array([[1.0, c], [1.0, 1.0 + c]])


@dataclass
class OrbitTrace:
    initial: RotorState
    steps: int
    states: list

    def as_array(self):
        return np.array([(s.X, s.k) for s in self.states])


def orbit(initial, kick, steps):
    """Iterate the map; returns the initial state plus `steps` successors."""
    steps = int(steps)
    if steps < 0:
        raise ValueError("orbit needs steps >= 0")
    states = [initial]
    s = initial
    for _ in range(steps):
        s = chirikov_step(s, kick)
        states.append(s)
    return OrbitTrace(initial=initial, steps=steps, states=states)


def to_position_chart(state, Phi):
    """Map (X, k) to the original chart (x, k) with X = -8 Phi (x - 1/2)."""
    return (0.5 - state.X / (8.0 * Phi), state.k)


def from_position_chart(x, k, Phi):
    return RotorState(X=-8.0 * Phi * (x - 0.5), k=wrap_angle(k))


def position_map_step(x, k, theta, Phi):
    """One step in the original chart: x' = x - 2 theta sin k ; k' = k - 8 Phi (x' - 1/2)."""
    x_next = x - 2.0 * theta * math.sin(k)
    k_next = wrap_angle(k - 8.0 * Phi * (x_next - 0.5))
    return x_next, k_next
