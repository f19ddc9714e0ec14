"""Random-waypoint motion on a rectangular area.

Each node walks straight toward its current waypoint at its current speed.
When it reaches the waypoint inside a step it stops there for the remainder
of that step, then draws a fresh uniform waypoint and a fresh uniform speed
in [0, v_max] for the next step.  There is no pause state beyond that
within-step stop, so one step never covers more ground than speed * dt, and
the network-wide displacement per step is bounded by v_max * dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Position

__all__ = ["Rect", "WaypointState", "step", "displacement_bound", "initial_state"]


@dataclass(frozen=True, slots=True)
class Rect:
    width: float
    height: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.width) and self.width > 0.0):
            raise ValueError(f"width must be positive, got {self.width}")
        if not (math.isfinite(self.height) and self.height > 0.0):
            raise ValueError(f"height must be positive, got {self.height}")

    def contains(self, p: Position) -> bool:
        return 0.0 <= p.x <= self.width and 0.0 <= p.y <= self.height


@dataclass(frozen=True, slots=True)
class WaypointState:
    pos: Position
    target: Position
    speed: float
    area: Rect
    v_max: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.speed <= self.v_max):
            raise ValueError(f"speed {self.speed} outside [0, {self.v_max}]")
        if not self.area.contains(self.pos):
            raise ValueError(f"position {self.pos} outside area")
        if not self.area.contains(self.target):
            raise ValueError(f"target {self.target} outside area")


def _draw_point(area: Rect, rng: np.random.Generator) -> Position:
    return Position(rng.uniform(0.0, area.width), rng.uniform(0.0, area.height))


def initial_state(area: Rect, v_max: float, pos: Position, rng: np.random.Generator) -> WaypointState:
    """Fresh waypoint state at a given start position."""
    target = _draw_point(area, rng)
    speed = rng.uniform(0.0, v_max)
    return WaypointState(pos=pos, target=target, speed=speed, area=area, v_max=v_max)


def step(state: WaypointState, dt: float, rng: np.random.Generator) -> WaypointState:
    """Advance one time step, redrawing waypoint and speed on arrival."""
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive, got {dt}")
    dx = state.target.x - state.pos.x
    dy = state.target.y - state.pos.y
    dist = math.hypot(dx, dy)
    travel = state.speed * dt
    if travel >= dist:
        # Arrived: stop at the waypoint for the rest of the step, then the
        # next leg gets a fresh destination and speed.
        target = _draw_point(state.area, rng)
        speed = rng.uniform(0.0, state.v_max)
        return WaypointState(
            pos=state.target, target=target, speed=speed, area=state.area, v_max=state.v_max
        )
    f = travel / dist
    return WaypointState(
        pos=Position(state.pos.x + dx * f, state.pos.y + dy * f),
        target=state.target,
        speed=state.speed,
        area=state.area,
        v_max=state.v_max,
    )


def displacement_bound(v_max: float, dt: float) -> float:
    """Largest distance any node can cover in one step of dt."""
    if not (math.isfinite(v_max) and v_max >= 0.0):
        raise ValueError(f"v_max must be >= 0, got {v_max}")
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive, got {dt}")
    return v_max * dt
