"""Substitute edge nodes, heartbeats, and failover.

Every edge position is really a unit of two radios: the primary, which
participates in detection, and a substitute parked a short distance away.
While the primary is healthy the substitute only listens: it records its
own reading of every member packet addressed to its primary (cheap, since
radio reception is free to overhear) and pings the primary once per round
boundary.  When enough heartbeats go unanswered the substitute declares the
primary dead and takes over: its own position and its own shadow readings
become the unit's, and any detection cycle caught in flight is abandoned
and restarted by the simulator under the new topology.

A unit whose primary and substitute are both gone is retired; the network
halts if fewer than two units survive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .channel import ChannelParams, rssi
from .geometry import Position, euclidean_distance
from .protocol import ControlPacket

__all__ = [
    "EdgeStatus",
    "HeartbeatState",
    "EdgeUnit",
    "heartbeat_tick",
    "shadow_observe",
    "heartbeat_sweep",
    "mark_silent_failures",
]


class EdgeStatus(Enum):
    PRIMARY = "primary"
    PROMOTED = "promoted"
    DEAD = "dead"


@dataclass(slots=True)
class HeartbeatState:
    """Missed-beat counter kept by a substitute about its primary."""

    period: float
    threshold: int = 1
    missed: int = 0

    def __post_init__(self) -> None:
        if self.period <= 0.0:
            raise ValueError(f"heartbeat period must be positive, got {self.period}")
        if self.threshold < 1:
            raise ValueError(f"threshold must be >= 1, got {self.threshold}")


def heartbeat_tick(hb: HeartbeatState, primary_responds: bool) -> bool:
    """Advance one heartbeat; return True when the primary is declared dead."""
    if primary_responds:
        hb.missed = 0
        return False
    hb.missed += 1
    return hb.missed >= hb.threshold


@dataclass(slots=True)
class EdgeUnit:
    """One edge position: primary radio, substitute radio, unit state."""

    index: int
    primary_id: int
    primary_pos: Position
    substitute_id: int
    substitute_pos: Position
    heartbeat: HeartbeatState
    status: EdgeStatus = EdgeStatus.PRIMARY
    primary_alive: bool = True
    substitute_alive: bool = True
    shadow: dict[tuple[str, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if euclidean_distance(self.primary_pos, self.substitute_pos) <= 0.0:
            raise ValueError(
                f"unit {self.index}: substitute must sit apart from the primary"
            )

    @property
    def active(self) -> Optional[tuple[int, Position]]:
        """The endpoint currently doing detection work, if any."""
        if self.status is EdgeStatus.PRIMARY:
            return self.primary_id, self.primary_pos
        if self.status is EdgeStatus.PROMOTED:
            return self.substitute_id, self.substitute_pos
        return None

    def promote(self) -> None:
        """Substitute takes over; its shadow readings become the record base."""
        if not self.substitute_alive:
            raise RuntimeError(f"unit {self.index}: no live substitute to promote")
        self.status = EdgeStatus.PROMOTED


def shadow_observe(
    unit: EdgeUnit, pkt: ControlPacket, node_pos: Position, params: ChannelParams
) -> float:
    """Substitute's own reading of a member packet, kept for takeover.

    The substitute measures from its own position; after promotion these
    readings (not the dead primary's) parameterize detection, which is what
    keeps the local frames honest about where the radio actually is.
    """
    value = rssi(params, euclidean_distance(node_pos, unit.substitute_pos))
    unit.shadow[(pkt.claimed_id, pkt.round_no)] = value
    return value


def heartbeat_sweep(units: list[EdgeUnit], substitutes_enabled: bool) -> list[EdgeUnit]:
    """One heartbeat round across all units; returns units newly declared dead.

    Only meaningful when substitutes exist, because they run the heartbeat.
    A declared-dead primary is replaced by its substitute on the spot when
    one is alive, otherwise the unit is retired.
    """
    if not substitutes_enabled:
        return []
    newly_declared: list[EdgeUnit] = []
    for unit in units:
        if unit.status is not EdgeStatus.PRIMARY:
            if unit.status is EdgeStatus.PROMOTED and not unit.substitute_alive:
                unit.status = EdgeStatus.DEAD
                newly_declared.append(unit)
            continue
        if heartbeat_tick(unit.heartbeat, unit.primary_alive):
            newly_declared.append(unit)
            if unit.substitute_alive:
                unit.promote()
            else:
                unit.status = EdgeStatus.DEAD
    return newly_declared


def mark_silent_failures(units: list[EdgeUnit]) -> list[EdgeUnit]:
    """Directory refresh used when no substitutes watch the primaries.

    Dead radios are simply dropped from service; nothing detects the death
    mid-cycle, so this runs at cycle boundaries only.
    """
    newly_dead: list[EdgeUnit] = []
    for unit in units:
        if unit.status is EdgeStatus.PRIMARY and not unit.primary_alive:
            unit.status = EdgeStatus.DEAD
            newly_dead.append(unit)
        elif unit.status is EdgeStatus.PROMOTED and not unit.substitute_alive:
            unit.status = EdgeStatus.DEAD
            newly_dead.append(unit)
    return newly_dead
