"""Deterministic inverse power-law radio channel.

Received strength falls off as gain / d^alpha.  The gain constant collapses
transmit power and the propagation coefficient into one knob; nothing
downstream ever needs them separately because only ratios and inversions of
the law are used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ChannelParams",
    "RssiObservation",
    "ZeroDistance",
    "InvalidRssi",
    "PairingMismatch",
    "rssi",
    "invert_rssi",
    "ratio",
]

ALPHA_MIN = 1.6
ALPHA_MAX = 3.5


class ZeroDistance(ValueError):
    """Raised when an RSSI is requested at a non-positive distance."""


class InvalidRssi(ValueError):
    """Raised when inverting a non-positive or non-finite strength."""


class PairingMismatch(ValueError):
    """Raised when two observations cannot form a ratio."""


@dataclass(frozen=True, slots=True)
class ChannelParams:
    gain: float = 1.0
    alpha: float = 2.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gain) and self.gain > 0.0):
            raise ValueError(f"gain must be positive finite, got {self.gain}")
        if not (ALPHA_MIN <= self.alpha <= ALPHA_MAX):
            raise ValueError(
                f"path-loss exponent must lie in [{ALPHA_MIN}, {ALPHA_MAX}], got {self.alpha}"
            )


@dataclass(frozen=True, slots=True)
class RssiObservation:
    """One edge node's reading of one member packet."""

    value: float
    round_no: int
    observer: int
    claimed_id: str

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value > 0.0):
            raise ValueError(f"observed strength must be positive finite, got {self.value}")
        if self.round_no not in (1, 2):
            raise ValueError(f"round must be 1 or 2, got {self.round_no}")


def rssi(params: ChannelParams, d: float) -> float:
    """Strength received at distance d."""
    if not (math.isfinite(d) and d > 0.0):
        raise ZeroDistance(f"distance must be positive finite, got {d}")
    return params.gain / d**params.alpha


def invert_rssi(params: ChannelParams, value: float) -> float:
    """Distance at which the channel yields the given strength."""
    if not (math.isfinite(value) and value > 0.0):
        raise InvalidRssi(f"strength must be positive finite, got {value}")
    return (params.gain / value) ** (1.0 / params.alpha)


def ratio(at_e2: RssiObservation, at_e1: RssiObservation) -> float:
    """The detection ratio: strength at e2 over strength at e1.

    Both observations must come from the same round and the same claimed
    identity, taken by two different edges.
    """
    if at_e2.round_no != at_e1.round_no:
        raise PairingMismatch(
            f"cannot pair round {at_e2.round_no} with round {at_e1.round_no}"
        )
    if at_e2.claimed_id != at_e1.claimed_id:
        raise PairingMismatch(
            f"cannot pair ids {at_e2.claimed_id!r} and {at_e1.claimed_id!r}"
        )
    if at_e2.observer == at_e1.observer:
        raise PairingMismatch(f"both observations come from edge {at_e2.observer}")
    return at_e2.value / at_e1.value
