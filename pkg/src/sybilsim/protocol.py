"""Two-round detection protocol run by the edge nodes.

Per cycle, every member node transmits a control packet to its two nearest
edges twice, with one bounded movement step in between.  The nearer edge
(e1) forwards its reading to the second (e2), which acts as the evaluator:
in round 1 it localizes the claimed identity and computes the feasibility
band its next ratio must fall into; in round 2 it checks the fresh ratio
against that band.

Judgment rules, per evaluator and per round-2 claimed id:

* id seen in round 1: Normal if its new ratio lies in its own band,
  Sybil otherwise (someone else is speaking under that id).
* id not seen in round 1: if its ratio falls inside the band of any
  round-1 id that failed to reappear, a device has switched identities
  mid-cycle and the verdict is Sybil.  Otherwise membership decides:
  a registered id is admitted as NewMember (treated normal), an
  unregistered one is Sybil.
* round-1 ids that never came back get no verdict (departed).

Records are discarded after judgment; nothing persists across cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .channel import ChannelParams, InvalidRssi, RssiObservation, invert_rssi
from .geometry import (
    InconsistentDistances,
    IntervalInputs,
    LocalFrame,
    Position,
    RatioInterval,
    euclidean_distance,
    localize,
    rssi_ratio_interval,
)

__all__ = [
    "Verdict",
    "ControlPacket",
    "DetectionRecord",
    "MembershipRegistry",
    "CrossEdgeReport",
    "EvaluatorState",
    "InsufficientEdges",
    "select_edge_pair",
    "round1_process",
    "forward_report",
    "judge",
]


class InsufficientEdges(RuntimeError):
    """Raised when fewer than two live edge nodes remain."""


class Verdict(Enum):
    NORMAL = "normal"
    SYBIL = "sybil"
    NEW_MEMBER = "new-member"

    @property
    def treated_normal(self) -> bool:
        return self is not Verdict.SYBIL


@dataclass(frozen=True, slots=True)
class ControlPacket:
    """What a member transmits: who it claims to be and which round this is."""

    claimed_id: str
    peer_edge: int
    round_no: int
    cycle: int


@dataclass(slots=True)
class DetectionRecord:
    """Evaluator-side state for one claimed identity within one cycle."""

    claimed_id: str
    eta1: float
    interval: Optional[RatioInterval]
    inputs: Optional[IntervalInputs]
    valid: bool = True
    matched_round2: Optional[float] = None
    verdict: Optional[Verdict] = None


@dataclass(frozen=True)
class MembershipRegistry:
    """Identities enrolled with the network before the run."""

    registered: frozenset[str]

    def is_registered(self, claimed_id: str) -> bool:
        return claimed_id in self.registered


@dataclass(frozen=True, slots=True)
class CrossEdgeReport:
    """e1's reading of a member packet, relayed to the evaluator."""

    observation: RssiObservation
    cycle: int


def select_edge_pair(
    node_pos: Position, edges: Sequence[tuple[int, Position]]
) -> tuple[tuple[int, Position], tuple[int, Position]]:
    """Pick the node's two nearest live edges.

    Returns (e1, e2) where e1 is the nearest and e2, the second nearest,
    will evaluate.  Distance ties break toward the lower edge id so the
    choice is deterministic.
    """
    if len(edges) < 2:
        raise InsufficientEdges(f"need at least 2 live edges, have {len(edges)}")
    ranked = sorted(edges, key=lambda e: (euclidean_distance(node_pos, e[1]), e[0]))
    return ranked[0], ranked[1]


def round1_process(
    pkt: ControlPacket,
    rssi_at_e1: float,
    rssi_at_e2: float,
    frame: LocalFrame,
    params: ChannelParams,
    r: float,
) -> DetectionRecord:
    """Build the evaluator's round-1 record for one claimed identity.

    Computes the current ratio, localizes the transmitter in the pair's
    local frame, and derives the feasibility band for the round-2 ratio
    given motion budget r.  Unusable readings produce an invalid record
    (the id simply has no round-1 state this cycle).
    """
    if not (rssi_at_e1 > 0.0 and rssi_at_e2 > 0.0):
        return DetectionRecord(pkt.claimed_id, 0.0, None, None, valid=False)
    eta1 = rssi_at_e2 / rssi_at_e1
    try:
        d1 = invert_rssi(params, rssi_at_e1)
        d2 = invert_rssi(params, rssi_at_e2)
        x1, y1sq = localize(d1, d2, frame)
        inputs = IntervalInputs(x1=x1, y1sq=y1sq, r=r, alpha=params.alpha)
        interval = rssi_ratio_interval(inputs, frame.c)
    except (InvalidRssi, InconsistentDistances, ValueError):
        return DetectionRecord(pkt.claimed_id, eta1, None, None, valid=False)
    return DetectionRecord(pkt.claimed_id, eta1, interval, inputs)


def forward_report(
    obs: RssiObservation, cycle: int, sender_alive: bool = True
) -> Optional[CrossEdgeReport]:
    """Relay e1's observation toward the evaluator.

    A dead sender transmits nothing; the report is lost and the evaluator
    will be unable to form a ratio for this id and round.
    """
    if not sender_alive:
        return None
    return CrossEdgeReport(observation=obs, cycle=cycle)


class EvaluatorState:
    """Per-cycle record table owned by one evaluator edge.

    Delivery is idempotent: for a given (claimed id, round, cycle) only the
    first arrival counts, so duplicated forwards cannot overwrite state.
    """

    __slots__ = ("records", "round2", "_seen")

    def __init__(self) -> None:
        self.records: dict[str, DetectionRecord] = {}
        self.round2: dict[str, float] = {}
        self._seen: set[tuple[str, int, int]] = set()

    def accept_round1(self, record: DetectionRecord, cycle: int) -> bool:
        key = (record.claimed_id, 1, cycle)
        if key in self._seen:
            return False
        self._seen.add(key)
        if record.valid:
            self.records[record.claimed_id] = record
        return True

    def accept_round2(self, claimed_id: str, eta2: float, cycle: int) -> bool:
        key = (claimed_id, 2, cycle)
        if key in self._seen:
            return False
        self._seen.add(key)
        self.round2[claimed_id] = eta2
        return True

    @property
    def empty(self) -> bool:
        return not self.records and not self.round2

    def retained_records(self) -> int:
        return len(self.records) + len(self.round2)

    def clear(self) -> None:
        self.records.clear()
        self.round2.clear()
        self._seen.clear()


def judge(
    records: Mapping[str, DetectionRecord],
    round2: Iterable[tuple[str, float]],
    registry: MembershipRegistry,
) -> dict[str, Verdict]:
    """Issue one verdict per round-2 claimed identity.

    See the module docstring for the rules.  Iteration order of `round2`
    fixes verdict order; ties in unmatched-band attribution break toward
    the band whose round-1 ratio is closest to the observed round-2 ratio,
    then toward the lower claimed id.
    """
    round2 = list(round2)
    reappeared = {claimed for claimed, _ in round2}
    unmatched = [
        rec
        for claimed, rec in records.items()
        if rec.valid and claimed not in reappeared
    ]
    verdicts: dict[str, Verdict] = {}
    for claimed, eta2 in round2:
        rec = records.get(claimed)
        if rec is not None and rec.valid:
            ok = rec.interval is not None and rec.interval.contains(eta2)
            verdict = Verdict.NORMAL if ok else Verdict.SYBIL
            rec.matched_round2 = eta2
            rec.verdict = verdict
        else:
            hits = [
                u
                for u in unmatched
                if u.interval is not None and u.interval.contains(eta2)
            ]
            if hits:
                best = min(hits, key=lambda u: (abs(u.eta1 - eta2), u.claimed_id))
                if best.matched_round2 is None:
                    best.matched_round2 = eta2
                verdict = Verdict.SYBIL
            elif registry.is_registered(claimed):
                verdict = Verdict.NEW_MEMBER
            else:
                verdict = Verdict.SYBIL
        verdicts[claimed] = verdict
    return verdicts
