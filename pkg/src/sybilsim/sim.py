"""Deterministic world model and experiment harness.

A world is a rectangular area with fixed edge units (primary + substitute
radios) and mobile member devices, some honest and some adversarial.  Each
detection cycle runs the two-round protocol against every device, scores
the verdicts against ground truth, and tears all protocol state back down.

Determinism rules: a single numpy Generator seeded from the config drives
every draw, devices are always iterated in construction order, and
replication k of a run reseeds from (seed + k), so adding replications
never perturbs earlier ones.

Ground truth (which device is adversarial) lives only on the simulator's
device objects and in the scoring step.  Nothing in the protocol layer ever
receives it; the judge sees packets, strengths, and the registry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .channel import ChannelParams, RssiObservation, rssi
from .geometry import LocalFrame, Position, euclidean_distance, make_frame
from .mobility import Rect, WaypointState, displacement_bound, initial_state, step
from .protocol import (
    ControlPacket,
    EvaluatorState,
    InsufficientEdges,
    MembershipRegistry,
    Verdict,
    forward_report,
    judge,
    round1_process,
    select_edge_pair,
)
from .resilience import (
    EdgeStatus,
    EdgeUnit,
    HeartbeatState,
    heartbeat_sweep,
    mark_silent_failures,
    shadow_observe,
)

__all__ = [
    "SimConfig",
    "ConfigError",
    "PhysicalNode",
    "CycleMetrics",
    "ReplicationResult",
    "SimulationResult",
    "World",
    "build_world",
    "run_cycle",
    "run_simulation",
    "compute_metrics",
    "adversary_emit",
]

ADVERSARY_POLICIES = ("fresh", "steal", "stable")

# Members may not spawn closer than this to any edge radio; co-located
# transmitters make the ratio geometry meaningless.
MIN_EDGE_CLEARANCE = 0.1


class ConfigError(Exception):
    """A configuration failed validation; .problems lists every violation."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass(frozen=True)
class SimConfig:
    n_normal: int = 100
    n_sybil: int = 20
    n_edges: int = 4
    cycles: int = 20
    replications: int = 50
    area_width: float = 100.0
    area_height: float = 100.0
    v_max: float = 0.5
    dt_between_rounds: float = 60.0
    alpha: float = 2.0
    gain: float = 1.0
    seed: int = 42
    adversary_policy: str = "fresh"
    sybil_id_cap: bool = False
    failure_scheduled: tuple[tuple[int, int], ...] = ()
    failure_rate: float = 0.0
    substitutes_enabled: bool = True
    substitute_offset: float = 1.0
    rerun_after_abort: bool = True

    def validate(self) -> None:
        problems = []
        if self.n_normal < 0:
            problems.append(f"nodes.normal must be >= 0, got {self.n_normal}")
        if self.n_sybil < 0:
            problems.append(f"nodes.sybil must be >= 0, got {self.n_sybil}")
        if self.n_edges < 2:
            problems.append(f"edges.count must be >= 2, got {self.n_edges}")
        if self.cycles < 1:
            problems.append(f"cycles must be >= 1, got {self.cycles}")
        if self.replications < 1:
            problems.append(f"replications must be >= 1, got {self.replications}")
        if not (math.isfinite(self.area_width) and self.area_width > 0):
            problems.append(f"area.width must be > 0, got {self.area_width}")
        if not (math.isfinite(self.area_height) and self.area_height > 0):
            problems.append(f"area.height must be > 0, got {self.area_height}")
        if not (math.isfinite(self.v_max) and self.v_max >= 0):
            problems.append(f"mobility.v_max must be >= 0, got {self.v_max}")
        if not (math.isfinite(self.dt_between_rounds) and self.dt_between_rounds > 0):
            problems.append(f"mobility.dt must be > 0, got {self.dt_between_rounds}")
        if not (1.6 <= self.alpha <= 3.5):
            problems.append(f"channel.alpha must lie in [1.6, 3.5], got {self.alpha}")
        if not (math.isfinite(self.gain) and self.gain > 0):
            problems.append(f"channel.gain must be > 0, got {self.gain}")
        if self.seed < 0:
            problems.append(f"seed must be >= 0, got {self.seed}")
        if self.adversary_policy not in ADVERSARY_POLICIES:
            problems.append(
                f"adversary.policy must be one of {ADVERSARY_POLICIES}, got {self.adversary_policy!r}"
            )
        if not (0.0 <= self.failure_rate <= 1.0):
            problems.append(f"failure.rate must lie in [0, 1], got {self.failure_rate}")
        if not (math.isfinite(self.substitute_offset) and self.substitute_offset > 0):
            problems.append(
                f"edges.substitute_offset must be > 0, got {self.substitute_offset}"
            )
        for unit, cycle in self.failure_scheduled:
            if not (0 <= unit < self.n_edges):
                problems.append(f"failure.scheduled unit {unit} outside [0, {self.n_edges})")
            if cycle < 0:
                problems.append(f"failure.scheduled cycle {cycle} must be >= 0")
        if problems:
            raise ConfigError(problems)

    @property
    def area(self) -> Rect:
        return Rect(self.area_width, self.area_height)

    @property
    def channel(self) -> ChannelParams:
        return ChannelParams(gain=self.gain, alpha=self.alpha)

    @property
    def motion_budget(self) -> float:
        return displacement_bound(self.v_max, self.dt_between_rounds)


@dataclass(slots=True)
class PhysicalNode:
    """A member device.  `truth` is scoring-only and never reaches the protocol."""

    index: int
    truth: str  # "normal" | "sybil"
    registered_id: Optional[str]
    motion: WaypointState
    stable_id: Optional[str] = None
    id_pool: list[str] = field(default_factory=list)
    pool_cursor: int = 0

    @property
    def pos(self) -> Position:
        return self.motion.pos


@dataclass(frozen=True, slots=True)
class CycleMetrics:
    """Per-cycle confusion counts at claimed-identity granularity."""

    normal_as_normal: int
    normal_as_sybil: int
    sybil_as_sybil: int
    sybil_as_normal: int
    member_packets: int
    edge_packets: int
    aborted: bool
    normal_present: int = 0
    sybil_present: int = 0
    pair_violations: int = 0
    normal_as_sybil_pair_ok: int = 0
    unattributed: int = 0

    @property
    def verdict_total(self) -> int:
        return (
            self.normal_as_normal
            + self.normal_as_sybil
            + self.sybil_as_sybil
            + self.sybil_as_normal
            + self.unattributed
        )


# Edge layouts as area fractions, by edge count.  Two edges sit on the
# horizontal midline; four take the corners of the centered half-size
# square; eight add that square's side midpoints.
_LAYOUTS: dict[int, tuple[tuple[float, float], ...]] = {
    2: ((0.25, 0.50), (0.75, 0.50)),
    4: ((0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)),
    8: (
        (0.25, 0.25),
        (0.25, 0.75),
        (0.75, 0.25),
        (0.75, 0.75),
        (0.50, 0.25),
        (0.25, 0.50),
        (0.75, 0.50),
        (0.50, 0.75),
    ),
}


def _endpoint_alive(unit: EdgeUnit, endpoint: tuple[int, Position]) -> bool:
    """True when `endpoint` is the unit's active radio and that radio works."""
    if unit.active != endpoint:
        return False
    if unit.status is EdgeStatus.PRIMARY:
        return unit.primary_alive
    if unit.status is EdgeStatus.PROMOTED:
        return unit.substitute_alive
    return False


def edge_layout(count: int, area: Rect) -> list[Position]:
    """Deterministic edge placement for a given count."""
    fractions = _LAYOUTS.get(count)
    if fractions is not None:
        return [Position(fx * area.width, fy * area.height) for fx, fy in fractions]
    cx, cy = area.width / 2.0, area.height / 2.0
    radius = 0.25 * min(area.width, area.height)
    return [
        Position(
            cx + radius * math.cos(2.0 * math.pi * i / count),
            cy + radius * math.sin(2.0 * math.pi * i / count),
        )
        for i in range(count)
    ]


class World:
    """Mutable simulation state for one replication."""

    def __init__(
        self,
        cfg: SimConfig,
        rng: np.random.Generator,
        units: list[EdgeUnit],
        nodes: list[PhysicalNode],
        registry: MembershipRegistry,
    ):
        self.cfg = cfg
        self.rng = rng
        self.units = units
        self.nodes = nodes
        self.registry = registry
        self.registered_sorted = sorted(registry.registered)
        self.cycle_index = 0
        self.forged_count = 0
        self.evaluators: dict[int, EvaluatorState] = {u.index: EvaluatorState() for u in units}
        self._frames: dict[tuple[int, int], LocalFrame] = {}

    def next_forged_id(self) -> str:
        claimed = f"F{self.forged_count:06d}"
        self.forged_count += 1
        return claimed

    def live_endpoints(self) -> list[tuple[int, Position, EdgeUnit]]:
        out = []
        for unit in self.units:
            active = unit.active
            if active is not None and _endpoint_alive(unit, active):
                out.append((active[0], active[1], unit))
        return out

    def frame_for(self, e1_id: int, e1_pos: Position, e2_id: int, e2_pos: Position) -> LocalFrame:
        key = (e1_id, e2_id)
        frame = self._frames.get(key)
        if frame is None:
            frame = make_frame(e1_pos, e2_pos)
            self._frames[key] = frame
        return frame

    def advance(self, dt: float) -> None:
        for node in self.nodes:
            node.motion = step(node.motion, dt, self.rng)

    def retained_records(self) -> int:
        return sum(ev.retained_records() for ev in self.evaluators.values()) + sum(
            len(u.shadow) for u in self.units
        )


def build_world(cfg: SimConfig) -> World:
    """Construct a world from a validated config, fully seeded.

    Node placement rejects positions within MIN_EDGE_CLEARANCE of every edge
    radio, substitutes included; substitutes are physically present whether
    or not the resilience layer is switched on, so the draw sequence (and
    hence the whole run) does not depend on that switch.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    area = cfg.area
    primaries = edge_layout(cfg.n_edges, area)
    units = []
    for i, pos in enumerate(primaries):
        units.append(
            EdgeUnit(
                index=i,
                primary_id=2 * i,
                primary_pos=pos,
                substitute_id=2 * i + 1,
                substitute_pos=Position(pos.x + cfg.substitute_offset, pos.y),
                heartbeat=HeartbeatState(period=cfg.dt_between_rounds),
            )
        )
    radios = [u.primary_pos for u in units] + [u.substitute_pos for u in units]

    def draw_clear_position() -> Position:
        while True:
            p = Position(rng.uniform(0.0, area.width), rng.uniform(0.0, area.height))
            if all(euclidean_distance(p, r) >= MIN_EDGE_CLEARANCE for r in radios):
                return p

    nodes = []
    for i in range(cfg.n_normal):
        pos = draw_clear_position()
        nodes.append(
            PhysicalNode(
                index=i,
                truth="normal",
                registered_id=f"N{i:04d}",
                motion=initial_state(area, cfg.v_max, pos, rng),
            )
        )
    for j in range(cfg.n_sybil):
        pos = draw_clear_position()
        nodes.append(
            PhysicalNode(
                index=cfg.n_normal + j,
                truth="sybil",
                registered_id=None,
                motion=initial_state(area, cfg.v_max, pos, rng),
            )
        )
    registry = MembershipRegistry(frozenset(n.registered_id for n in nodes if n.registered_id))
    return World(cfg, rng, units, nodes, registry)


def adversary_emit(
    policy: str, device: PhysicalNode, round_no: int, rng: np.random.Generator, world: World
) -> str:
    """Pick the identity an adversarial device claims this round.

    fresh: a never-used fabricated id every round (optionally cycling a pool
    capped at the honest population size).  steal: a registered id drawn at
    random, falling back to fresh when nobody is registered.  stable: one
    fabricated id per device, fixed for the whole run.  A device with a
    pinned stable_id always uses it, whatever the policy.
    """
    if device.stable_id is not None:
        return device.stable_id
    if policy == "stable":
        device.stable_id = world.next_forged_id()
        return device.stable_id
    if policy == "steal" and world.registered_sorted:
        idx = int(rng.integers(len(world.registered_sorted)))
        return world.registered_sorted[idx]
    if world.cfg.sybil_id_cap and world.cfg.n_normal > 0:
        slot = device.pool_cursor % world.cfg.n_normal
        device.pool_cursor += 1
        if slot == len(device.id_pool):
            device.id_pool.append(world.next_forged_id())
        return device.id_pool[slot]
    return world.next_forged_id()


def _emit_identity(world: World, node: PhysicalNode, round_no: int) -> str:
    if node.truth == "normal":
        assert node.registered_id is not None
        return node.registered_id
    return adversary_emit(world.cfg.adversary_policy, node, round_no, world.rng, world)


def _deaths_for_cycle(world: World) -> list[int]:
    """Unit indexes whose primary dies mid-cycle this cycle."""
    cfg = world.cfg
    doomed = [u for (u, cyc) in cfg.failure_scheduled if cyc == world.cycle_index]
    if cfg.failure_rate > 0.0:
        for unit in world.units:
            if unit.status is EdgeStatus.PRIMARY and unit.primary_alive:
                if world.rng.random() < cfg.failure_rate:
                    doomed.append(unit.index)
    return doomed


def compute_metrics(
    events: list[tuple[str, Verdict, Optional[PhysicalNode], bool]],
    normal_present: int,
    sybil_present: int,
    member_packets: int,
    edge_packets: int,
    aborted: bool,
) -> CycleMetrics:
    """Score verdict events against ground truth into confusion counts.

    Each event is (claimed id, verdict, emitting device or None, whether the
    emitter's nearest pair changed between rounds).  NewMember counts on the
    treated-normal side.  Events with no attributable device land in the
    unattributed bucket rather than poisoning either class.
    """
    nn = ns = ss = sn = viol = ns_pair_ok = unattributed = 0
    for _claimed, verdict, device, pair_changed in events:
        if device is None:
            unattributed += 1
            continue
        if pair_changed:
            viol += 1
        if device.truth == "normal":
            if verdict.treated_normal:
                nn += 1
            else:
                ns += 1
                if not pair_changed:
                    ns_pair_ok += 1
        else:
            if verdict.treated_normal:
                sn += 1
            else:
                ss += 1
    return CycleMetrics(
        normal_as_normal=nn,
        normal_as_sybil=ns,
        sybil_as_sybil=ss,
        sybil_as_normal=sn,
        member_packets=member_packets,
        edge_packets=edge_packets,
        aborted=aborted,
        normal_present=normal_present,
        sybil_present=sybil_present,
        pair_violations=viol,
        normal_as_sybil_pair_ok=ns_pair_ok,
        unattributed=unattributed,
    )


def run_cycle(
    world: World,
    verdict_log: Optional[list[tuple[int, int, str, Verdict]]] = None,
) -> CycleMetrics:
    """Run one full detection cycle and return its scored metrics.

    Injected failures materialize between the rounds.  With substitutes on,
    the boundary heartbeat notices, the in-flight attempt is aborted (its
    verdicts never happen), promotion runs, and the cycle re-runs from round
    1 under the new topology (unless configured to skip, in which case an
    aborted zero-verdict row is emitted and the row's participation counts
    are zero so it contributes nothing to rate denominators).  With
    substitutes off nobody notices mid-cycle: packets to dead radios are
    lost, their records die with them, and the directory drops dead edges at
    the next cycle boundary.
    """
    cfg = world.cfg
    params = cfg.channel
    r_bound = cfg.motion_budget

    # Cycle-boundary housekeeping: promote or retire units that died since
    # the last boundary (nothing is in flight, so no abort is needed).
    if cfg.substitutes_enabled:
        heartbeat_sweep(world.units, True)
    else:
        mark_silent_failures(world.units)
    if len(world.live_endpoints()) < 2:
        raise InsufficientEdges(
            f"cycle {world.cycle_index}: fewer than 2 live edge units remain"
        )

    pending_deaths = _deaths_for_cycle(world)
    member_packets = 0
    edge_packets = 0
    aborted = False
    attempt = 0

    while True:
        live = world.live_endpoints()
        if len(live) < 2:
            raise InsufficientEdges(
                f"cycle {world.cycle_index}: fewer than 2 live edge units remain"
            )
        endpoints = [(eid, pos) for eid, pos, _ in live]
        by_id = {eid: unit for eid, _, unit in live}
        pinned: dict[int, tuple[tuple[int, Position], tuple[int, Position]]] = {}
        emitters: dict[tuple[int, str], PhysicalNode] = {}

        # Round 1: every device transmits to its two nearest edges; the
        # nearer one relays its reading to the evaluator.
        for node in world.nodes:
            claimed = _emit_identity(world, node, 1)
            e1, e2 = select_edge_pair(node.pos, endpoints)
            pinned[node.index] = (e1, e2)
            member_packets += 2
            unit1 = by_id[e1[0]]
            unit2 = by_id[e2[0]]
            pkt = ControlPacket(claimed, e1[0], 1, world.cycle_index)
            r1 = rssi(params, euclidean_distance(node.pos, e1[1]))
            r2 = rssi(params, euclidean_distance(node.pos, e2[1]))
            if cfg.substitutes_enabled:
                for u in (unit1, unit2):
                    if u.status is EdgeStatus.PRIMARY and u.substitute_alive:
                        shadow_observe(u, pkt, node.pos, params)
            obs1 = RssiObservation(r1, 1, e1[0], claimed)
            report = forward_report(obs1, world.cycle_index, sender_alive=True)
            edge_packets += 1
            frame = world.frame_for(e1[0], e1[1], e2[0], e2[1])
            record = round1_process(pkt, report.observation.value, r2, frame, params, r_bound)
            world.evaluators[unit2.index].accept_round1(record, world.cycle_index)

        # Movement between the rounds, bounded by r_bound per device.
        world.advance(cfg.dt_between_rounds)

        # Failures land here, mid-cycle.
        if attempt == 0:
            for idx in pending_deaths:
                world.units[idx].primary_alive = False

        if cfg.substitutes_enabled:
            newly_declared = heartbeat_sweep(world.units, True)
            if newly_declared:
                # Abort: the in-flight attempt emits nothing.
                for ev in world.evaluators.values():
                    ev.clear()
                aborted = True
                if cfg.rerun_after_abort:
                    attempt += 1
                    continue
                metrics = CycleMetrics(
                    normal_as_normal=0,
                    normal_as_sybil=0,
                    sybil_as_sybil=0,
                    sybil_as_normal=0,
                    member_packets=member_packets,
                    edge_packets=edge_packets,
                    aborted=True,
                )
                _cleanup(world)
                world.advance(cfg.dt_between_rounds)
                world.cycle_index += 1
                return metrics

        # Round 2: same claimed-or-fresh identities, same pinned pair.  Of
        # the pinned radios, only those still alive receive anything.
        pair_changed: dict[int, bool] = {}
        live2 = world.live_endpoints()
        endpoints2 = [(eid, pos) for eid, pos, _ in live2]
        for node in world.nodes:
            claimed = _emit_identity(world, node, 2)
            e1, e2 = pinned[node.index]
            member_packets += 2
            unit1 = by_id[e1[0]]
            unit2 = by_id[e2[0]]
            e1_alive = _endpoint_alive(unit1, e1)
            e2_alive = _endpoint_alive(unit2, e2)
            pkt = ControlPacket(claimed, e1[0], 2, world.cycle_index)
            if cfg.substitutes_enabled:
                for u in (unit1, unit2):
                    if u.status is EdgeStatus.PRIMARY and u.substitute_alive:
                        shadow_observe(u, pkt, node.pos, params)
            if e1_alive:
                obs1 = RssiObservation(
                    rssi(params, euclidean_distance(node.pos, e1[1])), 2, e1[0], claimed
                )
                report = forward_report(obs1, world.cycle_index, sender_alive=True)
                edge_packets += 1
                if e2_alive:
                    r2v = rssi(params, euclidean_distance(node.pos, e2[1]))
                    eta2 = r2v / report.observation.value
                    if world.evaluators[unit2.index].accept_round2(
                        claimed, eta2, world.cycle_index
                    ):
                        emitters[(unit2.index, claimed)] = node
            if len(endpoints2) >= 2:
                now1, now2 = select_edge_pair(node.pos, endpoints2)
                pair_changed[node.index] = {now1[0], now2[0]} != {e1[0], e2[0]}
            else:
                pair_changed[node.index] = True

        # Judgment, evaluator by evaluator.
        events: list[tuple[str, Verdict, Optional[PhysicalNode], bool]] = []
        for unit in world.units:
            ev = world.evaluators[unit.index]
            if ev.empty:
                continue
            active = unit.active
            if active is None or not _endpoint_alive(unit, active):
                continue  # records died with the radio
            verdicts = judge(ev.records, list(ev.round2.items()), world.registry)
            for claimed, verdict in verdicts.items():
                node = emitters.get((unit.index, claimed))
                changed = pair_changed.get(node.index, False) if node else False
                events.append((claimed, verdict, node, changed))
                if verdict_log is not None:
                    verdict_log.append((world.cycle_index, unit.index, claimed, verdict))

        metrics = compute_metrics(
            events,
            normal_present=sum(1 for n in world.nodes if n.truth == "normal"),
            sybil_present=sum(1 for n in world.nodes if n.truth == "sybil"),
            member_packets=member_packets,
            edge_packets=edge_packets,
            aborted=aborted,
        )
        _cleanup(world)
        world.advance(cfg.dt_between_rounds)
        world.cycle_index += 1
        return metrics


def _cleanup(world: World) -> None:
    """End-of-cycle state teardown; nothing detection-related survives."""
    for ev in world.evaluators.values():
        ev.clear()
    for unit in world.units:
        unit.shadow.clear()


@dataclass
class ReplicationResult:
    index: int
    seed: int
    cycles: list[CycleMetrics]

    def totals(self) -> dict[str, int]:
        t = {
            "normal_as_normal": 0,
            "normal_as_sybil": 0,
            "sybil_as_sybil": 0,
            "sybil_as_normal": 0,
            "member_packets": 0,
            "edge_packets": 0,
            "normal_present": 0,
            "sybil_present": 0,
            "pair_violations": 0,
            "normal_as_sybil_pair_ok": 0,
            "unattributed": 0,
            "verdicts": 0,
            "aborted_cycles": 0,
        }
        for m in self.cycles:
            t["normal_as_normal"] += m.normal_as_normal
            t["normal_as_sybil"] += m.normal_as_sybil
            t["sybil_as_sybil"] += m.sybil_as_sybil
            t["sybil_as_normal"] += m.sybil_as_normal
            t["member_packets"] += m.member_packets
            t["edge_packets"] += m.edge_packets
            t["normal_present"] += m.normal_present
            t["sybil_present"] += m.sybil_present
            t["pair_violations"] += m.pair_violations
            t["normal_as_sybil_pair_ok"] += m.normal_as_sybil_pair_ok
            t["unattributed"] += m.unattributed
            t["verdicts"] += m.verdict_total
            t["aborted_cycles"] += int(m.aborted)
        return t

    def rates(self) -> dict[str, Optional[float]]:
        """Rates over participating identities (not over emitted verdicts).

        normal_accuracy is the share of participating honest identities
        actually ruled normal, so silently lost verdicts count against it.
        """
        t = self.totals()
        out: dict[str, Optional[float]] = {}
        out["normal_accuracy"] = (
            t["normal_as_normal"] / t["normal_present"] if t["normal_present"] else None
        )
        out["normal_misclassification"] = (
            t["normal_as_sybil"] / t["normal_present"] if t["normal_present"] else None
        )
        out["sybil_detection"] = (
            t["sybil_as_sybil"] / t["sybil_present"] if t["sybil_present"] else None
        )
        out["sybil_missed"] = (
            t["sybil_as_normal"] / t["sybil_present"] if t["sybil_present"] else None
        )
        out["pair_violation_rate"] = (
            t["pair_violations"] / t["verdicts"] if t["verdicts"] else None
        )
        return out


@dataclass
class SimulationResult:
    config: SimConfig
    replications: list[ReplicationResult]

    RATE_KEYS = (
        "normal_accuracy",
        "normal_misclassification",
        "sybil_detection",
        "sybil_missed",
        "pair_violation_rate",
    )

    def pooled(self) -> dict[str, Optional[dict[str, float]]]:
        """Mean and sample standard deviation of each rate across replications."""
        out: dict[str, Optional[dict[str, float]]] = {}
        for key in self.RATE_KEYS:
            values = [r.rates()[key] for r in self.replications]
            if any(v is None for v in values):
                out[key] = None
                continue
            mean, std = _mean_std([float(v) for v in values])
            out[key] = {"mean": mean, "std": std}
        return out


def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def run_simulation(
    cfg: SimConfig,
    progress: Optional[Callable[[int, int], None]] = None,
) -> SimulationResult:
    """Run all replications of a config.

    Replication k reseeds the whole world from cfg.seed + k, so results for
    a replication never depend on how many later ones run.
    """
    cfg.validate()
    reps = []
    for k in range(cfg.replications):
        rep_seed = cfg.seed + k
        world = build_world(replace(cfg, seed=rep_seed, replications=1))
        rows = [run_cycle(world) for _ in range(cfg.cycles)]
        reps.append(ReplicationResult(index=k, seed=rep_seed, cycles=rows))
        if progress is not None:
            progress(k + 1, cfg.replications)
    return SimulationResult(config=cfg, replications=reps)
