"""Unit tests for the two-round protocol pieces: pair selection, round-1
record formation, cross-edge forwarding, dedup, and the judgment rules."""

import math

import pytest

from sybilsim.channel import ChannelParams, RssiObservation, rssi
from sybilsim.geometry import Position, euclidean_distance, make_frame
from sybilsim.protocol import (
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

PARAMS = ChannelParams(gain=1.0, alpha=2.0)
REGISTRY = MembershipRegistry(frozenset({"N0001", "N0002", "N0003", "N0004"}))


def observe(node_pos, edge_pos, round_no, edge_id, claimed):
    return RssiObservation(
        rssi(PARAMS, euclidean_distance(node_pos, edge_pos)), round_no, edge_id, claimed
    )


def run_round1(node_pos, e1, e2, claimed, r=30.0, cycle=0):
    """Drive round1_process the way an edge pair would for a real packet."""
    frame = make_frame(e1[1], e2[1])
    pkt = ControlPacket(claimed, e1[0], 1, cycle)
    r1 = rssi(PARAMS, euclidean_distance(node_pos, e1[1]))
    r2 = rssi(PARAMS, euclidean_distance(node_pos, e2[1]))
    return round1_process(pkt, r1, r2, frame, PARAMS, r)


def eta_at(node_pos, e1_pos, e2_pos):
    d1 = euclidean_distance(node_pos, e1_pos)
    d2 = euclidean_distance(node_pos, e2_pos)
    return (d1 / d2) ** 2


def test_select_edge_pair_nearest_two():
    edges = [(0, Position(1.0, 0.0)), (1, Position(5.0, 0.0)), (2, Position(0.0, 2.0))]
    e1, e2 = select_edge_pair(Position(0.0, 0.0), edges)
    assert e1 == (0, Position(1.0, 0.0))
    assert e2 == (2, Position(0.0, 2.0))


def test_select_edge_pair_tie_breaks_to_lower_id():
    edges = [(3, Position(1.0, 0.0)), (1, Position(-1.0, 0.0))]
    e1, e2 = select_edge_pair(Position(0.0, 0.0), edges)
    assert e1[0] == 1
    assert e2[0] == 3


def test_select_edge_pair_needs_two():
    with pytest.raises(InsufficientEdges):
        select_edge_pair(Position(0.0, 0.0), [(0, Position(1.0, 0.0))])


def test_round1_record_mid_plane_example():
    # Node at local (0, 1) between edges 2 m apart: eta1 = 1 and the
    # interval matches the canonical reference geometry.
    e1 = (0, Position(1.0, 0.0))
    e2 = (1, Position(-1.0, 0.0))
    record = run_round1(Position(0.0, 1.0), e1, e2, "N0001", r=0.5)
    assert record.valid
    assert record.eta1 == pytest.approx(1.0)
    assert record.interval.lo == pytest.approx(0.33677424517574706, rel=1e-9)
    assert record.interval.hi == pytest.approx(2.969348203803845, rel=1e-9)
    assert record.interval.contains(record.eta1)


def test_round1_zero_radius_point_interval():
    e1 = (0, Position(1.0, 0.0))
    e2 = (1, Position(-1.0, 0.0))
    record = run_round1(Position(0.3, 2.0), e1, e2, "N0001", r=0.0)
    assert record.valid
    assert record.interval.lo == pytest.approx(record.eta1, rel=1e-9)
    assert record.interval.hi == pytest.approx(record.eta1, rel=1e-9)


def test_round1_nonpositive_rssi_invalid_record():
    e1 = (0, Position(1.0, 0.0))
    e2 = (1, Position(-1.0, 0.0))
    frame = make_frame(e1[1], e2[1])
    pkt = ControlPacket("N0001", 0, 1, 0)
    record = round1_process(pkt, 0.0, 0.5, frame, PARAMS, 1.0)
    assert not record.valid
    assert record.interval is None


def test_forward_report_and_dead_sender():
    obs = RssiObservation(0.25, 1, 0, "N0001")
    report = forward_report(obs, cycle=3)
    assert report is not None and report.observation is obs and report.cycle == 3
    assert forward_report(obs, cycle=3, sender_alive=False) is None


def test_evaluator_dedup_first_wins():
    ev = EvaluatorState()
    e1 = (0, Position(1.0, 0.0))
    e2 = (1, Position(-1.0, 0.0))
    first = run_round1(Position(0.0, 1.0), e1, e2, "N0001", r=0.5)
    second = run_round1(Position(0.4, 0.2), e1, e2, "N0001", r=0.5)
    assert ev.accept_round1(first, cycle=0)
    assert not ev.accept_round1(second, cycle=0)  # duplicate delivery dropped
    assert ev.records["N0001"] is first
    assert ev.accept_round2("N0001", 1.0, cycle=0)
    assert not ev.accept_round2("N0001", 2.0, cycle=0)
    assert ev.round2["N0001"] == 1.0
    assert ev.retained_records() == 2
    ev.clear()
    assert ev.empty
    assert ev.retained_records() == 0


class TestJudge:
    """The three narrative scenarios: all honest, one forged id appended,
    and one device re-badging mid-cycle."""

    E1 = (0, Position(1.0, 0.0))
    E2 = (1, Position(-1.0, 0.0))

    def setup_method(self):
        self.positions = {
            "N0001": Position(0.0, 1.0),
            "N0002": Position(0.5, 0.5),
            "N0003": Position(-0.3, 2.0),
            "N0004": Position(0.2, -1.5),
        }
        self.records = {
            claimed: run_round1(pos, self.E1, self.E2, claimed, r=0.5)
            for claimed, pos in self.positions.items()
        }

    def eta2_from(self, pos):
        return eta_at(pos, self.E1[1], self.E2[1])

    def test_all_honest_all_normal(self):
        round2 = [(claimed, self.eta2_from(pos)) for claimed, pos in self.positions.items()]
        verdicts = judge(self.records, round2, REGISTRY)
        assert all(v is Verdict.NORMAL for v in verdicts.values())
        assert len(verdicts) == 4

    def test_new_id_matching_unmatched_interval_is_sybil(self):
        # The device that claimed N0004 in round 1 reappears as "X9999":
        # its ratio still fits N0004's feasibility band, so it is flagged.
        round2 = [
            (claimed, self.eta2_from(pos))
            for claimed, pos in self.positions.items()
            if claimed != "N0004"
        ]
        round2.append(("X9999", self.eta2_from(self.positions["N0004"])))
        verdicts = judge(self.records, round2, REGISTRY)
        assert verdicts["X9999"] is Verdict.SYBIL
        assert verdicts["N0001"] is Verdict.NORMAL
        assert "N0004" not in verdicts  # departed id gets no verdict

    def test_matched_id_outside_interval_is_sybil(self):
        # Round-2 packet for N0003 actually comes from a device far outside
        # N0003's reachable disk.
        round2 = [
            ("N0001", self.eta2_from(self.positions["N0001"])),
            ("N0002", self.eta2_from(self.positions["N0002"])),
            ("N0003", self.eta2_from(Position(0.9, -0.1))),
            ("N0004", self.eta2_from(self.positions["N0004"])),
        ]
        verdicts = judge(self.records, round2, REGISTRY)
        assert verdicts["N0003"] is Verdict.SYBIL
        assert verdicts["N0001"] is Verdict.NORMAL
        assert verdicts["N0004"] is Verdict.NORMAL

    def test_new_id_no_interval_match_consults_registry(self):
        # Everyone reappears, plus an extra id with a ratio fitting no
        # unmatched band: registered -> NewMember, unregistered -> Sybil.
        base = [(claimed, self.eta2_from(pos)) for claimed, pos in self.positions.items()]
        verdicts = judge(self.records, base + [("X7777", 123.0)], REGISTRY)
        assert verdicts["X7777"] is Verdict.SYBIL

        wide_registry = MembershipRegistry(REGISTRY.registered | {"N0099"})
        verdicts = judge(self.records, base + [("N0099", 123.0)], wide_registry)
        assert verdicts["N0099"] is Verdict.NEW_MEMBER
        assert verdicts["N0099"].treated_normal

    def test_closest_eta_preference_for_unmatched_bands(self):
        # Two unmatched round-1 records with overlapping bands: the new id
        # is attributed to the band whose round-1 ratio is closest.
        a = run_round1(Position(0.05, 1.0), self.E1, self.E2, "A", r=0.5)
        b = run_round1(Position(-0.05, 1.0), self.E1, self.E2, "B", r=0.5)
        records = {"A": a, "B": b}
        eta2 = self.eta2_from(Position(0.06, 1.01))
        verdicts = judge(records, [("NEW", eta2)], REGISTRY)
        assert verdicts["NEW"] is Verdict.SYBIL
        assert a.matched_round2 == eta2
        assert b.matched_round2 is None


def test_verdict_totality_every_round2_id_judged():
    e1 = (0, Position(1.0, 0.0))
    e2 = (1, Position(-1.0, 0.0))
    records = {"N0001": run_round1(Position(0.0, 1.0), e1, e2, "N0001", r=0.5)}
    round2 = [("N0001", 1.0), ("Z1", 5.0), ("Z2", 0.2), ("Z3", 1.0)]
    verdicts = judge(records, round2, REGISTRY)
    assert set(verdicts) == {"N0001", "Z1", "Z2", "Z3"}
