#!/usr/bin/env python3
# Walk through the core geometry: where can the round-2 RSSI ratio land,
# given the round-1 reading and a cap on how far the node can move?

import math

import numpy as np

from sybilsim import (
    ChannelParams,
    IntervalInputs,
    Position,
    euclidean_distance,
    localize,
    make_frame,
    ratio_interval_oracle,
    rssi,
    rssi_ratio_interval,
)

params = ChannelParams(gain=1.0, alpha=2.0)
e1 = Position(75.0, 50.0)
e2 = Position(25.0, 50.0)
frame = make_frame(e1, e2)
print(f"edge pair at {e1} / {e2}, half-separation c = {frame.c}")

node = Position(40.0, 62.0)
d1 = euclidean_distance(node, e1)
d2 = euclidean_distance(node, e2)
eta1 = rssi(params, d2) / rssi(params, d1)
print(f"node at {node}: d1 = {d1:.3f}, d2 = {d2:.3f}, round-1 ratio = {eta1:.5f}")

# The two edges recover the node's local position from the distances alone
# (up to the mirror ambiguity across the pair axis, which the band does not
# care about).
x1, y1sq = localize(d1, d2, frame)
print(f"localized in the pair frame: x = {x1:.3f}, y^2 = {y1sq:.3f}")

r = 8.0  # between the rounds the node moves at most this far
inputs = IntervalInputs(x1=x1, y1sq=y1sq, r=r, alpha=params.alpha)
band = rssi_ratio_interval(inputs, frame.c)
check = ratio_interval_oracle(inputs, frame.c, samples=50_000)
print(f"\nmotion budget r = {r}")
print(f"closed-form band  [{band.lo:.6f}, {band.hi:.6f}]")
print(f"sampled oracle    [{check.lo:.6f}, {check.hi:.6f}]")

# Every reachable position really does land inside the band.
rng = np.random.default_rng(7)
t = rng.uniform(0.0, 2.0 * math.pi, 2000)
rad = r * np.sqrt(rng.uniform(0.0, 1.0, 2000))
worst_lo, worst_hi = math.inf, -math.inf
for dx, dy in zip(rad * np.cos(t), rad * np.sin(t)):
    moved = Position(node.x + dx, node.y + dy)
    eta2 = rssi(params, euclidean_distance(moved, e2)) / rssi(
        params, euclidean_distance(moved, e1)
    )
    worst_lo = min(worst_lo, eta2)
    worst_hi = max(worst_hi, eta2)
print(f"2000 random moves: observed ratios span [{worst_lo:.6f}, {worst_hi:.6f}]")
print(f"all inside the band: {band.lo <= worst_lo and worst_hi <= band.hi}")

# No motion, no slack: the band collapses to the round-1 ratio itself.
point = rssi_ratio_interval(IntervalInputs(x1=x1, y1sq=y1sq, r=0.0, alpha=2.0), frame.c)
print(f"\nr = 0 band: [{point.lo:.6f}, {point.hi:.6f}] (width {point.hi - point.lo})")

# If the budget lets the node reach an edge, the band is open on that side:
# touching e1 sends the ratio to zero, touching e2 sends it to infinity.
near = Position(74.0, 50.0)
nx, nysq = localize(
    euclidean_distance(near, e1), euclidean_distance(near, e2), frame
)
wide = rssi_ratio_interval(IntervalInputs(x1=nx, y1sq=nysq, r=5.0, alpha=2.0), frame.c)
print(f"node 1 m from e1, budget 5 m: band = [{wide.lo}, {wide.hi:.6f}]")
