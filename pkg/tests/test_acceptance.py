"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Every criterion is verified against an oracle or analytic bound that is
computed independently of the implementation under test.
"""

import functools
import itertools
import json
import random
import statistics
import sys
import time

import numpy as np
import pytest

from conftest import random_window
from vekg import synth
from vekg.cli import EXIT_OK, main
from vekg.geometry import BoundingBox, SpatialRelationClass as S, topology
from vekg.graph import stream_graphs
from vekg.metrics import from_counts, score
from vekg.pipeline import run_pipeline
from vekg.rules import register_rules
from vekg.tag import X, aggregate, edge_series
from vekg.temporal import (CONVERSE, Interval, _l2_cost_factory, allen,
                           pelt_changepoints, segmentation_cost)
from vekg.windowing import time_window


def criterion(num, name):
    """Emit one PASS/FAIL line per criterion, bypassing pytest capture."""
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                sys.__stdout__.write(f"ACCEPTANCE {num} {name}: FAIL\n")
                raise
            sys.__stdout__.write(f"ACCEPTANCE {num} {name}: PASS\n")
        return wrapper
    return deco


# ---------------------------------------------------------------------------
# 1. geometry oracle equivalence, all integer box pairs with coords in [0,8]

@criterion(1, "geometry-oracle-equivalence")
def test_acceptance_1_geometry_oracle():
    t0 = time.perf_counter()
    intervals = [(l, r) for l in range(9) for r in range(l + 1, 9)]
    ni = len(intervals)

    # per-axis point membership on a half-step grid (exact for integers)
    grid = np.arange(0.0, 8.5, 0.5)
    closed = np.zeros((ni, len(grid)), dtype=bool)
    interior = np.zeros((ni, len(grid)), dtype=bool)
    for k, (l, r) in enumerate(intervals):
        closed[k] = (grid >= l) & (grid <= r)
        interior[k] = (grid > l) & (grid < r)
    bound = closed & ~interior

    # pairwise per-axis flags via boolean matrix products
    cc = (closed.astype(int) @ closed.T.astype(int)) > 0
    oo = (interior.astype(int) @ interior.T.astype(int)) > 0
    ee = (bound.astype(int) @ bound.T.astype(int)) > 0
    ec = (bound.astype(int) @ closed.T.astype(int)) > 0
    sub_cc = (closed.astype(int) @ (~closed).T.astype(int)) == 0
    sub_co = (closed.astype(int) @ (~interior).T.astype(int)) == 0

    # every box is an (x-interval, y-interval) pair
    ix = np.repeat(np.arange(ni), ni)
    iy = np.tile(np.arange(ni), ni)
    nb = ni * ni

    def pair(flags_x, flags_y):
        return flags_x[ix[:, None], ix[None, :]] & \
            flags_y[iy[:, None], iy[None, :]]

    closed2 = pair(cc, cc)
    open2 = pair(oo, oo)
    a_in_b = pair(sub_cc, sub_cc)
    b_in_a = pair(sub_cc.T, sub_cc.T)
    inside = pair(sub_co, sub_co)
    boundary_meet = (pair(ee, cc) | pair(ec, ec.T)
                     | pair(ec.T, ec) | pair(cc, ee))

    # encode the expected relation set per pair as a small integer
    oracle = np.where(
        ~closed2, 0,
        np.where(~open2, 1,
                 2 + 4 * b_in_a + 8 * a_in_b + 16 * (a_in_b & inside)
                 + 32 * (a_in_b & ~inside & boundary_meet)
                 + 64 * (~a_in_b & ~b_in_a)))

    def encode(rels):
        if rels == {S.DISJOINT}:
            return 0
        assert S.INTERSECT in rels and S.CROSSES not in rels
        if S.TOUCH in rels:
            assert rels == {S.TOUCH, S.INTERSECT}
            return 1
        return (2 + 4 * (S.CONTAINS in rels) + 8 * (S.WITHIN in rels)
                + 16 * (S.INSIDE in rels) + 32 * (S.COVERED_BY in rels)
                + 64 * (S.OVERLAP in rels))

    boxes = [BoundingBox(intervals[i][0], intervals[j][0],
                         intervals[i][1] - intervals[i][0],
                         intervals[j][1] - intervals[j][0])
             for i in range(ni) for j in range(ni)]
    assert len(boxes) == nb

    memo = {}
    got = np.empty((nb, nb), dtype=np.int64)
    for a_idx, a in enumerate(boxes):
        row = got[a_idx]
        for b_idx, b in enumerate(boxes):
            rels = topology(a, b)
            code = memo.get(rels)
            if code is None:
                code = memo[rels] = encode(set(rels))
            row[b_idx] = code

    assert np.array_equal(got, oracle), \
        f"{int((got != oracle).sum())} of {nb * nb} pairs disagree"
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"took {elapsed:.1f}s"


# ---------------------------------------------------------------------------
# 2. Allen algebra exhaustive over endpoints {0..5}

@criterion(2, "allen-exhaustive")
def test_acceptance_2_allen():
    t0 = time.perf_counter()
    intervals = [Interval(s, e) for s in range(6) for e in range(s + 1, 6)]

    def holding(a, b):
        defs = {
            "before": a.end < b.start,
            "meets": a.end == b.start,
            "overlaps": a.start < b.start < a.end < b.end,
            "starts": a.start == b.start and a.end < b.end,
            "during": b.start < a.start and a.end < b.end,
            "finishes": b.start < a.start and a.end == b.end,
            "equals": a.start == b.start and a.end == b.end,
            "after": b.end < a.start,
            "met_by": b.end == a.start,
            "overlapped_by": b.start < a.start < b.end < a.end,
            "started_by": a.start == b.start and b.end < a.end,
            "contains": a.start < b.start and b.end < a.end,
            "finished_by": a.start < b.start and a.end == b.end,
        }
        return [k for k, v in defs.items() if v]

    for a, b in itertools.product(intervals, repeat=2):
        hold = holding(a, b)
        assert len(hold) == 1                       # exactly one relation
        assert allen(a, b).value == hold[0]
        assert allen(b, a) is CONVERSE[allen(a, b)]
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"took {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# 3. PELT optimality on 200 random series of length <= 16

@criterion(3, "pelt-optimality")
def test_acceptance_3_pelt():
    t0 = time.perf_counter()

    def optimal_cost(series, penalty):
        # unpruned exact search over all segmentations (O(n^2) DP)
        arr = np.asarray(series, dtype=float)
        cost = _l2_cost_factory(arr)
        n = len(arr)
        f = [0.0] + [float("inf")] * n
        for t in range(1, n + 1):
            f[t] = min(f[s] + cost(s, t) + (penalty if s > 0 else 0.0)
                       for s in range(t))
        return f[n]

    rng = random.Random(31)
    for trial in range(200):
        n = rng.randint(2, 16)
        series = [rng.uniform(-10, 10) for _ in range(n)]
        penalty = rng.uniform(0.01, 20.0)
        cps = pelt_changepoints(series, penalty)
        got = segmentation_cost(series, cps, penalty)
        want = optimal_cost(series, penalty)
        # summation order differs between the two, so allow rounding slack
        assert abs(got - want) <= 1e-9, f"trial {trial}: {got} != {want}"
        if n <= 10:   # cross-check against full enumeration of 2^(n-1) masks
            best = min(
                segmentation_cost(
                    series,
                    [i + 1 for i in range(n - 1) if mask >> i & 1],
                    penalty)
                for mask in range(1 << (n - 1)))
            assert abs(got - best) <= 1e-9
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0, f"took {elapsed:.1f}s"


# ---------------------------------------------------------------------------
# 4. structural laws on 100 random windows

@criterion(4, "structural-laws")
def test_acceptance_4_structure():
    rng = random.Random(41)
    for _ in range(100):
        win = random_window(rng)
        for g in win.graphs:
            n = len(g.nodes)
            assert len(g.edges) == n * (n - 1)
        tag = aggregate(win, {"distance"})
        n = len(tag.nodes)
        assert len(tag.edges) == n * n
        for i, g in enumerate(win.graphs):
            for (u, v), vals in g.edges.items():
                assert edge_series(tag, u, v, "distance")[i] == vals["distance"]


# ---------------------------------------------------------------------------
# 5. reduction on the 60 s street scene

@criterion(5, "street-reduction")
def test_acceptance_5_reduction():
    t0 = time.perf_counter()
    sc = synth.get_scenario("street")
    rs = register_rules([dict(r) for r in sc.rule_configs])
    results = list(run_pipeline(synth.generate_frames(sc), rs))
    assert len(results) == 1
    red = results[0].reduction
    assert red.rin >= 0.99, f"RIN {red.rin:.4f}"
    assert red.rie >= 0.5, f"RIE {red.rie:.4f}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"took {elapsed:.1f}s"
    sys.__stdout__.write(
        f"  street 60s: RIN={red.rin:.4f} RIE={red.rie:.4f}\n")


# ---------------------------------------------------------------------------
# 6. aggregated search vs per-frame scan on the 10-minute street window

@criterion(6, "tag-search-speed")
def test_acceptance_6_search_speed():
    sc = synth.get_scenario("street_10min")
    required = {"distance"}
    windows = list(time_window(
        stream_graphs(synth.generate_frames(sc), required), sc.window_ms))
    assert len(windows) == 1
    window = windows[0]
    tag = aggregate(window, required)
    u, v = sorted(tag.nodes)[:2]

    def tag_search():
        return min(s for s in edge_series(tag, u, v, "distance") if s is not X)

    def frame_scan():
        best = None
        for g in window.graphs:
            vals = g.edges.get((u, v))
            if vals is None:
                continue
            d = vals["distance"]
            if best is None or d < best:
                best = d
        return best

    t_tag, t_scan = [], []
    for _ in range(7):
        t0 = time.perf_counter()
        r1 = tag_search()
        t_tag.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        r2 = frame_scan()
        t_scan.append(time.perf_counter() - t0)
        assert r1 == r2
    med_tag = statistics.median(t_tag)
    med_scan = statistics.median(t_scan)
    assert med_tag <= 0.5 * med_scan, \
        f"tag search {med_tag * 1e3:.3f}ms vs scan {med_scan * 1e3:.3f}ms"
    sys.__stdout__.write(
        f"  10min search: tag={med_tag * 1e3:.3f}ms "
        f"scan={med_scan * 1e3:.3f}ms ({med_scan / med_tag:.1f}x)\n")


# ---------------------------------------------------------------------------
# 7. latency decomposition and desk-scale bound

@criterion(7, "latency-decomposition")
def test_acceptance_7_latency():
    totals = []
    for name in ("fall_positive", "traffic_positive", "parking_positive"):
        sc = synth.get_scenario(name)
        rs = register_rules([dict(r) for r in sc.rule_configs])
        for result in run_pipeline(synth.generate_frames(sc), rs):
            lat = result.latency
            assert lat.total_ms == pytest.approx(
                lat.vekg_construction_ms + lat.tag_construction_ms
                + lat.tag_search_ms)
            totals.append(lat.total_ms)
    med = statistics.median(totals)
    assert med <= 100.0, f"median window latency {med:.1f}ms"
    sys.__stdout__.write(f"  median window latency: {med:.2f}ms\n")


# ---------------------------------------------------------------------------
# 8. rule closed loop: exact at zero noise, robust under jitter + dropout

RULE_SCENARIOS = ["fall", "horse_ride", "bike_ride", "handshake", "punch",
                  "traffic", "parking", "jaywalk", "attribute"]


def _loop_f_score(sc):
    rs = register_rules([dict(r) for r in sc.rule_configs])
    notes = []
    for result in run_pipeline(synth.generate_frames(sc), rs):
        notes += result.notifications
    if not sc.planted_events:
        return len(notes)
    return score(notes, list(sc.planted_events)).f_score


@criterion(8, "rule-closed-loop")
def test_acceptance_8_closed_loop():
    for name in RULE_SCENARIOS:
        f = _loop_f_score(synth.get_scenario(f"{name}_positive"))
        assert f == 1.0, f"{name}_positive zero-noise F={f:.3f}"
        count = _loop_f_score(synth.get_scenario(f"{name}_negative"))
        assert count == 0, f"{name}_negative fired {count} notification(s)"
        noisy = synth.get_scenario(f"{name}_positive").with_noise(
            2.0, 0.05, seed=7)
        f = _loop_f_score(noisy)
        assert f >= 0.8, f"{name}_positive noisy F={f:.3f}"


# ---------------------------------------------------------------------------
# 9. end-to-end determinism of cmd_run

@criterion(9, "run-determinism")
def test_acceptance_9_determinism(tmp_path):
    stream = tmp_path / "s.jsonl"
    truth = tmp_path / "t.jsonl"
    rules = tmp_path / "r.yaml"
    assert main(["gen", "parking_positive", "--seed", "2", "--noise-px", "1",
                 "--dropout", "0.02", "--out", str(stream),
                 "--truth", str(truth), "--rules", str(rules)]) == EXIT_OK
    outputs = []
    for name in ("o1.jsonl", "o2.jsonl"):
        out = tmp_path / name
        assert main(["--quiet", "run", "--input", str(stream),
                     "--rules", str(rules), "--out", str(out)]) == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0]   # non-empty: the scenario has matches


# ---------------------------------------------------------------------------
# 10. precision/recall/F formulas on randomized triples

@criterion(10, "score-formulas")
def test_acceptance_10_formulas():
    rng = random.Random(101)
    for _ in range(1000):
        tp = rng.randint(0, 500)
        fp = rng.randint(0, 500)
        fn = rng.randint(0, 500)
        rep = from_counts(tp, fp, fn)
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        assert abs(rep.precision - p) <= 1e-12
        assert abs(rep.recall - r) <= 1e-12
        assert abs(rep.f_score - f) <= 1e-12
