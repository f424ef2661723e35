"""Accuracy scoring against ground truth and per-window latency decomposition."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .graph import build_frame_graph
from .rules import Matcher, MatchNotification, RuleSet
from .tag import ReductionReport, aggregate, reduction_report
from .temporal import Interval
from .windowing import WindowState


@dataclass(frozen=True)
class GroundTruthEvent:
    kind: str
    interval: Interval
    participants: Tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {"kind": self.kind, "start_ms": self.interval.start,
                "end_ms": self.interval.end,
                "participants": list(self.participants)}


@dataclass(frozen=True)
class AccuracyReport:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_score: float

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn,
                "precision": self.precision, "recall": self.recall,
                "f_score": self.f_score}


@dataclass(frozen=True)
class LatencyReport:
    vekg_construction_ms: float
    tag_construction_ms: float
    tag_search_ms: float

    @property
    def total_ms(self) -> float:
        return (self.vekg_construction_ms + self.tag_construction_ms
                + self.tag_search_ms)

    def as_dict(self) -> dict:
        return {"vekg_construction_ms": self.vekg_construction_ms,
                "tag_construction_ms": self.tag_construction_ms,
                "tag_search_ms": self.tag_search_ms,
                "total_ms": self.total_ms}


def _scores(tp: int, fp: int, fn: int) -> AccuracyReport:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f = (2 * precision * recall / (precision + recall)
         if precision + recall > 0 else 0.0)
    return AccuracyReport(tp=tp, fp=fp, fn=fn, precision=precision,
                          recall=recall, f_score=f)


def temporal_iou(a: Interval, b: Interval) -> float:
    inter = min(a.end, b.end) - max(a.start, b.start)
    if inter <= 0:
        return 0.0
    union = max(a.end, b.end) - min(a.start, b.start)
    return inter / union


def score(notifications: Sequence[MatchNotification],
          ground_truth: Sequence[GroundTruthEvent],
          iou_time_threshold: float = 0.3) -> AccuracyReport:
    """Greedy one-to-one matching by same kind and temporal IoU."""
    if not 0.0 < iou_time_threshold <= 1.0:
        raise ValueError("iou_time_threshold must be in (0, 1]")
    unmatched = list(range(len(ground_truth)))
    tp = 0
    for note in sorted(notifications, key=lambda n: (n.interval.start, n.rule_id)):
        best = None
        for j in unmatched:
            truth = ground_truth[j]
            if truth.kind != note.kind.value:
                continue
            v = temporal_iou(note.interval, truth.interval)
            if v >= iou_time_threshold and (best is None or v > best[1]):
                best = (j, v)
        if best is not None:
            unmatched.remove(best[0])
            tp += 1
    fp = len(notifications) - tp
    fn = len(unmatched)
    return _scores(tp, fp, fn)


def from_counts(tp: int, fp: int, fn: int) -> AccuracyReport:
    """Precision/recall/F directly from counts."""
    return _scores(tp, fp, fn)


def time_window_run(window: WindowState, ruleset: RuleSet,
                    matcher: Optional[Matcher] = None):
    """Run and time the three pipeline stages for one window.

    VEKG construction is re-timed by rebuilding each frame graph from
    its source frame, so the report reflects this window regardless of
    where the graphs were originally built.

    Returns (notifications, LatencyReport, ReductionReport).
    """
    required = ruleset.required_relations()

    t0 = time.perf_counter()
    graphs = tuple(build_frame_graph(g.frame, required) for g in window.graphs
                   if g.frame is not None)
    t1 = time.perf_counter()
    rebuilt = WindowState(start=window.start, end=window.end, graphs=graphs)
    t2 = time.perf_counter()
    window_tag = aggregate(rebuilt, required)
    t3 = time.perf_counter()
    if matcher is None:
        matcher = Matcher(ruleset)
    notifications = matcher.match(window_tag)
    t4 = time.perf_counter()

    latency = LatencyReport(
        vekg_construction_ms=(t1 - t0) * 1000.0,
        tag_construction_ms=(t3 - t2) * 1000.0,
        tag_search_ms=(t4 - t3) * 1000.0)
    return notifications, latency, reduction_report(rebuilt, window_tag)
