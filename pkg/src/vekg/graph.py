"""Per-frame complete directed labeled graphs over detected objects.

Each frame becomes a graph with one node per object and n(n-1)
directed edges.  Edge relations are materialized lazily: only the
relations required by the registered rules are evaluated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, Optional, Tuple

from . import geometry
from .errors import CoincidentCentroids, UnknownRelation
from .ingest import FrameDetections, ObjectNode


def _rel_topology(a, b):
    return geometry.topology(a, b)


def _rel_overlap(a, b):
    return geometry.SpatialRelationClass.OVERLAP in geometry.topology(a, b)


def _rel_direction(a, b):
    # Undefined (None) for coincident centroids; rules treat it as no match.
    try:
        return geometry.direction(a, b)
    except CoincidentCentroids:
        return None


RELATION_FUNCS = {
    "topology": _rel_topology,       # set of SpatialRelationClass
    "overlap": _rel_overlap,         # boolean relation operation
    "direction": _rel_direction,     # DirectionClass or None
    "distance": geometry.centroid_distance,   # metric relation operation
    "overlap_ratio": geometry.overlap_ratio,  # metric relation operation
}


@dataclass(frozen=True)
class VekgGraph:
    """Complete directed labeled graph of one frame."""

    timestamp: int
    nodes: Tuple[ObjectNode, ...]
    edges: Dict[Tuple[int, int], Dict[str, object]]
    relation_classes: FrozenSet[str]
    frame: Optional[FrameDetections] = None
    build_ms: float = 0.0

    @property
    def node_properties(self) -> Dict[int, Dict[str, str]]:
        return {o.track_id: o.attributes for o in self.nodes}

    def node(self, track_id: int) -> ObjectNode:
        for o in self.nodes:
            if o.track_id == track_id:
                return o
        raise KeyError(track_id)

    def dump(self) -> str:
        """Line-based adjacency listing for debugging."""
        lines = [f"graph ts={self.timestamp} nodes={len(self.nodes)} "
                 f"edges={len(self.edges)}"]
        for o in sorted(self.nodes, key=lambda n: n.track_id):
            lines.append(f"node {o.track_id} {o.label} conf={o.confidence:g} "
                         f"bbox={o.bbox.x:g},{o.bbox.y:g},{o.bbox.w:g},{o.bbox.h:g}")
        for (u, v) in sorted(self.edges):
            vals = " ".join(f"{r}={_fmt(val)}" for r, val in sorted(self.edges[(u, v)].items()))
            lines.append(f"edge {u}->{v} {vals}")
        return "\n".join(lines)


def _fmt(val) -> str:
    if isinstance(val, frozenset):
        return "{" + ",".join(sorted(c.value for c in val)) + "}"
    if hasattr(val, "value"):
        return str(val.value)
    if isinstance(val, float):
        return f"{val:.3f}"
    return str(val)


def build_frame_graph(frame: FrameDetections,
                      required_relations) -> VekgGraph:
    """Build the frame's graph, evaluating exactly the required relations."""
    required = frozenset(required_relations)
    unknown = required - RELATION_FUNCS.keys()
    if unknown:
        raise UnknownRelation(f"unknown relation(s): {sorted(unknown)}")
    t0 = time.perf_counter()
    edges: Dict[Tuple[int, int], Dict[str, object]] = {}
    for a in frame.objects:
        for b in frame.objects:
            if a.track_id == b.track_id:
                continue
            edges[(a.track_id, b.track_id)] = {
                rel: RELATION_FUNCS[rel](a.bbox, b.bbox) for rel in required
            }
    build_ms = (time.perf_counter() - t0) * 1000.0
    return VekgGraph(timestamp=frame.timestamp, nodes=tuple(frame.objects),
                     edges=edges, relation_classes=required, frame=frame,
                     build_ms=build_ms)


def stream_graphs(frames, required_relations) -> Iterator[VekgGraph]:
    """Map an ordered frame stream to an ordered graph stream."""
    required = frozenset(required_relations)
    for frame in frames:
        yield build_frame_graph(frame, required)
