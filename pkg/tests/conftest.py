"""Shared builders for the test suite."""

import random

from vekg.geometry import BoundingBox
from vekg.graph import build_frame_graph
from vekg.ingest import FrameDetections, ObjectNode
from vekg.windowing import WindowState


def obj(track, label="car", bbox=(0, 0, 10, 10), conf=0.9, attrs=None,
        keypoints=None):
    return ObjectNode(track_id=track, label=label, confidence=conf,
                      bbox=BoundingBox(*bbox), attributes=attrs or {},
                      keypoints=keypoints)


def frame(idx, ts, objects):
    return FrameDetections(frame_index=idx, timestamp=ts,
                           objects=tuple(objects))


def window_of(frames, relations=(), start=None, end=None):
    """Build a WindowState directly from frames (single-window shortcut)."""
    graphs = tuple(build_frame_graph(f, relations) for f in frames)
    ts = [f.timestamp for f in frames]
    return WindowState(start=ts[0] if start is None else start,
                       end=(ts[-1] + 1) if end is None else end,
                       graphs=graphs)


def random_window(rng: random.Random, relations=("distance",),
                  max_tracks=6, max_frames=12):
    """A window with random per-frame track presence and random boxes."""
    tracks = list(range(1, rng.randint(2, max_tracks) + 1))
    nframes = rng.randint(1, max_frames)
    frames = []
    for i in range(nframes):
        objs = []
        for t in tracks:
            if rng.random() < 0.7:
                x = rng.uniform(0, 500)
                y = rng.uniform(0, 500)
                objs.append(obj(t, bbox=(x, y, rng.uniform(1, 60),
                                         rng.uniform(1, 60))))
        frames.append(frame(i, i * 33, objs))
    return window_of(frames, relations, start=0, end=nframes * 33 + 1)
