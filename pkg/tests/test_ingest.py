"""Stream parsing, validation, and round-trip tests."""

import json

import pytest

from vekg.errors import (MalformedRecord, NonMonotonicTime, SchemaViolation,
                         SourceUnavailable)
from vekg.ingest import (COCO_KEYPOINT_NAMES, StreamHeader, open_stream,
                         parse_frame, parse_header, serialize_frame,
                         serialize_header, write_stream)

HEADER = '{"format":"vekg-detections","version":1,"resolution":[1920,1080]}'


def line(frame=0, ts=0, objects=None):
    if objects is None:
        objects = [{"track": 7, "label": "person", "conf": 0.9,
                    "bbox": [10, 10, 40, 100]}]
    return json.dumps({"frame": frame, "ts_ms": ts, "objects": objects})


class TestParseFrame:
    def test_single_person(self):
        f = parse_frame(line())
        assert len(f.objects) == 1
        o = f.objects[0]
        assert o.track_id == 7 and o.label == "person"
        assert (o.bbox.x, o.bbox.y, o.bbox.w, o.bbox.h) == (10, 10, 40, 100)

    def test_zero_width_rejected(self):
        bad = line(objects=[{"track": 1, "label": "car", "conf": 0.5,
                             "bbox": [0, 0, 0, 10]}])
        with pytest.raises(SchemaViolation):
            parse_frame(bad)

    def test_equal_timestamps_rejected(self):
        parse_frame(line(frame=0, ts=100))
        with pytest.raises(NonMonotonicTime):
            parse_frame(line(frame=1, ts=100), prev=(0, 100))

    def test_frame_index_must_advance(self):
        with pytest.raises(NonMonotonicTime):
            parse_frame(line(frame=3, ts=200), prev=(3, 100))

    def test_not_json(self):
        with pytest.raises(MalformedRecord):
            parse_frame("not json at all")

    def test_missing_field(self):
        with pytest.raises(SchemaViolation):
            parse_frame('{"frame": 0, "objects": []}')

    def test_confidence_range(self):
        bad = line(objects=[{"track": 1, "label": "car", "conf": 1.5,
                             "bbox": [0, 0, 5, 5]}])
        with pytest.raises(SchemaViolation):
            parse_frame(bad)

    def test_duplicate_track_ids(self):
        objs = [{"track": 1, "label": "car", "conf": 0.5, "bbox": [0, 0, 5, 5]},
                {"track": 1, "label": "car", "conf": 0.5, "bbox": [9, 9, 5, 5]}]
        with pytest.raises(SchemaViolation):
            parse_frame(line(objects=objs))

    def test_unknown_attrs_preserved(self):
        objs = [{"track": 1, "label": "car", "conf": 0.5, "bbox": [0, 0, 5, 5],
                 "attrs": {"color": "red", "custom_key": "kept"}}]
        f = parse_frame(line(objects=objs))
        assert f.objects[0].attributes["custom_key"] == "kept"

    def test_keypoints_parsed(self):
        objs = [{"track": 1, "label": "person", "conf": 0.5,
                 "bbox": [0, 0, 5, 5],
                 "keypoints": {"right_wrist": [52.0, 61.5]}}]
        f = parse_frame(line(objects=objs))
        assert f.objects[0].keypoints["right_wrist"] == (52.0, 61.5)

    def test_roundtrip(self):
        objs = [{"track": 2, "label": "car", "conf": 0.75,
                 "bbox": [1.5, 2.5, 30, 20], "attrs": {"color": "blue"},
                 "keypoints": {"nose": [3.0, 4.0]}, "features": [0.1, 0.2]}]
        f = parse_frame(line(frame=4, ts=133, objects=objs))
        assert parse_frame(serialize_frame(f)) == f


class TestHeader:
    def test_roundtrip(self):
        h = StreamHeader(resolution=(640, 480))
        assert parse_header(serialize_header(h)) == h

    def test_bad_header(self):
        with pytest.raises(MalformedRecord):
            parse_header('{"something": "else"}')


class TestOpenStream:
    def test_three_frames(self, tmp_path):
        p = tmp_path / "s.jsonl"
        p.write_text(HEADER + "\n" + line(0, 0) + "\n"
                     + line(1, 33) + "\n" + line(2, 66) + "\n")
        frames = list(open_stream(str(p)))
        assert [f.timestamp for f in frames] == [0, 33, 66]

    def test_empty_body(self, tmp_path):
        p = tmp_path / "s.jsonl"
        p.write_text(HEADER + "\n")
        assert list(open_stream(str(p))) == []

    def test_bad_line_reports_position(self, tmp_path):
        p = tmp_path / "s.jsonl"
        p.write_text(HEADER + "\n" + line(0, 0) + "\n" + "garbage\n")
        reader = open_stream(str(p))
        it = iter(reader)
        assert next(it).frame_index == 0
        with pytest.raises(MalformedRecord, match="line 3"):
            next(it)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SourceUnavailable):
            list(open_stream(str(tmp_path / "nope.jsonl")))

    def test_timestamps_strictly_increase(self, tmp_path):
        p = tmp_path / "s.jsonl"
        p.write_text(HEADER + "\n" + line(0, 10) + "\n" + line(1, 5) + "\n")
        with pytest.raises(NonMonotonicTime):
            list(open_stream(str(p)))

    def test_write_stream_roundtrip(self, tmp_path):
        frames = [parse_frame(line(i, i * 33)) for i in range(3)]
        p = tmp_path / "out.jsonl"
        write_stream(str(p), StreamHeader(resolution=(1920, 1080)), frames)
        reader = open_stream(str(p))
        assert list(reader) == frames
        assert reader.header.resolution == (1920, 1080)


def test_coco_names_complete():
    assert len(COCO_KEYPOINT_NAMES) == 17
    assert "right_wrist" in COCO_KEYPOINT_NAMES
