"""Landmark frame data model and NDJSON parsing/serialization.

One frame is one observation from the upstream landmark provider: up to
two hands (21 points each), an optional 68-point face with optional
5-point iris blocks, and an optional 33-point body pose. Coordinates are
normalized to the image ([0,1], y pointing down); all metric geometry
downstream works in pixel units via to_pixels.

The NDJSON line format is the bit-exact contract with providers,
fixtures and the control panel:

  {"t": <ms>, "img": {"w": <int>, "h": <int>},
   "hands": [{"hand": "left"|"right", "score": <0..1>, "lm": [[x,y,z]*21]}],
   "face": {"lm68": [[x,y]*68], "iris_l": [[x,y]*5]|null,
            "iris_r": [[x,y]*5]|null} | null,
   "pose": {"lm": [[x,y,z,vis]*33], "nose_mm": <float>|null} | null}
"""

import json
import math
from dataclasses import dataclass
from typing import Optional

from airinput.errors import MalformedRecord, SchemaViolation

HAND_POINTS = 21
FACE_POINTS = 68
IRIS_POINTS = 5
POSE_POINTS = 33

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class Point2:
    x: float
    y: float


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class HandFrame:
    handedness: str  # LEFT or RIGHT
    score: float
    points: "tuple[Point3, ...]"  # exactly 21, standard hand topology


@dataclass(frozen=True)
class FaceFrame:
    points68: "tuple[Point2, ...]"
    iris_left: "Optional[tuple[Point2, ...]]" = None  # center, right, top, left, bottom
    iris_right: "Optional[tuple[Point2, ...]]" = None


@dataclass(frozen=True)
class PosePoint:
    x: float
    y: float
    z: float
    visibility: float


@dataclass(frozen=True)
class PoseFrame:
    points: "tuple[PosePoint, ...]"  # exactly 33, full-body topology
    metric_nose_depth_mm: Optional[float] = None


@dataclass(frozen=True)
class LandmarkFrame:
    t_ms: float
    image_w: int
    image_h: int
    hands: "tuple[HandFrame, ...]" = ()
    face: Optional[FaceFrame] = None
    pose: Optional[PoseFrame] = None


EMPTY_FRAME = LandmarkFrame(t_ms=0.0, image_w=1, image_h=1)


def _require(cond: bool, field: str, message: str) -> None:
    if not cond:
        raise SchemaViolation(field, message)


def _num(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(field, "expected a number")
    value = float(value)
    if not math.isfinite(value):
        raise SchemaViolation(field, "must be finite")
    return value


def _point_list(raw, field: str, count: int, width: int) -> list:
    _require(isinstance(raw, list), field, "expected a list")
    _require(len(raw) == count, field, f"expected {count}")
    out = []
    for i, entry in enumerate(raw):
        _require(isinstance(entry, list), f"{field}[{i}]", "expected a list")
        _require(len(entry) == width, f"{field}[{i}]", f"expected {width} components")
        out.append([_num(v, f"{field}[{i}][{j}]") for j, v in enumerate(entry)])
    return out


def _parse_hand(raw, field: str) -> HandFrame:
    _require(isinstance(raw, dict), field, "expected an object")
    handedness = raw.get("hand")
    _require(handedness in (LEFT, RIGHT), f"{field}.hand", "expected 'left' or 'right'")
    score = _num(raw.get("score"), f"{field}.score")
    _require(0.0 <= score <= 1.0, f"{field}.score", "must be in [0, 1]")
    lm = _point_list(raw.get("lm"), f"{field}.lm", HAND_POINTS, 3)
    points = tuple(Point3(x, y, z) for x, y, z in lm)
    return HandFrame(handedness=handedness, score=score, points=points)


def _parse_iris(raw, field: str) -> "Optional[tuple[Point2, ...]]":
    if raw is None:
        return None
    lm = _point_list(raw, field, IRIS_POINTS, 2)
    return tuple(Point2(x, y) for x, y in lm)


def _parse_face(raw, field: str) -> Optional[FaceFrame]:
    if raw is None:
        return None
    _require(isinstance(raw, dict), field, "expected an object or null")
    lm = _point_list(raw.get("lm68"), f"{field}.lm68", FACE_POINTS, 2)
    points = tuple(Point2(x, y) for x, y in lm)
    return FaceFrame(
        points68=points,
        iris_left=_parse_iris(raw.get("iris_l"), f"{field}.iris_l"),
        iris_right=_parse_iris(raw.get("iris_r"), f"{field}.iris_r"),
    )


def _parse_pose(raw, field: str) -> Optional[PoseFrame]:
    if raw is None:
        return None
    _require(isinstance(raw, dict), field, "expected an object or null")
    lm = _point_list(raw.get("lm"), f"{field}.lm", POSE_POINTS, 4)
    points = []
    for i, (x, y, z, vis) in enumerate(lm):
        _require(0.0 <= vis <= 1.0, f"{field}.lm[{i}][3]", "visibility must be in [0, 1]")
        points.append(PosePoint(x, y, z, vis))
    nose_mm = raw.get("nose_mm")
    if nose_mm is not None:
        nose_mm = _num(nose_mm, f"{field}.nose_mm")
        _require(nose_mm > 0.0, f"{field}.nose_mm", "must be > 0")
    return PoseFrame(points=tuple(points), metric_nose_depth_mm=nose_mm)


def parse_frame(line: str) -> LandmarkFrame:
    """Parse one NDJSON record into a validated LandmarkFrame.

    Raises MalformedRecord on bad syntax and SchemaViolation (naming the
    offending field) on any invariant violation. Unknown top-level keys
    are ignored for forward compatibility.
    """
    try:
        raw = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedRecord(str(exc)) from exc
    if not isinstance(raw, dict):
        raise MalformedRecord("record is not an object")

    t_ms = _num(raw.get("t"), "t")
    img = raw.get("img")
    _require(isinstance(img, dict), "img", "expected an object")
    w = img.get("w")
    h = img.get("h")
    _require(isinstance(w, int) and not isinstance(w, bool) and w > 0, "img.w", "must be a positive integer")
    _require(isinstance(h, int) and not isinstance(h, bool) and h > 0, "img.h", "must be a positive integer")

    hands_raw = raw.get("hands")
    _require(isinstance(hands_raw, list), "hands", "expected a list")
    _require(len(hands_raw) <= 2, "hands", "at most 2 hands")
    hands = tuple(_parse_hand(entry, f"hands[{i}]") for i, entry in enumerate(hands_raw))
    seen = set()
    for i, hand in enumerate(hands):
        _require(hand.handedness not in seen, f"hands[{i}].hand", "duplicate handedness")
        seen.add(hand.handedness)

    face = _parse_face(raw.get("face"), "face")
    pose = _parse_pose(raw.get("pose"), "pose")
    return LandmarkFrame(t_ms=t_ms, image_w=w, image_h=h, hands=hands, face=face, pose=pose)


def _jnum(value: float):
    # integral floats print as ints; repr round-trips everything else
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def serialize_frame(frame: LandmarkFrame) -> str:
    """Serialize a frame to its canonical single-line record.

    parse_frame(serialize_frame(f)) reproduces f exactly: floats are
    emitted at full round-trip precision, integral values as integers.
    """
    doc = {
        "t": _jnum(frame.t_ms),
        "img": {"w": frame.image_w, "h": frame.image_h},
        "hands": [
            {
                "hand": hand.handedness,
                "score": _jnum(hand.score),
                "lm": [[_jnum(p.x), _jnum(p.y), _jnum(p.z)] for p in hand.points],
            }
            for hand in frame.hands
        ],
        "face": None
        if frame.face is None
        else {
            "lm68": [[_jnum(p.x), _jnum(p.y)] for p in frame.face.points68],
            "iris_l": None
            if frame.face.iris_left is None
            else [[_jnum(p.x), _jnum(p.y)] for p in frame.face.iris_left],
            "iris_r": None
            if frame.face.iris_right is None
            else [[_jnum(p.x), _jnum(p.y)] for p in frame.face.iris_right],
        },
        "pose": None
        if frame.pose is None
        else {
            "lm": [[_jnum(p.x), _jnum(p.y), _jnum(p.z), _jnum(p.visibility)] for p in frame.pose.points],
            "nose_mm": _jnum(frame.pose.metric_nose_depth_mm)
            if frame.pose.metric_nose_depth_mm is not None
            else None,
        },
    }
    return json.dumps(doc, separators=(",", ":"))


def to_pixels(p, image_w: int, image_h: int):
    """Map a normalized point to pixel units; z (if any) passes through."""
    if isinstance(p, (Point3, PosePoint)):
        return (p.x * image_w, p.y * image_h, p.z)
    return (p.x * image_w, p.y * image_h)
