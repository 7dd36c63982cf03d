"""Landmark index remapping and the mirror transform.

Model-native landmark layouts are converted to the wire topologies
(21-point hands, 68-point face, 5-point iris rings, 33-point pose) through
fixed per-model tables. Tables are pinned to the model versions named next
to them; a model upgrade that reshuffles indices needs a new table, not an
edit of this one.
"""

from typing import Dict, List, Sequence, Tuple

# MediaPipe Face Mesh (468 landmarks, face_landmarker 0.10.x) -> the 68-point
# annotation scheme. One source index per target slot; the table is a fixed
# bijection onto its image.
MP_FACE68: Tuple[int, ...] = (
    # jaw 0-16
    162, 234, 93, 58, 172, 136, 149, 148, 152, 377, 378, 365, 397, 288, 323,
    454, 389,
    # right eyebrow 17-21, left eyebrow 22-26
    70, 63, 105, 66, 107,
    336, 296, 334, 293, 300,
    # nose bridge 27-30, nose base 31-35
    168, 197, 5, 4,
    64, 97, 2, 326, 294,
    # right eye 36-41, left eye 42-47
    33, 160, 158, 133, 153, 144,
    362, 385, 387, 263, 373, 380,
    # outer lips 48-59
    61, 39, 37, 0, 267, 269, 291, 405, 314, 17, 84, 181,
    # inner lips 60-67
    78, 82, 13, 312, 308, 317, 14, 87,
)

# With refine_landmarks the mesh grows to 478 points; the extra ten are the
# iris rings, center first then the four extremes.
MP_IRIS_RIGHT: Tuple[int, ...] = (468, 469, 470, 471, 472)
MP_IRIS_LEFT: Tuple[int, ...] = (473, 474, 475, 476, 477)

# MediaPipe Hands and Pose already use the wire topologies (21 and 33
# points); remapping is the identity for both.


def remap_face68(native: Sequence[Sequence[float]]) -> List[List[float]]:
    """Pick the 68 annotation points out of a 468/478-point mesh."""
    return [[native[i][0], native[i][1]] for i in MP_FACE68]


def remap_iris(native: Sequence[Sequence[float]], side: str) -> List[List[float]]:
    idx = MP_IRIS_RIGHT if side == "right" else MP_IRIS_LEFT
    return [[native[i][0], native[i][1]] for i in idx]


def _swap_pairs(pairs) -> Dict[int, int]:
    table = {}
    for a, b in pairs:
        table[a] = b
        table[b] = a
    return table


# Horizontal mirror permutation of the 68-point scheme: jaw reverses, the
# brow/eye/nostril/lip left-right pairs swap, midline points stay.
FACE68_MIRROR: Dict[int, int] = _swap_pairs(
    [(i, 16 - i) for i in range(8)]
    + [(17 + i, 26 - i) for i in range(5)]
    + [(31, 35), (32, 34)]
    + [(36, 45), (37, 44), (38, 43), (39, 42), (40, 47), (41, 46)]
    + [(48, 54), (49, 53), (50, 52), (55, 59), (56, 58)]
    + [(60, 64), (61, 63), (65, 67)]
)

# 33-point pose: nose stays, every left/right pair swaps.
POSE_MIRROR: Dict[int, int] = _swap_pairs(
    [(1, 4), (2, 5), (3, 6), (7, 8), (9, 10)]
    + [(11 + i, 12 + i) for i in range(0, 22, 2)]
)


def mirror_frame(frame: dict) -> dict:
    """Flip a wire-format frame horizontally.

    Normalized x becomes 1 - x, pixel x becomes w - x, handedness and the
    left/right landmark roles swap. Applying it twice restores the frame.
    """
    out = {"t": frame["t"], "img": frame["img"]}
    w = frame["img"]["w"]

    hands = []
    for hand in frame.get("hands", []):
        hands.append({
            "hand": "left" if hand["hand"] == "right" else "right",
            "score": hand["score"],
            "lm": [[1.0 - x, y, z] for x, y, z in hand["lm"]],
        })
    out["hands"] = hands

    face = frame.get("face")
    if face is None:
        out["face"] = None
    else:
        lm68 = face["lm68"]
        out_face = {"lm68": [
            [w - lm68[FACE68_MIRROR.get(i, i)][0], lm68[FACE68_MIRROR.get(i, i)][1]]
            for i in range(68)
        ]}
        for dst, src in (("iris_l", "iris_r"), ("iris_r", "iris_l")):
            ring = face.get(src)
            out_face[dst] = None if ring is None else [[1.0 - x, y] for x, y in ring]
        out["face"] = out_face

    pose = frame.get("pose")
    if pose is None:
        out["pose"] = None
    else:
        lm = pose["lm"]
        out["pose"] = {
            "lm": [[1.0 - lm[POSE_MIRROR.get(i, i)][0],
                    lm[POSE_MIRROR.get(i, i)][1],
                    lm[POSE_MIRROR.get(i, i)][2],
                    lm[POSE_MIRROR.get(i, i)][3]] for i in range(33)],
            "nose_mm": pose.get("nose_mm"),
        }
    return out
