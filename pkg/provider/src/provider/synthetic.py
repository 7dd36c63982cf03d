"""Deterministic synthetic capture backend.

Renders a repeatable scene (a slowly drifting hand that pinches about once
a second, a face that blinks, a standing figure that sways) as wire-format
frames, so the full provider-to-engine path can run and be tested with no
camera or model weights. Identical (config, frame index) always yields the
identical line; the seed only shifts motion phases.
"""

import math
import random
from typing import List, Optional

from provider.config import ProviderConfig
from provider.mapping import mirror_frame


def _r(v: float) -> float:
    return round(v, 6)


class SyntheticScene:
    def __init__(self, config: ProviderConfig):
        self.config = config
        rng = random.Random(config.seed)
        self.phase_hand = rng.uniform(0.0, 2.0 * math.pi)
        self.phase_blink = rng.uniform(0.0, 6.0)
        self.phase_sway = rng.uniform(0.0, 2.0 * math.pi)
        self._prev_t = -1

    # -- individual body parts ------------------------------------------

    def _hand(self, t_s: float) -> List[List[float]]:
        """Right hand, palm toward the camera, fingers up.

        The wrist drifts on a small ellipse; the thumb tip tracks the index
        tip so that gap / palm span sweeps 0.2..0.8 on a 1 s cycle.
        """
        wx = 0.52 + 0.06 * math.sin(0.8 * t_s + self.phase_hand)
        wy = 0.72 + 0.03 * math.cos(0.5 * t_s + self.phase_hand)
        s = 0.15
        pinch = 0.5 + 0.3 * math.sin(2.0 * math.pi * t_s + self.phase_hand)
        w, h = self.config.image_w, self.config.image_h

        pts: List[Optional[List[float]]] = [None] * 21
        pts[0] = [wx, wy, 0.0]
        # knuckle row, index on the camera-left side (right hand, palm in)
        cols = {"index": (-0.45, 5), "middle": (-0.15, 9),
                "ring": (0.15, 13), "pinky": (0.45, 17)}
        tops = {"index": 0.85, "middle": 1.0, "ring": 0.95, "pinky": 0.8}
        for name, (dx, base) in cols.items():
            mx = wx + dx * s
            my = wy - tops[name] * s
            pts[base] = [mx, my, -0.01]
            pts[base + 1] = [mx, my - 0.35 * s, -0.02]   # PIP
            pts[base + 2] = [mx, my - 0.6 * s, -0.03]    # DIP
            pts[base + 3] = [mx, my - 0.95 * s, -0.04]   # tip
        pts[1] = [wx - 0.3 * s, wy - 0.1 * s, 0.0]
        pts[2] = [wx - 0.55 * s, wy - 0.35 * s, -0.01]
        pts[3] = [wx - 0.7 * s, wy - 0.55 * s, -0.02]

        # place the thumb tip at gap = pinch * palm span, measured in pixels
        palm_px = math.hypot((pts[9][0] - wx) * w, (pts[9][1] - wy) * h)
        ix, iy = pts[8][0] * w, pts[8][1] * h
        jx, jy = pts[3][0] * w, pts[3][1] * h
        ux, uy = jx - ix, jy - iy
        un = math.hypot(ux, uy)
        gap = pinch * palm_px
        pts[4] = [(ix + ux / un * gap) / w, (iy + uy / un * gap) / h, -0.02]
        return [[_r(p[0]), _r(p[1]), _r(p[2])] for p in pts]

    def _face(self, t_s: float):
        w, h = self.config.image_w, self.config.image_h
        cx = w / 2.0 + 8.0 * math.sin(0.3 * t_s + self.phase_sway)
        cy = h * 0.42 + 4.0 * math.sin(0.7 * t_s)
        fw = w * 0.26   # face width in px
        fh = fw * 1.3

        # a ~160 ms blink roughly every 3 s
        blink_t = (t_s + self.phase_blink) % 3.1
        ear = 0.08 if blink_t < 0.16 else 0.3

        pts: List[List[float]] = []
        for i in range(17):   # jaw arc, left of image to right
            a = math.pi * (1.0 - i / 16.0)
            pts.append([cx - fw / 2.0 * math.cos(a), cy + fh / 2.0 * math.sin(a) * 0.9])
        for k in range(5):    # brows
            pts.append([cx - fw * 0.35 + k * fw * 0.15, cy - fh * 0.28])
        for k in range(5):
            pts.append([cx + fw * 0.35 - (4 - k) * fw * 0.15, cy - fh * 0.28])
        for k in range(4):    # nose bridge and base
            pts.append([cx, cy - fh * 0.18 + k * fh * 0.09])
        for k in range(5):
            pts.append([cx + (k - 2) * fw * 0.06, cy + fh * 0.12])

        def eye(ex):
            half = fw * 0.11
            open_px = max(ear * 2.0 * half, 1.0)
            return [[ex - half, cy - fh * 0.1],
                    [ex - half * 0.4, cy - fh * 0.1 - open_px / 2.0],
                    [ex + half * 0.4, cy - fh * 0.1 - open_px / 2.0],
                    [ex + half, cy - fh * 0.1],
                    [ex + half * 0.4, cy - fh * 0.1 + open_px / 2.0],
                    [ex - half * 0.4, cy - fh * 0.1 + open_px / 2.0]]

        lx = cx - fw * 0.24
        rx = cx + fw * 0.24
        pts.extend(eye(lx))
        pts.extend(eye(rx))

        mw = fw * 0.3
        my = cy + fh * 0.3
        mouth_open = fw * 0.02
        for frac in (-1.0, -0.6, -0.2, 0.0, 0.2, 0.6):
            pts.append([cx + frac * mw, my - mouth_open * (1.0 - abs(frac))])
        pts.append([cx + mw, my])
        for frac in (0.6, 0.2, 0.0, -0.2, -0.6):
            pts.append([cx + frac * mw, my + mouth_open * (1.0 - abs(frac))])
        for frac in (-0.8, -0.3, 0.0, 0.3):
            pts.append([cx + frac * mw, my - mouth_open * 0.4])
        pts.append([cx + mw * 0.8, my])
        for frac in (0.3, 0.0, -0.3):
            pts.append([cx + frac * mw, my + mouth_open * 0.4])

        face = {"lm68": [[_r(x), _r(y)] for x, y in pts[:68]]}
        if "iris" in self.config.models:
            d_px = fw * 0.155   # plausible iris for a ~0.6 m subject
            # subject's left eye appears on the image-right side
            for key, ex in (("iris_l", rx), ("iris_r", lx)):
                exn, eyn = ex / w, (cy - fh * 0.1) / h
                rxn, ryn = d_px / 2.0 / w, d_px / 2.0 / h
                face[key] = [[_r(exn), _r(eyn)],
                             [_r(exn - rxn), _r(eyn)],
                             [_r(exn), _r(eyn - ryn)],
                             [_r(exn + rxn), _r(eyn)],
                             [_r(exn), _r(eyn + ryn)]]
        else:
            face["iris_l"] = None
            face["iris_r"] = None
        return face

    def _pose(self, t_s: float) -> List[List[float]]:
        sway = 0.01 * math.sin(0.6 * t_s + self.phase_sway)
        cx = 0.5 + sway
        pts = [[cx, 0.18, 0.0, 0.99]]          # nose
        for k in range(3):                      # left eye region
            pts.append([cx + 0.02 + 0.005 * k, 0.165, 0.0, 0.98])
        for k in range(3):                      # right eye region
            pts.append([cx - 0.02 - 0.005 * k, 0.165, 0.0, 0.98])
        pts.append([cx + 0.05, 0.175, 0.0, 0.95])   # ears
        pts.append([cx - 0.05, 0.175, 0.0, 0.95])
        pts.append([cx + 0.015, 0.2, 0.0, 0.95])    # mouth corners
        pts.append([cx - 0.015, 0.2, 0.0, 0.95])

        swing = 0.02 * math.sin(1.1 * t_s)
        sy, hy = 0.3, 0.55
        pts.append([cx + 0.11, sy, 0.0, 0.99])      # shoulders
        pts.append([cx - 0.11, sy, 0.0, 0.99])
        pts.append([cx + 0.13 + swing, sy + 0.13, 0.0, 0.97])   # elbows
        pts.append([cx - 0.13 - swing, sy + 0.13, 0.0, 0.97])
        pts.append([cx + 0.14 + 2 * swing, sy + 0.26, 0.0, 0.96])  # wrists
        pts.append([cx - 0.14 - 2 * swing, sy + 0.26, 0.0, 0.96])
        for k in range(6):   # hand landmarks riding on the wrists
            side = 1.0 if k % 2 == 0 else -1.0
            pts.append([cx + side * (0.145 + 2 * swing * side), sy + 0.28,
                        0.0, 0.9])
        pts.append([cx + 0.07, hy, 0.0, 0.99])      # hips
        pts.append([cx - 0.07, hy, 0.0, 0.99])
        bend = 0.004 * math.sin(0.9 * t_s)
        pts.append([cx + 0.075 + bend, hy + 0.18, 0.0, 0.98])   # knees
        pts.append([cx - 0.075 - bend, hy + 0.18, 0.0, 0.98])
        pts.append([cx + 0.07, hy + 0.37, 0.0, 0.97])           # ankles
        pts.append([cx - 0.07, hy + 0.37, 0.0, 0.97])
        for k in range(4):   # heels / foot index
            side = 1.0 if k % 2 == 0 else -1.0
            pts.append([cx + side * 0.07 + (0.02 if k >= 2 else 0.0) * side,
                        hy + 0.39, 0.0, 0.9])
        return [[_r(x), _r(y), _r(z), _r(v)] for x, y, z, v in pts[:33]]

    # -- frame assembly --------------------------------------------------

    def frame(self, index: int) -> dict:
        cfg = self.config
        t_ms = round(index * 1000.0 / cfg.fps)
        if t_ms <= self._prev_t:
            t_ms = self._prev_t + 1
        self._prev_t = t_ms
        t_s = index / cfg.fps

        out = {"t": t_ms, "img": {"w": cfg.image_w, "h": cfg.image_h}}
        hands = []
        if "hands" in cfg.models and index % 47 != 23:
            # the skipped index stands in for a per-frame inference miss
            hands.append({"hand": "right", "score": 0.96,
                          "lm": self._hand(t_s)})
        out["hands"] = hands
        out["face"] = self._face(t_s) if "face" in cfg.models else None
        out["pose"] = ({"lm": self._pose(t_s), "nose_mm": None}
                       if "pose" in cfg.models else None)
        if cfg.mirror:
            out = mirror_frame(out)
        return out
