"""Webcam capture backend over MediaPipe solutions.

Optional: requires the [camera] extra (mediapipe, opencv-python). Frames are
processed locally and discarded; only landmark coordinates leave this
module. Index tables in provider.mapping pin the model versions.
"""

import time
from typing import Iterator, Optional

from provider.config import ProviderConfig, ProviderError
from provider.mapping import mirror_frame, remap_face68, remap_iris


def _require_backends():
    try:
        import cv2
        import mediapipe as mp
    except ImportError as exc:
        raise ProviderError(
            "the camera backend needs mediapipe and opencv-python "
            "(pip install 'airinput-provider[camera]')") from exc
    return cv2, mp


class CameraScene:
    """Capture loop yielding wire-format frames until the camera closes."""

    def __init__(self, config: ProviderConfig):
        cv2, mp = _require_backends()
        self.config = config
        self._cv2 = cv2
        self._cap = cv2.VideoCapture(config.camera)
        if not self._cap.isOpened():
            raise ProviderError(f"camera {config.camera} unavailable")
        self._cap.set(cv2.CAP_PROP_FPS, config.fps)

        self._hands = (mp.solutions.hands.Hands(
            max_num_hands=2, model_complexity=1)
            if "hands" in config.models else None)
        refine = "iris" in config.models
        self._face = (mp.solutions.face_mesh.FaceMesh(
            max_num_faces=1, refine_landmarks=refine)
            if "face" in config.models else None)
        self._pose = (mp.solutions.pose.Pose()
                      if "pose" in config.models else None)
        self._t0 = time.monotonic()
        self._prev_t = -1

    def frames(self) -> Iterator[dict]:
        while True:
            ok, image = self._cap.read()
            if not ok:
                return
            yield self._one(image)

    def _one(self, image) -> dict:
        cfg = self.config
        h, w = image.shape[:2]
        rgb = self._cv2.cvtColor(image, self._cv2.COLOR_BGR2RGB)
        t_ms = round((time.monotonic() - self._t0) * 1000.0)
        if t_ms <= self._prev_t:
            t_ms = self._prev_t + 1
        self._prev_t = t_ms

        out = {"t": t_ms, "img": {"w": w, "h": h}, "hands": [],
               "face": None, "pose": None}

        if self._hands is not None:
            res = self._hands.process(rgb)
            if res.multi_hand_landmarks:
                for lm, handed in zip(res.multi_hand_landmarks,
                                      res.multi_handedness):
                    cls = handed.classification[0]
                    out["hands"].append({
                        "hand": cls.label.lower(),
                        "score": round(cls.score, 4),
                        "lm": [[p.x, p.y, p.z] for p in lm.landmark],
                    })
        if self._face is not None:
            res = self._face.process(rgb)
            if res.multi_face_landmarks:
                mesh = [[p.x * w, p.y * h] for p in
                        res.multi_face_landmarks[0].landmark]
                face = {"lm68": remap_face68(mesh)}
                if len(mesh) >= 478:
                    # iris rings stay normalized on the wire
                    norm = [[x / w, y / h] for x, y in mesh]
                    face["iris_l"] = remap_iris(norm, "left")
                    face["iris_r"] = remap_iris(norm, "right")
                else:
                    face["iris_l"] = None
                    face["iris_r"] = None
                out["face"] = face
        if self._pose is not None:
            res = self._pose.process(rgb)
            if res.pose_landmarks:
                out["pose"] = {
                    "lm": [[p.x, p.y, p.z, p.visibility]
                           for p in res.pose_landmarks.landmark],
                    "nose_mm": None,
                }
        if cfg.mirror:
            out = mirror_frame(out)
        return out

    def close(self):
        self._cap.release()
        for model in (self._hands, self._face, self._pose):
            if model is not None:
                model.close()
