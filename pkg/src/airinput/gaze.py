"""Geometric gaze pointing: iris-based depth, ray casting, screen mapping.

The pipeline is a pinhole-camera round trip. Iris pixel diameter gives
metric depth (the human iris is close to 11.7 mm across for everyone),
the eye midpoint back-projects to a 3D point in camera coordinates, the
head pose (optionally refined by in-eye iris displacement) gives a gaze
ray, and the ray-screen intersection lands in screen pixels.

Camera frame: x right, y down (image convention), z from the screen
plane toward the user. The screen lives in the z = 0 plane with the
camera at the origin.
"""

import json
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from airinput import events as ev
from airinput.errors import DegenerateFace, DegenerateIris
from airinput.events import GestureEvent
from airinput.facehead import LEFT_EYE, RIGHT_EYE, HeadPose, head_pose
from airinput.filters import LowPass
from airinput.hand import estimate_depth_from_palm, palm_size_px
from airinput.kernels import dist
from airinput.model import FaceFrame, LandmarkFrame, Point2

D_IRIS_MM = 11.7

DEPTH_IRIS = "iris"
DEPTH_POSE_METRIC = "pose_metric"
DEPTH_PALM = "palm"
DEPTH_DEFAULT = "default"

# iris block layout: 0 center, 1 right boundary, 2 top, 3 left, 4 bottom
IRIS_RIGHT_PT = 1
IRIS_LEFT_PT = 3


@dataclass(frozen=True)
class CameraModel:
    """Pinhole intrinsics in pixels."""

    f_px: float
    cx: float
    cy: float

    def __post_init__(self):
        if self.f_px <= 0.0:
            raise ValueError("f_px must be > 0")

    @staticmethod
    def from_image(image_w: int, image_h: int) -> "CameraModel":
        # no calibration: assume ~53 degree horizontal FOV (f = width)
        return CameraModel(float(image_w), image_w / 2.0, image_h / 2.0)

    @staticmethod
    def from_file(path: str) -> "CameraModel":
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
        return CameraModel(float(d["f_px"]), float(d["cx"]), float(d["cy"]))


@dataclass(frozen=True)
class ScreenGeometry:
    """Physical and pixel screen size; the camera sits at the top edge,
    offset from the top-center by camera_offset_mm."""

    width_px: int = 1920
    height_px: int = 1080
    width_mm: float = 600.0
    height_mm: float = 340.0
    camera_offset_x_mm: float = 0.0
    camera_offset_y_mm: float = 0.0

    def __post_init__(self):
        if min(self.width_px, self.height_px) <= 0:
            raise ValueError("screen pixel size must be positive")
        if min(self.width_mm, self.height_mm) <= 0.0:
            raise ValueError("screen physical size must be positive")


@dataclass(frozen=True)
class GazeSample:
    eye_position_mm: Tuple[float, float, float]
    gaze_direction: Tuple[float, float, float]
    depth_source: str


def iris_diameter_px(iris: List[Point2], image_w: int, image_h: int) -> float:
    """Horizontal iris diameter in pixels from a normalized 5-point block."""
    left = iris[IRIS_LEFT_PT]
    right = iris[IRIS_RIGHT_PT]
    d = dist(left.x * image_w, left.y * image_h,
             right.x * image_w, right.y * image_h)
    if d <= 0.0:
        raise DegenerateIris("coincident iris boundary points")
    return d


def depth_from_iris(d_px: float, camera: CameraModel,
                    iris_mm: float = D_IRIS_MM) -> float:
    if d_px <= 0.0:
        raise DegenerateIris("iris diameter must be > 0")
    return camera.f_px * iris_mm / d_px


def resolve_depth(frame: LandmarkFrame, camera: CameraModel,
                  palm_k: Optional[float] = None,
                  default_mm: float = 600.0,
                  iris_mm: float = D_IRIS_MM) -> Tuple[float, str]:
    """Best available subject depth, most direct measurement first."""
    if frame.face is not None:
        diameters = []
        for block in (frame.face.iris_left, frame.face.iris_right):
            if block is None:
                continue
            try:
                diameters.append(iris_diameter_px(block, frame.image_w, frame.image_h))
            except DegenerateIris:
                continue
        if diameters:
            d_px = sum(diameters) / len(diameters)
            return depth_from_iris(d_px, camera, iris_mm), DEPTH_IRIS
    if frame.pose is not None and frame.pose.metric_nose_depth_mm is not None:
        return frame.pose.metric_nose_depth_mm, DEPTH_POSE_METRIC
    if palm_k is not None and frame.hands:
        palm = palm_size_px(frame.hands[0], frame.image_w, frame.image_h)
        if palm > 0.0:
            return estimate_depth_from_palm(palm, palm_k), DEPTH_PALM
    return default_mm, DEPTH_DEFAULT


def back_project(u: float, v: float, depth_mm: float,
                 camera: CameraModel) -> Tuple[float, float, float]:
    """Pixel (u, v) at depth Z to camera-frame millimeters."""
    x = (u - camera.cx) * depth_mm / camera.f_px
    y = (v - camera.cy) * depth_mm / camera.f_px
    return x, y, depth_mm


def gaze_direction(pose: HeadPose, iris_dx: float = 0.0, iris_dy: float = 0.0,
                   gain_deg: float = 0.0) -> Tuple[float, float, float]:
    """Unit gaze ray from head orientation plus in-eye iris displacement.

    Positive effective yaw looks toward +x (image right); positive
    effective pitch looks up, which is -y in camera coordinates.
    """
    yaw_e = math.radians(pose.yaw + gain_deg * iris_dx)
    pitch_e = math.radians(pose.pitch + gain_deg * iris_dy)
    cp = math.cos(pitch_e)
    return math.sin(yaw_e) * cp, -math.sin(pitch_e), -math.cos(yaw_e) * cp


def screen_point(sample: GazeSample,
                 screen: ScreenGeometry) -> Optional[Tuple[float, float]]:
    """Ray-plane intersection in screen pixels, None when off-screen."""
    ex, ey, ez = sample.eye_position_mm
    gx, gy, gz = sample.gaze_direction
    if gz >= 0.0:
        return None
    t = -ez / gz
    if t <= 0.0:
        return None
    ix = ex + t * gx
    iy = ey + t * gy
    sx = (ix + screen.camera_offset_x_mm + screen.width_mm / 2.0) \
        / screen.width_mm * screen.width_px
    sy = (iy + screen.camera_offset_y_mm) / screen.height_mm * screen.height_px
    if not (0.0 <= sx < screen.width_px and 0.0 <= sy < screen.height_px):
        return None
    return sx, sy


def _eye_centers_px(face: FaceFrame) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    def center(idx) -> Tuple[float, float]:
        xs = [face.points68[i].x for i in idx]
        ys = [face.points68[i].y for i in idx]
        return sum(xs) / len(xs), sum(ys) / len(ys)

    return center(RIGHT_EYE), center(LEFT_EYE)


def iris_offsets(face: FaceFrame, image_w: int, image_h: int) -> Tuple[float, float]:
    """Mean normalized displacement of the iris centers inside their eyes.

    The iris center is taken as the midpoint of the two horizontal
    boundary points; displacement is normalized by the eye corner
    distance. dx is positive toward image right, dy positive when the
    iris sits above the eye center (looking up). (0, 0) when no iris
    blocks are present.
    """
    pairs = (
        (face.iris_right, RIGHT_EYE[0], RIGHT_EYE[3]),
        (face.iris_left, LEFT_EYE[0], LEFT_EYE[3]),
    )
    dx_sum = dy_sum = 0.0
    n = 0
    for block, c0, c1 in pairs:
        if block is None:
            continue
        p0 = face.points68[c0]
        p1 = face.points68[c1]
        width = dist(p0.x, p0.y, p1.x, p1.y)
        if width <= 0.0:
            continue
        icx = (block[IRIS_LEFT_PT].x + block[IRIS_RIGHT_PT].x) / 2.0 * image_w
        icy = (block[IRIS_LEFT_PT].y + block[IRIS_RIGHT_PT].y) / 2.0 * image_h
        ecx = (p0.x + p1.x) / 2.0
        ecy = (p0.y + p1.y) / 2.0
        dx_sum += (icx - ecx) / width
        dy_sum += (ecy - icy) / width
        n += 1
    if n == 0:
        return 0.0, 0.0
    return dx_sum / n, dy_sum / n


class GazeTracker:
    """Per-frame gaze-to-cursor module. Emits smoothed CursorMove events
    while the gaze ray lands on the screen; holds otherwise."""

    def __init__(self):
        self.iris_gain_deg = 20.0
        self.default_depth_mm = 600.0
        self.iris_mm = D_IRIS_MM
        self.palm_k: Optional[float] = None
        self.screen = ScreenGeometry()
        self.camera: Optional[CameraModel] = None
        self._lp_x = LowPass()
        self._lp_y = LowPass()
        self.last_depth_mm: Optional[float] = None
        self.last_source: Optional[str] = None
        self.last_point: Optional[Tuple[float, float]] = None

    def configure(self, cfg: dict) -> None:
        self.iris_gain_deg = cfg["iris_gain_deg"]
        self.default_depth_mm = cfg["default_depth_mm"]
        self.iris_mm = cfg["iris_mm"]
        self.palm_k = cfg.get("palm_k")
        for lp in (self._lp_x, self._lp_y):
            lp.fc_min = cfg["fc_min"]
            lp.beta = cfg["beta"]
            lp.d_cutoff = cfg["d_cutoff"]

    def set_screen(self, screen: ScreenGeometry) -> None:
        self.screen = screen

    def set_camera(self, camera: Optional[CameraModel]) -> None:
        self.camera = camera

    def step(self, frame: LandmarkFrame, t_ms: float) -> List[GestureEvent]:
        face = frame.face
        if face is None:
            self._lp_x.reset()
            self._lp_y.reset()
            self.last_point = None
            return []
        camera = self.camera or CameraModel.from_image(frame.image_w, frame.image_h)
        try:
            pose = head_pose(face)
        except DegenerateFace:
            return []
        depth, source = resolve_depth(frame, camera, self.palm_k,
                                      self.default_depth_mm, self.iris_mm)
        self.last_depth_mm = depth
        self.last_source = source
        (rx, ry), (lx, ly) = _eye_centers_px(face)
        eye = back_project((rx + lx) / 2.0, (ry + ly) / 2.0, depth, camera)
        dx, dy = iris_offsets(face, frame.image_w, frame.image_h)
        g = gaze_direction(pose, dx, dy, self.iris_gain_deg)
        sample = GazeSample(eye, g, source)
        point = screen_point(sample, self.screen)
        self.last_point = point
        if point is None:
            return []
        sx = self._lp_x.step(point[0], t_ms)
        sy = self._lp_y.step(point[1], t_ms)
        return [GestureEvent(t_ms, "gaze", ev.CURSOR_MOVE,
                             data={"x": sx, "y": sy})]

    def release_all(self, t_ms: float) -> List[GestureEvent]:
        return []
