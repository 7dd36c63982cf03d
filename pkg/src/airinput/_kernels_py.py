"""Pure-Python geometry and filter kernels.

Reference implementation of the hot per-frame math. The compiled
extension (_kernels.pyx) mirrors these formulas operation for operation
so both backends produce bit-identical results on the same platform;
keep any edit in lockstep with the .pyx file.
"""

import math

TWO_PI = 6.283185307179586


def dist(ax: float, ay: float, bx: float, by: float) -> float:
    """Euclidean distance between (ax, ay) and (bx, by)."""
    dx = bx - ax
    dy = by - ay
    return math.sqrt(dx * dx + dy * dy)


def joint_angle_deg(
    ax: float, ay: float, bx: float, by: float, cx: float, cy: float
) -> float:
    """Interior angle at b of the chain a-b-c, in degrees, clamped to [0, 180].

    Raises ValueError when either segment has zero length.
    """
    ux = ax - bx
    uy = ay - by
    vx = cx - bx
    vy = cy - by
    nu = math.sqrt(ux * ux + uy * uy)
    nv = math.sqrt(vx * vx + vy * vy)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("zero-length segment")
    c = (ux * vx + uy * vy) / (nu * nv)
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    return math.degrees(math.acos(c))


def eye_aspect_ratio(
    x1: float, y1: float, x2: float, y2: float, x3: float, y3: float,
    x4: float, y4: float, x5: float, y5: float, x6: float, y6: float,
) -> float:
    """Eye aspect ratio of six points ordered corner, upper x2, corner, lower x2.

    (|p2-p6| + |p3-p5|) / (2 |p1-p4|). Raises ValueError when the
    horizontal span is zero.
    """
    h = dist(x1, y1, x4, y4)
    if h == 0.0:
        raise ValueError("zero horizontal span")
    v1 = dist(x2, y2, x6, y6)
    v2 = dist(x3, y3, x5, y5)
    return (v1 + v2) / (2.0 * h)


def mouth_aspect_ratio(
    x0: float, y0: float, x1: float, y1: float, x2: float, y2: float,
    x3: float, y3: float, x4: float, y4: float, x5: float, y5: float,
    x6: float, y6: float, x7: float, y7: float,
) -> float:
    """Mouth aspect ratio of the eight inner-lip points (topology order 60-67).

    (|p61-p67| + |p62-p66| + |p63-p65|) / (3 |p60-p64|). Raises
    ValueError when the mouth width is zero.
    """
    w = dist(x0, y0, x4, y4)
    if w == 0.0:
        raise ValueError("zero mouth width")
    g1 = dist(x1, y1, x7, y7)
    g2 = dist(x2, y2, x6, y6)
    g3 = dist(x3, y3, x5, y5)
    return (g1 + g2 + g3) / (3.0 * w)


def smoothing_alpha(te_s: float, cutoff_hz: float) -> float:
    """EWMA coefficient for elapsed time te_s at the given cutoff frequency."""
    tau = 1.0 / (TWO_PI * cutoff_hz)
    return 1.0 / (1.0 + tau / te_s)


def one_euro_step(
    x: float,
    te_s: float,
    prev: float,
    dprev: float,
    fc_min: float,
    beta: float,
    d_cutoff: float,
) -> "tuple[float, float]":
    """One adaptive low-pass step for an initialized filter state.

    Returns (smoothed value, smoothed derivative). te_s must be > 0.
    """
    dx = (x - prev) / te_s
    ad = smoothing_alpha(te_s, d_cutoff)
    dxhat = ad * dx + (1.0 - ad) * dprev
    fc = fc_min + beta * abs(dxhat)
    a = smoothing_alpha(te_s, fc)
    xhat = a * x + (1.0 - a) * prev
    return xhat, dxhat
