# cython: language_level=3, boundscheck=False, cdivision=False
"""Compiled geometry and filter kernels.

Mirrors _kernels_py.py operation for operation; both backends must stay
bit-identical (the build disables FP contraction for this reason).
"""

from libc.math cimport sqrt, acos, fabs

cdef double TWO_PI = 6.283185307179586
cdef double RAD2DEG = 57.29577951308232


cdef inline double _dist(double ax, double ay, double bx, double by):
    cdef double dx = bx - ax
    cdef double dy = by - ay
    return sqrt(dx * dx + dy * dy)


cdef inline double _alpha(double te_s, double cutoff_hz):
    cdef double tau = 1.0 / (TWO_PI * cutoff_hz)
    return 1.0 / (1.0 + tau / te_s)


def dist(double ax, double ay, double bx, double by):
    return _dist(ax, ay, bx, by)


def joint_angle_deg(double ax, double ay, double bx, double by,
                    double cx, double cy):
    cdef double ux = ax - bx
    cdef double uy = ay - by
    cdef double vx = cx - bx
    cdef double vy = cy - by
    cdef double nu = sqrt(ux * ux + uy * uy)
    cdef double nv = sqrt(vx * vx + vy * vy)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("zero-length segment")
    cdef double c = (ux * vx + uy * vy) / (nu * nv)
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    return acos(c) * RAD2DEG


def eye_aspect_ratio(double x1, double y1, double x2, double y2,
                     double x3, double y3, double x4, double y4,
                     double x5, double y5, double x6, double y6):
    cdef double h = _dist(x1, y1, x4, y4)
    if h == 0.0:
        raise ValueError("zero horizontal span")
    cdef double v1 = _dist(x2, y2, x6, y6)
    cdef double v2 = _dist(x3, y3, x5, y5)
    return (v1 + v2) / (2.0 * h)


def mouth_aspect_ratio(double x0, double y0, double x1, double y1,
                       double x2, double y2, double x3, double y3,
                       double x4, double y4, double x5, double y5,
                       double x6, double y6, double x7, double y7):
    cdef double w = _dist(x0, y0, x4, y4)
    if w == 0.0:
        raise ValueError("zero mouth width")
    cdef double g1 = _dist(x1, y1, x7, y7)
    cdef double g2 = _dist(x2, y2, x6, y6)
    cdef double g3 = _dist(x3, y3, x5, y5)
    return (g1 + g2 + g3) / (3.0 * w)


def smoothing_alpha(double te_s, double cutoff_hz):
    return _alpha(te_s, cutoff_hz)


def one_euro_step(double x, double te_s, double prev, double dprev,
                  double fc_min, double beta, double d_cutoff):
    cdef double dx = (x - prev) / te_s
    cdef double ad = _alpha(te_s, d_cutoff)
    cdef double dxhat = ad * dx + (1.0 - ad) * dprev
    cdef double fc = fc_min + beta * fabs(dxhat)
    cdef double a = _alpha(te_s, fc)
    cdef double xhat = a * x + (1.0 - a) * prev
    return xhat, dxhat
