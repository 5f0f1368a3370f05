# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Signatures mirror ``_pykernels``."""

import numpy as np

from libc.math cimport sqrt, pow, INFINITY


cdef inline double _seg_dist2(double px, double py, double ax, double ay,
                              double bx, double by) nogil:
    cdef double dx = bx - ax, dy = by - ay
    cdef double wx = px - ax, wy = py - ay
    cdef double L2 = dx * dx + dy * dy
    cdef double t = 0.0
    if L2 > 0.0:
        t = (wx * dx + wy * dy) / L2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    wx = px - (ax + t * dx)
    wy = py - (ay + t * dy)
    return wx * wx + wy * wy


def segment_distances(const double[:, ::1] points, const double[:, ::1] segs):
    cdef Py_ssize_t n = points.shape[0], m = segs.shape[0], i, k
    cdef double best, d
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            best = INFINITY
            for k in range(m):
                d = _seg_dist2(points[i, 0], points[i, 1],
                               segs[k, 0], segs[k, 1], segs[k, 2], segs[k, 3])
                if d < best:
                    best = d
            o[i] = sqrt(best)
    return out


def nearest_segment(const double[:, ::1] points, const double[:, ::1] segs):
    """Index of the nearest segment per point; ties go to the lowest index."""
    cdef Py_ssize_t n = points.shape[0], m = segs.shape[0], i, k, arg
    cdef double best, d
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for i in range(n):
            best = INFINITY
            arg = -1
            for k in range(m):
                d = _seg_dist2(points[i, 0], points[i, 1],
                               segs[k, 0], segs[k, 1], segs[k, 2], segs[k, 3])
                if d < best:
                    best = d
                    arg = k
            o[i] = arg
    return out


def points_in_polygon(const double[:, ::1] points, const double[:, ::1] poly):
    cdef Py_ssize_t n = points.shape[0], m = poly.shape[0], i, k, j
    cdef double px, py, xi, yi, xj, yj
    cdef bint inside
    out = np.zeros(n, dtype=np.bool_)
    cdef unsigned char[::1] o = out.view(np.uint8)
    with nogil:
        for i in range(n):
            px = points[i, 0]
            py = points[i, 1]
            inside = False
            j = m - 1
            for k in range(m):
                xi = poly[k, 0]; yi = poly[k, 1]
                xj = poly[j, 0]; yj = poly[j, 1]
                if (yi > py) != (yj > py):
                    if px < (xj - xi) * (py - yi) / (yj - yi) + xi:
                        inside = not inside
                j = k
            o[i] = inside
    return out


cdef double TANGENT = 64 * 2.220446049250313e-16


cdef inline double _clip(double ax, double ay, double bx, double by,
                         double cx, double cy, double r) nogil:
    # chord from the closest point of the carrier line; near-tangent chords
    # (within rounding of r) count as zero so results survive rigid motions
    cdef double dx = bx - ax, dy = by - ay
    cdef double fx = ax - cx, fy = ay - cy
    cdef double a = dx * dx + dy * dy
    cdef double tm, px, py, h2, half, t0, t1
    if a <= 0.0:
        return 0.0
    tm = -(fx * dx + fy * dy) / a
    px = fx + tm * dx
    py = fy + tm * dy
    h2 = r * r - (px * px + py * py)
    if h2 <= TANGENT * r * r:
        return 0.0
    half = sqrt(h2 / a)
    t0 = tm - half
    t1 = tm + half
    if t0 < 0.0:
        t0 = 0.0
    if t1 > 1.0:
        t1 = 1.0
    if t1 <= t0:
        return 0.0
    return (t1 - t0) * sqrt(a)


def disk_lengths(const double[:, ::1] segs, const double[:, ::1] centers, const double[::1] radii):
    cdef Py_ssize_t m = segs.shape[0], P = centers.shape[0], R = radii.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double acc
    out = np.zeros((P, R), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(P):
            for j in range(R):
                acc = 0.0
                for k in range(m):
                    acc += _clip(segs[k, 0], segs[k, 1], segs[k, 2], segs[k, 3],
                                 centers[i, 0], centers[i, 1], radii[j])
                o[i, j] = acc
    return out


def plap_energy_grad(const double[:, ::1] u, double p, double eps):
    """Corner-averaged cell energy sum((|g|^2+eps)^(p/2) - eps^(p/2))/4 over cells.

    ``g`` is the undivided difference vector; the caller applies powers of h.
    """
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], i, j, c
    cdef double e = 0.0, base = pow(eps, 0.5 * p), half = 0.5 * p - 1.0
    cdef double u00, u10, u01, u11, dx, dy, w, q
    grad = np.zeros((nx, ny), dtype=np.float64)
    cdef double[:, ::1] g = grad
    cdef double dxs[4]
    cdef double dys[4]
    with nogil:
        for i in range(nx - 1):
            for j in range(ny - 1):
                u00 = u[i, j]; u10 = u[i + 1, j]
                u01 = u[i, j + 1]; u11 = u[i + 1, j + 1]
                if u00 == 0.0 and u10 == 0.0 and u01 == 0.0 and u11 == 0.0:
                    continue
                # corners: (bottom, left), (bottom, right), (top, left), (top, right)
                dxs[0] = u10 - u00; dys[0] = u01 - u00
                dxs[1] = u10 - u00; dys[1] = u11 - u10
                dxs[2] = u11 - u01; dys[2] = u01 - u00
                dxs[3] = u11 - u01; dys[3] = u11 - u10
                for c in range(4):
                    dx = dxs[c]; dy = dys[c]
                    q = dx * dx + dy * dy + eps
                    e += 0.25 * (pow(q, 0.5 * p) - base)
                    w = 0.25 * p * pow(q, half)
                    if c < 2:
                        g[i + 1, j] += w * dx
                        g[i, j] -= w * dx
                    else:
                        g[i + 1, j + 1] += w * dx
                        g[i, j + 1] -= w * dx
                    if c == 0 or c == 2:
                        g[i, j + 1] += w * dy
                        g[i, j] -= w * dy
                    else:
                        g[i + 1, j + 1] += w * dy
                        g[i + 1, j] -= w * dy
    return e, grad
