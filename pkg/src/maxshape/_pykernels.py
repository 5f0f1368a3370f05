"""NumPy implementations of the inner loops, used when the extension is absent."""

import numpy as np

_CHUNK = 1 << 22  # max point*segment pairs held at once


def _chunks(n, m):
    step = max(1, _CHUNK // max(m, 1))
    for start in range(0, n, step):
        yield slice(start, min(n, start + step))


def _seg_dist2(points, segs):
    a = segs[None, :, 0:2]
    d = segs[None, :, 2:4] - a
    w = points[:, None, :] - a
    L2 = np.einsum("...k,...k->...", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(L2 > 0, np.einsum("...k,...k->...", w, d) / np.where(L2 > 0, L2, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    r = w - t[..., None] * d
    return np.einsum("...k,...k->...", r, r)


def segment_distances(points, segs):
    points = np.asarray(points, dtype=np.float64)
    segs = np.asarray(segs, dtype=np.float64)
    out = np.full(len(points), np.inf)
    if len(segs) == 0:
        return out
    for sl in _chunks(len(points), len(segs)):
        out[sl] = np.sqrt(_seg_dist2(points[sl], segs).min(axis=1))
    return out


def nearest_segment(points, segs):
    points = np.asarray(points, dtype=np.float64)
    segs = np.asarray(segs, dtype=np.float64)
    out = np.full(len(points), -1, dtype=np.int64)
    if len(segs) == 0:
        return out
    for sl in _chunks(len(points), len(segs)):
        out[sl] = _seg_dist2(points[sl], segs).argmin(axis=1)
    return out


def points_in_polygon(points, poly):
    points = np.asarray(points, dtype=np.float64)
    poly = np.asarray(poly, dtype=np.float64)
    px = points[:, 0:1]
    py = points[:, 1:2]
    xi, yi = poly[:, 0], poly[:, 1]
    xj, yj = np.roll(xi, 1), np.roll(yi, 1)
    inside = np.zeros(len(points), dtype=bool)
    for sl in _chunks(len(points), len(poly)):
        straddle = (yi > py[sl]) != (yj > py[sl])
        with np.errstate(invalid="ignore", divide="ignore"):
            xcross = (xj - xi) * (py[sl] - yi) / (yj - yi) + xi
        hits = straddle & (px[sl] < xcross)
        inside[sl] = (hits.sum(axis=1) % 2) == 1
    return inside


TANGENT = 64 * np.finfo(float).eps  # near-tangent chords count as zero


def disk_lengths(segs, centers, radii):
    segs = np.asarray(segs, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    radii = np.asarray(radii, dtype=np.float64)
    out = np.zeros((len(centers), len(radii)))
    if len(segs) == 0:
        return out
    d = segs[:, 2:4] - segs[:, 0:2]
    a = np.einsum("ij,ij->i", d, d)
    ok = a > 0
    sa = np.sqrt(a)
    safe = np.where(ok, a, 1.0)
    for i, c in enumerate(centers):
        f = segs[:, 0:2] - c
        tm = -np.einsum("ij,ij->i", f, d) / safe
        foot = f + tm[:, None] * d
        d2 = np.einsum("ij,ij->i", foot, foot)
        for j, r in enumerate(radii):
            h2 = r * r - d2
            hit = ok & (h2 > TANGENT * r * r)
            half = np.sqrt(np.where(hit, h2, 0.0) / safe)
            t0 = np.maximum(tm - half, 0.0)
            t1 = np.minimum(tm + half, 1.0)
            out[i, j] = np.sum(np.where(hit & (t1 > t0), (t1 - t0) * sa, 0.0))
    return out


def plap_energy_grad(u, p, eps):
    u = np.asarray(u, dtype=np.float64)
    u00 = u[:-1, :-1]
    u10 = u[1:, :-1]
    u01 = u[:-1, 1:]
    u11 = u[1:, 1:]
    base = eps ** (0.5 * p)
    grad = np.zeros_like(u)
    energy = 0.0
    bottom = u10 - u00
    top = u11 - u01
    left = u01 - u00
    right = u11 - u10
    live = (u00 != 0) | (u10 != 0) | (u01 != 0) | (u11 != 0)
    # (x-difference, y-difference, x-edge on top?, y-edge on right?)
    for dx, dy, xtop, yright in (
        (bottom, left, False, False),
        (bottom, right, False, True),
        (top, left, True, False),
        (top, right, True, True),
    ):
        q = dx * dx + dy * dy + eps
        energy += 0.25 * float(np.sum(np.where(live, q ** (0.5 * p) - base, 0.0)))
        w = np.where(live, 0.25 * p * q ** (0.5 * p - 1.0), 0.0)
        wx = w * dx
        wy = w * dy
        if xtop:
            grad[1:, 1:] += wx
            grad[:-1, 1:] -= wx
        else:
            grad[1:, :-1] += wx
            grad[:-1, :-1] -= wx
        if yright:
            grad[1:, 1:] += wy
            grad[1:, :-1] -= wy
        else:
            grad[:-1, 1:] += wy
            grad[:-1, :-1] -= wy
    return energy, grad
