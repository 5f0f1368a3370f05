"""Planar curve networks and the exact geometric operations on them.

A :class:`CurveNetwork` is an embedded straight-line graph; its one-dimensional
measure is the summed edge length.  Distances are exact point-to-segment
distances, and the length inside a disk is an exact clip of every edge.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc

from . import _kernels
from .errors import (DisconnectedResult, EmptySet, InvalidDomain, InvalidNetwork,
                     NoRoom, TargetTooSmall)

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))


@dataclass(frozen=True)
class Segment:
    a: tuple
    b: tuple

    def __post_init__(self):
        if self.a[0] == self.b[0] and self.a[1] == self.b[1]:
            raise InvalidNetwork("segment endpoints coincide")

    @property
    def length(self):
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])


def _as_points(p):
    arr = np.asarray(p, dtype=np.float64)
    return np.ascontiguousarray(arr.reshape(-1, 2))


@dataclass(frozen=True, eq=False)
class CurveNetwork:
    """Connected straight-line graph.

    A single vertex without edges is accepted as the degenerate (point)
    continuum; an empty vertex list is allowed so that distance queries can
    report :class:`EmptySet`.
    """

    vertices: np.ndarray
    edges: np.ndarray
    tolerance: float = DEFAULT_TOL
    _segments: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.float64).reshape(-1, 2)
        e = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        if not np.all(np.isfinite(v)):
            raise InvalidNetwork("non-finite vertex coordinates")
        if len(e) and (e.min() < 0 or e.max() >= len(v)):
            raise InvalidNetwork("edge refers to a missing vertex")
        if np.any(e[:, 0] == e[:, 1]):
            raise InvalidNetwork("self-loop edge")
        seg = np.ascontiguousarray(np.hstack([v[e[:, 0]], v[e[:, 1]]])) if len(e) else np.zeros((0, 4))
        if len(e):
            lengths = np.hypot(seg[:, 2] - seg[:, 0], seg[:, 3] - seg[:, 1])
            if np.any(lengths <= 0):
                raise InvalidNetwork("zero-length edge")
        v.setflags(write=False)
        e.setflags(write=False)
        seg.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "_segments", seg)
        if not self.is_connected():
            raise InvalidNetwork("network is not connected")

    # -- structure -----------------------------------------------------------
    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def is_empty(self):
        return len(self.vertices) == 0

    def segments(self):
        """Edges as an ``(m, 4)`` array of ``(ax, ay, bx, by)`` rows."""
        return self._segments

    def edge_lengths(self):
        s = self._segments
        return np.hypot(s[:, 2] - s[:, 0], s[:, 3] - s[:, 1])

    def degrees(self):
        return np.bincount(self.edges.ravel(), minlength=self.n_vertices)

    def is_connected(self):
        n = self.n_vertices
        if n <= 1:
            return True
        if self.n_edges == 0:
            return False
        adj = coo_matrix((np.ones(self.n_edges), (self.edges[:, 0], self.edges[:, 1])), shape=(n, n))
        count, _ = _cc(adj, directed=False)
        return count == 1

    def diameter(self):
        if self.n_vertices < 2:
            return 0.0
        v = self.vertices
        best = 0.0
        for i in range(len(v) - 1):
            d = np.hypot(*(v[i + 1:] - v[i]).T).max()
            best = max(best, float(d))
        return best

    def with_tolerance(self, tolerance):
        return CurveNetwork(self.vertices, self.edges, tolerance)

    def translated(self, dx, dy):
        return CurveNetwork(self.vertices + [dx, dy], self.edges, self.tolerance)

    def rotated(self, angle, center=(0.0, 0.0)):
        c, s = math.cos(angle), math.sin(angle)
        rel = self.vertices - center
        rot = np.column_stack([c * rel[:, 0] - s * rel[:, 1], s * rel[:, 0] + c * rel[:, 1]])
        return CurveNetwork(rot + center, self.edges, self.tolerance)

    # -- I/O -----------------------------------------------------------------
    def to_dict(self):
        return {"vertices": self.vertices.tolist(), "edges": self.edges.tolist()}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data, tolerance=DEFAULT_TOL):
        return cls(np.asarray(data["vertices"], dtype=float).reshape(-1, 2),
                   np.asarray(data["edges"], dtype=int).reshape(-1, 2),
                   data.get("tolerance", tolerance))

    @classmethod
    def from_json(cls, text, tolerance=DEFAULT_TOL):
        return cls.from_dict(json.loads(text), tolerance)

    # -- constructors --------------------------------------------------------
    @classmethod
    def polyline(cls, points, closed=False, tolerance=DEFAULT_TOL):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        n = len(pts)
        edges = [(i, i + 1) for i in range(n - 1)]
        if closed and n > 2:
            edges.append((n - 1, 0))
        return cls(pts, edges, tolerance)

    @classmethod
    def segment(cls, a, b, tolerance=DEFAULT_TOL):
        return cls([a, b], [(0, 1)], tolerance)

    @classmethod
    def point(cls, p, tolerance=DEFAULT_TOL):
        return cls([p], np.zeros((0, 2), dtype=int), tolerance)

    @classmethod
    def star(cls, center, arms, tolerance=DEFAULT_TOL):
        """Radii leaving ``center``; ``arms`` is a list of ``(length, angle)``."""
        verts = [tuple(center)]
        edges = []
        for length, angle in arms:
            if length <= 0:
                continue
            verts.append((center[0] + length * math.cos(angle), center[1] + length * math.sin(angle)))
            edges.append((0, len(verts) - 1))
        return cls(verts, edges, tolerance)

    @classmethod
    def circle(cls, center, radius, arcs=64, tolerance=DEFAULT_TOL):
        t = 2 * np.pi * np.arange(arcs) / arcs
        pts = np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])
        return cls.polyline(pts, closed=True, tolerance=tolerance)


def _point_segments(net):
    """Segments of ``net``; a lone vertex becomes one degenerate segment."""
    if net.is_empty:
        raise EmptySet("network has no points")
    if net.n_edges == 0:
        v = net.vertices
        return np.ascontiguousarray(np.hstack([v, v]))
    return net.segments()


def total_length(net):
    return float(net.edge_lengths().sum())


def distance_to_network(p, net):
    """Exact distance from ``p`` (a point or an ``(n, 2)`` array) to ``net``."""
    pts = _as_points(p)
    d = _kernels.segment_distances(pts, _point_segments(net))
    if np.ndim(p) == 1:
        return float(d[0])
    return d


def nearest_point(p, net):
    """Nearest point of ``net`` to ``p`` and the index of the edge attaining it.

    Ties between equidistant edges go to the lowest edge index.
    """
    pts = _as_points(p)
    segs = _point_segments(net)
    k = int(_kernels.nearest_segment(pts, segs)[0])
    a, b = segs[k, :2], segs[k, 2:]
    d = b - a
    L2 = float(d @ d)
    t = 0.0 if L2 == 0 else min(1.0, max(0.0, float((pts[0] - a) @ d) / L2))
    return a + t * d, k, t


def sample_network(net, step):
    """Points along every edge at arc-length spacing at most ``step``."""
    segs = _point_segments(net)
    out = [net.vertices]
    for ax, ay, bx, by in segs:
        L = math.hypot(bx - ax, by - ay)
        n = max(1, int(math.ceil(L / step)))
        t = np.arange(1, n) / n
        if len(t):
            out.append(np.column_stack([ax + t * (bx - ax), ay + t * (by - ay)]))
    return np.ascontiguousarray(np.vstack(out))


def directed_hausdorff(samples, segs):
    """max over ``samples`` of the exact distance to the segment set."""
    if len(samples) == 0 or len(segs) == 0:
        raise EmptySet("Hausdorff distance of an empty set")
    return float(_kernels.segment_distances(np.ascontiguousarray(samples), np.ascontiguousarray(segs)).max())


def hausdorff_distance(n1, n2, tolerance=None):
    """Hausdorff distance between two networks, accurate to ``tolerance``.

    Edges are sampled at spacing ``2 * tolerance`` and sample distances are
    exact; the distance function is 1-Lipschitz, so the sampled maximum is
    within ``tolerance`` of the true one.  The default is 1e-4 of the larger
    diameter.
    """
    s1, s2 = _point_segments(n1), _point_segments(n2)
    if tolerance is None:
        tolerance = 1e-4 * max(n1.diameter(), n2.diameter())
    step = 2 * max(tolerance, 1e-12)
    d12 = directed_hausdorff(sample_network(n1, step), s2)
    d21 = directed_hausdorff(sample_network(n2, step), s1)
    return max(d12, d21)


def length_in_ball(net, ball):
    """Exact length of ``net`` inside the disk ``ball`` (open or closed alike)."""
    if net.n_edges == 0:
        return 0.0
    c = np.array([ball.center], dtype=float)
    return float(_kernels.disk_lengths(net.segments(), c, np.array([float(ball.radius)]))[0, 0])


def lengths_in_balls(net, centers, radii):
    """Matrix of clipped lengths, one row per center and one column per radius."""
    if net.n_edges == 0:
        return np.zeros((len(centers), len(radii)))
    return _kernels.disk_lengths(net.segments(), _as_points(centers),
                                 np.ascontiguousarray(radii, dtype=float))


def polygon_perimeter(points):
    pts = np.asarray(points, dtype=float)
    return float(np.hypot(*(np.roll(pts, -1, axis=0) - pts).T).sum())


def polygonization_error(radius, arcs):
    """Length lost by an inscribed regular ``arcs``-gon relative to the circle."""
    return 2 * math.pi * radius * (1 - math.sin(math.pi / arcs) / (math.pi / arcs))


# ---------------------------------------------------------------------------
# Domain
# ---------------------------------------------------------------------------

def _segments_cross(p1, p2, q1, q2):
    """Proper or touching intersection test between two closed segments."""
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 * d2 < 0 and d3 * d4 < 0:
        return True
    if d1 == 0 and on_seg(q1, q2, p1):
        return True
    if d2 == 0 and on_seg(q1, q2, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, q1):
        return True
    if d4 == 0 and on_seg(p1, p2, q2):
        return True
    return False


def _segments_cross_many(p1, p2, segs):
    """Vectorized proper-crossing test of one segment against many (no touching)."""
    q1, q2 = segs[:, 0:2], segs[:, 2:4]

    def orient(a, b, c):
        return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])

    d1 = orient(q1, q2, p1[None, :])
    d2 = orient(q1, q2, p2[None, :])
    d3 = orient(p1[None, :], p2[None, :], q1)
    d4 = orient(p1[None, :], p2[None, :], q2)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """Simple polygon, stored counterclockwise without the closing vertex."""

    boundary: np.ndarray

    def __post_init__(self):
        b = np.array(self.boundary, dtype=float).reshape(-1, 2)
        if len(b) > 1 and np.allclose(b[0], b[-1]):
            b = b[:-1]
        if len(b) < 3:
            raise InvalidDomain("polygon needs at least three vertices")
        area = _signed_area(b)
        if area == 0:
            raise InvalidDomain("polygon has zero area")
        if area < 0:
            b = b[::-1].copy()
        _check_simple(b)
        b.setflags(write=False)
        object.__setattr__(self, "boundary", b)
        segs = np.ascontiguousarray(np.hstack([b, np.roll(b, -1, axis=0)]))
        segs.setflags(write=False)
        object.__setattr__(self, "_segments", segs)

    @property
    def bounding_box(self):
        lo, hi = self.boundary.min(axis=0), self.boundary.max(axis=0)
        return (float(lo[0]), float(lo[1])), (float(hi[0]), float(hi[1]))

    def segments(self):
        return self._segments

    @property
    def area(self):
        return _signed_area(self.boundary)

    @property
    def perimeter(self):
        return polygon_perimeter(self.boundary)

    @property
    def centroid(self):
        x, y = self.boundary[:, 0], self.boundary[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        a = cross.sum() / 2
        return (float(((x + xn) * cross).sum() / (6 * a)), float(((y + yn) * cross).sum() / (6 * a)))

    def distance_to_boundary(self, p):
        pts = _as_points(p)
        d = _kernels.segment_distances(pts, self._segments)
        return float(d[0]) if np.ndim(p) == 1 else d

    def inside(self, p):
        """Closed containment (boundary points count as inside)."""
        pts = _as_points(p)
        res = _kernels.points_in_polygon(pts, np.ascontiguousarray(self.boundary))
        res |= _kernels.segment_distances(pts, self._segments) <= 1e-12
        return bool(res[0]) if np.ndim(p) == 1 else res

    def clamp(self, p):
        """Project points lying outside the closed polygon onto its boundary."""
        pts = _as_points(p).copy()
        out = ~self.inside(pts)
        if np.any(out):
            idx = np.nonzero(out)[0]
            k = _kernels.nearest_segment(np.ascontiguousarray(pts[idx]), self._segments)
            s = self._segments[k]
            a, d = s[:, 0:2], s[:, 2:4] - s[:, 0:2]
            t = np.clip(np.einsum("ij,ij->i", pts[idx] - a, d) / np.einsum("ij,ij->i", d, d), 0, 1)
            pts[idx] = a + t[:, None] * d
        return pts

    def crosses_boundary(self, a, b):
        """True if the open segment ``ab`` properly crosses the polygon boundary."""
        return bool(_segments_cross_many(np.asarray(a, float), np.asarray(b, float), self._segments).any())

    def to_dict(self):
        return {"boundary": self.boundary.tolist()}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        return cls(np.asarray(data["boundary"], dtype=float))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def rectangle(cls, x0, y0, x1, y1):
        return cls([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    @classmethod
    def unit_square(cls):
        return cls.rectangle(0.0, 0.0, 1.0, 1.0)

    @classmethod
    def disk(cls, center=(0.0, 0.0), radius=1.0, n=1024):
        """Inscribed regular ``n``-gon standing in for a disk."""
        t = 2 * np.pi * np.arange(n) / n
        return cls(np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)]))


def _signed_area(b):
    x, y = b[:, 0], b[:, 1]
    return float((x * np.roll(y, -1) - np.roll(x, -1) * y).sum() / 2)


def _check_simple(b):
    n = len(b)
    segs = np.hstack([b, np.roll(b, -1, axis=0)])
    for i in range(n):
        others = [j for j in range(i + 2, n) if not (i == 0 and j == n - 1)]
        if not others:
            continue
        hit = _segments_cross_many(segs[i, :2], segs[i, 2:], segs[others])
        if hit.any():
            raise InvalidDomain(f"polygon edge {i} crosses edge {others[int(np.argmax(hit))]}")


# ---------------------------------------------------------------------------
# Graph editing helpers
# ---------------------------------------------------------------------------

class NetworkBuilder:
    """Mutable vertex/edge lists with coordinate-merging vertex insertion."""

    def __init__(self, net=None, merge_tol=1e-12):
        self.v = [tuple(map(float, p)) for p in (net.vertices if net is not None else [])]
        self.e = [tuple(map(int, ed)) for ed in (net.edges if net is not None else [])]
        self.merge_tol = merge_tol

    def add_vertex(self, p, merge=True):
        p = (float(p[0]), float(p[1]))
        if merge:
            for i, q in enumerate(self.v):
                if abs(q[0] - p[0]) <= self.merge_tol and abs(q[1] - p[1]) <= self.merge_tol:
                    return i
        self.v.append(p)
        return len(self.v) - 1

    def add_edge(self, i, j):
        if i == j:
            return
        a, b = self.v[i], self.v[j]
        if a[0] == b[0] and a[1] == b[1]:
            return
        self.e.append((i, j))

    def split_edge(self, k, p):
        """Insert ``p`` (lying on edge ``k``) as a vertex; return its index."""
        i, j = self.e[k]
        for idx in (i, j):
            q = self.v[idx]
            if math.hypot(q[0] - p[0], q[1] - p[1]) <= self.merge_tol:
                return idx
        m = self.add_vertex(p, merge=False)
        self.e[k] = (i, m)
        self.e.append((m, j))
        return m

    def build(self, tolerance=DEFAULT_TOL):
        used = sorted({x for ed in self.e for x in ed}) if self.e else list(range(len(self.v)))
        remap = {old: new for new, old in enumerate(used)}
        verts = [self.v[i] for i in used]
        edges = [(remap[a], remap[b]) for a, b in self.e]
        return CurveNetwork(np.array(verts, dtype=float).reshape(-1, 2),
                            np.array(edges, dtype=int).reshape(-1, 2), tolerance)


def clamp_network(net, domain):
    """Project vertices lying outside the closed domain back onto its boundary."""
    v = domain.clamp(net.vertices)
    if np.array_equal(v, net.vertices):
        return net
    b = NetworkBuilder()
    b.v = [tuple(p) for p in v]
    for i, j in net.edges:
        b.add_edge(int(i), int(j))
    return b.build(net.tolerance)


# ---------------------------------------------------------------------------
# Ball surgery
# ---------------------------------------------------------------------------

def _disk_interval(a, b, c, r):
    """Parameter interval of segment ``ab`` inside the closed disk, or None."""
    d = b - a
    f = a - c
    A = float(d @ d)
    B = float(f @ d)
    C = float(f @ f) - r * r
    disc = B * B - A * C
    if disc <= 0:
        return None
    s = math.sqrt(disc)
    t0, t1 = (-B - s) / A, (-B + s) / A
    t0, t1 = max(t0, 0.0), min(t1, 1.0)
    if t1 <= t0:
        return None
    return t0, t1


def ball_surgery(net, ball, arcs=64, return_perimeter=False):
    """Replace the part of ``net`` inside the closed ball by a polygonized circle.

    The polygon passes through every point where the network crosses the
    circle, so the result stays connected.  Its length equals
    ``total_length(net) - length_in_ball(net, ball) + perimeter``, where
    ``perimeter`` (returned on request) is that of the circle polygon.
    """
    if arcs < 16:
        raise ValueError("ball_surgery needs arcs >= 16")
    c = np.asarray(ball.center, dtype=float)
    r = float(ball.radius)
    verts = net.vertices
    eps_t = 1e-12
    snap = 1e-11 * max(1.0, r)

    b = NetworkBuilder(merge_tol=snap)
    keep = {}
    outside = np.hypot(*(verts - c).T) > r
    for i in np.nonzero(outside)[0]:
        keep[int(i)] = b.add_vertex(verts[i], merge=False)

    crossings = []  # (angle, builder index)

    def crossing(p, idx=None):
        for _, known in crossings:
            q = b.v[known]
            if math.hypot(q[0] - p[0], q[1] - p[1]) <= snap:
                return known
        if idx is None:
            idx = b.add_vertex(p, merge=False)
        crossings.append((math.atan2(p[1] - c[1], p[0] - c[0]) % (2 * math.pi), idx))
        return idx

    for i, j in net.edges:
        i, j = int(i), int(j)
        pa, pb = verts[i], verts[j]
        iv = _disk_interval(pa, pb, c, r)
        if iv is None:
            if outside[i] and outside[j]:
                b.add_edge(keep[i], keep[j])
            elif outside[i] or outside[j]:
                # the other endpoint sits on the circle and the edge leaves at once
                o, t = (i, pb) if outside[i] else (j, pa)
                b.add_edge(keep[o], crossing(t))
            continue
        t0, t1 = iv
        d = pb - pa
        if outside[i]:
            if t0 > eps_t:
                b.add_edge(keep[i], crossing(pa + t0 * d))
            else:
                crossing(pa, keep[i])
        if outside[j]:
            if t1 < 1 - eps_t:
                b.add_edge(crossing(pa + t1 * d), keep[j])
            else:
                crossing(pb, keep[j])

    if not crossings:
        raise DisconnectedResult("the ball boundary does not meet the network")

    step = 2 * math.pi / arcs
    ring_angles = list(crossings)
    for k in range(arcs):
        a = k * step
        if all(min(abs(a - ca), 2 * math.pi - abs(a - ca)) > 1e-9 for ca, _ in crossings):
            ring_angles.append((a, None))
    ring_angles.sort(key=lambda t: t[0])
    ring = []
    for a, idx in ring_angles:
        if idx is None:
            idx = b.add_vertex((c[0] + r * math.cos(a), c[1] + r * math.sin(a)), merge=False)
        ring.append(idx)
    perimeter = 0.0
    for k in range(len(ring)):
        p, q = b.v[ring[k]], b.v[ring[(k + 1) % len(ring)]]
        perimeter += math.hypot(q[0] - p[0], q[1] - p[1])
        b.add_edge(ring[k], ring[(k + 1) % len(ring)])

    try:
        out = b.build(net.tolerance)
    except InvalidNetwork as exc:
        raise DisconnectedResult(str(exc)) from exc
    return (out, perimeter) if return_perimeter else out


# ---------------------------------------------------------------------------
# Enlargement
# ---------------------------------------------------------------------------

def enlarge_to_length(net, domain, target, rng_seed=0, h=None, skipped=None):
    """Connected enlargement of ``net`` with total length ``target``.

    Every complementary component (enumerated on a lattice of spacing ``h``)
    receives a spur leaving its nearest network point toward the component's
    deepest lattice node; the deficit is split equally among components and any
    length a spur cannot absorb is added as radii around the deepest spur tip.
    Components too thin for the lattice are listed in ``skipped``.
    """
    from .grid import rasterize, components  # noqa: PLC0415  (grid imports geometry)

    L0 = total_length(net)
    tol = net.tolerance
    if abs(target - L0) <= tol:
        return net
    if target < L0:
        raise TargetTooSmall(f"target {target} is below current length {L0}")
    deficit = target - L0
    if h is None:
        (x0, y0), (x1, y1) = domain.bounding_box
        h = max(x1 - x0, y1 - y0) / 128
    grid = rasterize(domain, net, h)
    region = components(grid)
    rng = np.random.default_rng(rng_seed)

    plans = []
    for cid, nodes in enumerate(region.components):
        pick = _spur_site(grid, nodes, net, domain, h)
        if pick is None:
            if skipped is not None:
                skipped.append(cid)
            log.info("enlarge: component %d below lattice resolution, skipped", cid)
            continue
        plans.append(pick)
    if not plans:
        raise NoRoom("no complementary component can host a spur")

    share = deficit / len(plans)
    b = NetworkBuilder(net, merge_tol=1e-12)
    remainder = 0.0
    tips = []
    for x0, rho in plans:
        cur = b.build(tol)
        y0, k, _ = nearest_point(x0, cur)
        run = float(np.hypot(*(x0 - y0)))
        length = min(share, run)
        remainder += share - length
        direction = (x0 - y0) / run
        tip = y0 + length * direction
        base = b.split_edge(k, y0)
        t = b.add_vertex(tip, merge=False)
        b.add_edge(base, t)
        room = rho if length >= run else max(rho - (run - length), 0.0)
        tips.append((room, t, direction))

    if remainder > tol:
        room, t, direction = max(tips, key=lambda x: x[0])
        arm = 0.9 * room
        if arm <= 0:
            raise NoRoom("no room for the remaining length")
        count = int(math.ceil(remainder / arm))
        each = remainder / count
        back = math.atan2(-direction[1], -direction[0])
        phase = rng.uniform(0.25, 0.75)
        centre = b.v[t]
        for m in range(count):
            ang = back + 2 * math.pi * (m + phase) / count
            end = (centre[0] + each * math.cos(ang), centre[1] + each * math.sin(ang))
            b.add_edge(t, b.add_vertex(end, merge=False))

    out = b.build(tol)
    return clamp_network(out, domain)


def _spur_site(grid, nodes, net, domain, h):
    """Deepest node of a component whose segment to the network stays in the domain."""
    dist = grid.wall_distance.ravel()[nodes]
    order = np.lexsort((nodes, -dist))
    pts = grid.node_points(nodes[order])
    for x0, d in zip(pts, dist[order]):
        if d <= h:
            return None
        y0, _, _ = nearest_point(x0, net)
        if not domain.crosses_boundary(x0, y0):
            return x0, float(d)
    return None
