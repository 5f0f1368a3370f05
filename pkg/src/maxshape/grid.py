"""Uniform lattice discretization of Ω∖Σ.

Nodes are classified against exact geometry: a node is an obstacle when its
exact distance to the network is at most h/2, a domain-boundary node when it is
within h/2 of ∂Ω, and interior otherwise (if strictly inside Ω).  A band of
half-width h/2 around any curve cannot be crossed by a 4-connected lattice
path, so the lattice components of the free nodes never merge two regions the
curve separates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import _kernels
from .errors import EmptySet, GridTooLarge

OUTSIDE, INTERIOR, DOMAIN_BOUNDARY, OBSTACLE = 0, 1, 2, 3

DEFAULT_CAP = 4_000_000
MAX_REFINE_STARTS = 64
_GOLDEN_ANGLE = math.pi * (3 - math.sqrt(5))


@dataclass(frozen=True, eq=False)
class Walls:
    """Obstacle geometry inside the domain.

    ``segments`` are curve pieces ``(ax, ay, bx, by)``; ``circles`` are circle
    walls ``(cx, cy, r)``; ``discs`` are closed disks removed from the region.
    """

    segments: np.ndarray = field(default_factory=lambda: np.zeros((0, 4)))
    circles: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    discs: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    def __post_init__(self):
        for name, width in (("segments", 4), ("circles", 3), ("discs", 3)):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=float).reshape(-1, width))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def is_empty(self):
        return not (len(self.segments) or len(self.circles) or len(self.discs))

    def distance(self, points):
        pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, 2))
        d = np.full(len(pts), np.inf)
        if len(self.segments):
            d = np.minimum(d, _kernels.segment_distances(pts, self.segments))
        for cx, cy, r in self.circles:
            d = np.minimum(d, np.abs(np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) - r))
        for cx, cy, r in self.discs:
            d = np.minimum(d, np.maximum(np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) - r, 0.0))
        return d

    def add(self, segments=None, circles=None, discs=None):
        return Walls(
            np.vstack([self.segments, np.reshape(segments, (-1, 4))]) if segments is not None else self.segments,
            np.vstack([self.circles, np.reshape(circles, (-1, 3))]) if circles is not None else self.circles,
            np.vstack([self.discs, np.reshape(discs, (-1, 3))]) if discs is not None else self.discs,
        )


@dataclass(frozen=True, eq=False)
class Grid:
    h: float
    nx: int
    ny: int
    origin: tuple
    node_class: np.ndarray
    domain: object
    walls: Walls
    wall_distance: np.ndarray  # exact distance from each node to ∂Ω ∪ walls

    @property
    def shape(self):
        return (self.nx, self.ny)

    def node_points(self, flat=None):
        """Coordinates of nodes given by flat (C-order) indices, or of all nodes."""
        if flat is None:
            flat = np.arange(self.nx * self.ny)
        i, j = np.divmod(np.asarray(flat), self.ny)
        return np.column_stack([self.origin[0] + i * self.h, self.origin[1] + j * self.h])

    def coords(self, i, j):
        return (self.origin[0] + i * self.h, self.origin[1] + j * self.h)

    def distance_to_walls(self, points):
        """Exact distance to ∂Ω together with every wall."""
        pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, 2))
        d = _kernels.segment_distances(pts, self.domain.segments())
        if not self.walls.is_empty:
            d = np.minimum(d, self.walls.distance(pts))
        return d

    @property
    def free(self):
        return self.node_class == INTERIOR

    def counts(self):
        return {name: int(np.sum(self.node_class == code)) for code, name in
                ((OUTSIDE, "outside"), (INTERIOR, "interior"),
                 (DOMAIN_BOUNDARY, "domain_boundary"), (OBSTACLE, "obstacle"))}

    def lattice(self):
        return dict(h=self.h, nx=self.nx, ny=self.ny, origin=self.origin)


def _lattice_for(domain, h):
    (x0, y0), (x1, y1) = domain.bounding_box
    nx = int(math.ceil((x1 - x0) / h - 1e-9)) + 3
    ny = int(math.ceil((y1 - y0) / h - 1e-9)) + 3
    return (x0 - h, y0 - h), nx, ny


def rasterize(domain, net=None, h=1 / 64, *, walls=None, lattice=None, cap=DEFAULT_CAP):
    """Classify lattice nodes of ``domain`` against ∂Ω and the obstacle set.

    The obstacle set is ``net`` (a CurveNetwork) plus any extra ``walls``.
    ``lattice`` pins origin and node counts (to rasterize a variant of an
    existing grid on the identical lattice).
    """
    if not h > 0:
        raise ValueError("grid spacing must be positive")
    if lattice is None:
        origin, nx, ny = _lattice_for(domain, h)
    else:
        origin, nx, ny = lattice["origin"], lattice["nx"], lattice["ny"]
        h = lattice["h"]
    if nx * ny > cap:
        raise GridTooLarge(f"{nx}x{ny} nodes exceeds the cap of {cap}")
    w = walls if walls is not None else Walls()
    if net is not None and net.n_edges:
        w = w.add(segments=net.segments())
    elif net is not None and net.n_vertices == 1:
        v = net.vertices
        w = w.add(segments=np.hstack([v, v]))

    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    pts = np.ascontiguousarray(np.column_stack([origin[0] + ii.ravel() * h, origin[1] + jj.ravel() * h]))
    inside = _kernels.points_in_polygon(pts, np.ascontiguousarray(domain.boundary))
    d_bnd = _kernels.segment_distances(pts, domain.segments())
    cls = np.full(nx * ny, OUTSIDE, dtype=np.int8)
    cls[inside & (d_bnd > h / 2)] = INTERIOR
    cls[d_bnd <= h / 2] = DOMAIN_BOUNDARY
    dist = d_bnd
    if not w.is_empty:
        d_obs = w.distance(pts)
        hit = d_obs <= h / 2
        for cx, cy, r in w.discs:
            hit |= np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) <= r + h / 2
        cls[(cls == INTERIOR) & hit] = OBSTACLE
        dist = np.minimum(dist, d_obs)
    cls = cls.reshape(nx, ny)
    dist = dist.reshape(nx, ny)
    cls.setflags(write=False)
    dist.setflags(write=False)
    return Grid(float(h), nx, ny, (float(origin[0]), float(origin[1])), cls, domain, w, dist)


def with_disc_removed(grid, ball):
    """Same lattice with the closed ball ``ball`` added as an obstacle."""
    w = grid.walls.add(discs=[(ball.center[0], ball.center[1], ball.radius)])
    return rasterize(grid.domain, None, walls=w, lattice=grid.lattice())


def with_ball_opened(grid, ball):
    """Same lattice with walls inside the closed ball replaced by its circle.

    This is the complement of ``(walls minus closed ball) ∪ ∂ball``.
    """
    c = np.asarray(ball.center)
    r = ball.radius
    pieces = []
    for ax, ay, bx, by in grid.walls.segments:
        a, b = np.array([ax, ay]), np.array([bx, by])
        d = b - a
        A = float(d @ d)
        f = a - c
        B = float(f @ d)
        C = float(f @ f) - r * r
        disc = B * B - A * C
        if A == 0:
            if C > 0:
                pieces.append((ax, ay, bx, by))
            continue
        if disc <= 0:
            pieces.append((ax, ay, bx, by))
            continue
        s = math.sqrt(disc)
        t0, t1 = (-B - s) / A, (-B + s) / A
        if t1 <= 0 or t0 >= 1:
            pieces.append((ax, ay, bx, by))
            continue
        if t0 > 0:
            p = a + t0 * d
            pieces.append((ax, ay, p[0], p[1]))
        if t1 < 1:
            p = a + t1 * d
            pieces.append((p[0], p[1], bx, by))
    kept_circles = [tuple(x) for x in grid.walls.circles]
    kept_discs = [tuple(x) for x in grid.walls.discs]
    w = Walls(np.asarray(pieces, float).reshape(-1, 4),
              np.asarray(kept_circles + [(c[0], c[1], r)], float).reshape(-1, 3),
              np.asarray(kept_discs, float).reshape(-1, 3))
    return rasterize(grid.domain, None, walls=w, lattice=grid.lattice())


# ---------------------------------------------------------------------------
# Open regions
# ---------------------------------------------------------------------------

FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True, eq=False)
class OpenRegion:
    """Node mask standing in for an open set, split into 4-connected components.

    Components are ordered by decreasing node count, ties by smallest flat
    node index; each holds sorted flat (C-order) node indices.
    """

    grid: Grid
    mask: np.ndarray
    labels: np.ndarray
    components: list

    @property
    def is_empty(self):
        return len(self.components) == 0

    @property
    def n_components(self):
        return len(self.components)

    @property
    def node_count(self):
        return int(self.mask.sum())

    @property
    def h(self):
        return self.grid.h

    def component_mask(self, cid):
        m = np.zeros(self.grid.nx * self.grid.ny, dtype=bool)
        m[self.components[cid]] = True
        return m.reshape(self.grid.shape)

    def subregion(self, ids):
        """Region made of the listed components (in this region's order)."""
        m = np.zeros(self.grid.nx * self.grid.ny, dtype=bool)
        for cid in ids:
            m[self.components[cid]] = True
        return region_from_mask(self.grid, m.reshape(self.grid.shape))

    def split(self):
        return [self.subregion([k]) for k in range(self.n_components)]

    def union(self, other):
        if other.grid is not self.grid and other.grid.lattice() != self.grid.lattice():
            raise ValueError("regions live on different lattices")
        return region_from_mask(self.grid, self.mask | other.mask)

    def overlaps(self, other):
        return bool(np.any(self.mask & other.mask))

    def contains(self, other):
        return bool(np.all(self.mask[other.mask]))

    def on_grid(self, grid):
        """Restrict this region's mask to the free nodes of ``grid`` (same lattice)."""
        return region_from_mask(grid, self.mask & grid.free)


def region_from_mask(grid, mask):
    mask = np.asarray(mask, dtype=bool).reshape(grid.shape) & grid.free
    labels, count = ndimage.label(mask, structure=FOUR_CONNECTED)
    labels = labels.astype(np.int32) - 1
    flat = labels.ravel()
    comps = []
    if count:
        order = np.argsort(flat, kind="stable")
        sorted_labels = flat[order]
        starts = np.searchsorted(sorted_labels, np.arange(count))
        ends = np.searchsorted(sorted_labels, np.arange(count), side="right")
        comps = [np.sort(order[s:e]) for s, e in zip(starts, ends)]
        comps.sort(key=lambda c: (-len(c), int(c[0])))
        relabel = np.full(count, -1, dtype=np.int32)
        for new, c in enumerate(comps):
            relabel[flat[c[0]]] = new
        flat = np.where(flat >= 0, relabel[np.maximum(flat, 0)], -1).astype(np.int32)
    mask.setflags(write=False)
    labels = flat.reshape(grid.shape)
    labels.setflags(write=False)
    return OpenRegion(grid, mask, labels, comps)


def components(grid):
    """4-connected components of the free (interior, non-obstacle) nodes."""
    return region_from_mask(grid, grid.free)


def empty_region(grid):
    return region_from_mask(grid, np.zeros(grid.shape, dtype=bool))


def split_by_ball(region, ball):
    """``(A∖B̄, (A∖B̄) ∪ (B∩Ω))`` as regions on one common lattice.

    Both are built on the grid whose walls are those of ``region`` outside the
    closed ball plus the ball's circle, so evaluations of the two share every
    node value they have in common.
    """
    g2 = with_ball_opened(region.grid, ball)
    pts = g2.node_points()
    r_from_c = np.hypot(pts[:, 0] - ball.center[0], pts[:, 1] - ball.center[1]).reshape(g2.shape)
    outer = region.mask & g2.free & (r_from_c > ball.radius)
    inner = g2.free & (r_from_c < ball.radius)
    return region_from_mask(g2, outer), region_from_mask(g2, outer | inner)


# ---------------------------------------------------------------------------
# Distance field and inradius
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DensityField:
    grid: Grid
    values: np.ndarray

    def max(self):
        return float(self.values.max())

    def to_csv(self, path):
        write_field_csv(path, self.values)


def distance_transform(grid):
    """Exact distance to ∂Ω ∪ Σ at every interior node (zero elsewhere)."""
    if not np.any((grid.node_class == DOMAIN_BOUNDARY) | (grid.node_class == OBSTACLE)):
        raise EmptySet("no boundary or obstacle nodes to measure distance from")
    vals = np.where(grid.free, grid.wall_distance, 0.0)
    return DensityField(grid, vals)


def refine_max_distance(grid, starts, values, iters=240):
    """Batched pattern search for local maxima of the wall distance.

    Each start ``x`` with value ``v`` moves only inside the ball of radius
    min(h, v) around it, which lies in the same open component, so every
    returned value is attained.  The 12 probe directions rotate by an
    irrational angle every sweep so ridges at any angle are eventually
    followed.  Returns refined ``(values, points)``.
    """
    x0 = np.asarray(starts, dtype=float).reshape(-1, 2)
    best_v = np.asarray(values, dtype=float).copy()
    best_x = x0.copy()
    rho = np.minimum(grid.h, best_v)
    step = 0.5 * rho
    floor = 1e-13 * max(1.0, grid.h)
    base = 2 * math.pi * np.arange(12) / 12
    for it in range(iters):
        live = step > floor
        if not live.any():
            break
        ang = base + it * _GOLDEN_ANGLE
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
        idx = np.flatnonzero(live)
        probes = best_x[idx, None, :] + step[idx, None, None] * dirs[None]
        inside = np.hypot(*(probes - x0[idx, None, :]).transpose(2, 0, 1)) < rho[idx, None]
        vals = grid.distance_to_walls(probes.reshape(-1, 2)).reshape(len(idx), -1)
        vals = np.where(inside, vals, -np.inf)
        j = np.argmax(vals, axis=1)
        gain = vals[np.arange(len(idx)), j] > best_v[idx]
        up, down = idx[gain], idx[~gain]
        best_v[up] = vals[gain, j[gain]]
        best_x[up] = probes[gain, j[gain]]
        step[down] *= 0.6
    return best_v, best_x


def component_inradii(region, refine=True, max_starts=MAX_REFINE_STARTS):
    """Per-component ``(value, center)`` of the largest inscribed ball.

    The wall distance is 1-Lipschitz, so the true maximizer lies within
    h/sqrt(2) of a node whose value is at least the best node value minus
    h/sqrt(2); refinement starts from every such node (best first, at most
    ``max_starts``).
    """
    out = []
    g = region.grid
    wd = g.wall_distance.ravel()
    slack = g.h / math.sqrt(2)
    for nodes in region.components:
        vals = wd[nodes]
        order = np.lexsort((nodes, -vals))  # by value, ties by smallest flat index
        k = int(order[0])
        best = (float(vals[k]), tuple(map(float, g.node_points(nodes[k:k + 1])[0])))
        if refine:
            starts = order[:max_starts][vals[order[:max_starts]] >= vals[k] - slack]
            rv, rx = refine_max_distance(g, g.node_points(nodes[starts]), vals[starts])
            i = int(np.argmax(rv))
            if rv[i] > best[0]:
                best = (float(rv[i]), (float(rx[i, 0]), float(rx[i, 1])))
        out.append(best)
    return out


def inradius(region, refine=True):
    """Largest inscribed radius; evaluated per component and maximized."""
    if region.is_empty:
        return 0.0
    return max(v for v, _ in component_inradii(region, refine))


def inradius_center(region, refine=True):
    if region.is_empty:
        return 0.0, None
    return max(component_inradii(region, refine), key=lambda t: t[0])


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def write_grid_csv(path, grid):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "x", "y", "node_class"])
        for i in range(grid.nx):
            for j in range(grid.ny):
                x, y = grid.coords(i, j)
                w.writerow([i, j, repr(x), repr(y), int(grid.node_class[i, j])])


def write_grid_binary(path, grid):
    """Raw ``int8`` node classes in C order (shape ``(nx, ny)``)."""
    np.ascontiguousarray(grid.node_class, dtype=np.int8).tofile(path)


def write_field_csv(path, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "value"])
        nx, ny = values.shape
        for i in range(nx):
            for j in range(ny):
                w.writerow([i, j, repr(float(values[i, j]))])
