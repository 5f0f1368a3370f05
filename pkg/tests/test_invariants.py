"""Cross-module invariants checked as properties over random inputs."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxshape import functionals as FN
from maxshape import grid as G
from maxshape.geometry import (Ball, CurveNetwork, DomainSpec, distance_to_network, enlarge_to_length,
                               hausdorff_distance, length_in_ball, total_length)

coord = st.floats(0.05, 0.95)
TOL = 1e-4


@st.composite
def polylines(draw, max_points=5):
    n = draw(st.integers(2, max_points))
    pts = [(draw(coord), draw(coord)) for _ in range(n)]
    for a, b in zip(pts, pts[1:]):
        if math.dist(a, b) < 1e-3:
            return CurveNetwork.segment((0.1, 0.1), (0.9, 0.2))
    return CurveNetwork.polyline(pts)


@settings(max_examples=25, deadline=None)
@given(polylines(), polylines(), polylines())
def test_hausdorff_is_a_metric(a, b, c):
    ab = hausdorff_distance(a, b, TOL)
    assert ab == hausdorff_distance(b, a, TOL)
    assert hausdorff_distance(a, a, TOL) <= TOL
    assert hausdorff_distance(a, c, TOL) <= ab + hausdorff_distance(b, c, TOL) + 3 * TOL


@settings(max_examples=40, deadline=None)
@given(polylines(), st.data())
def test_lower_density_bound_for_connected_networks(net, data):
    i = data.draw(st.integers(0, net.n_vertices - 1))
    frac = data.draw(st.floats(0.01, 0.99))
    r = frac * net.diameter() / 2
    assert length_in_ball(net, Ball(tuple(net.vertices[i]), r)) >= r - 1e-12


@settings(max_examples=40, deadline=None)
@given(polylines(), st.floats(0.0, 1.0), st.floats(0.01, 1.0))
def test_length_in_ball_monotone_in_radius(net, cx, r):
    ball_small = Ball((cx, 0.5), r)
    ball_big = Ball((cx, 0.5), 1.3 * r)
    assert length_in_ball(net, ball_small) <= length_in_ball(net, ball_big) + 1e-12
    assert length_in_ball(net, ball_big) <= total_length(net) + 1e-12


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 0.8), st.integers(0, 1000))
def test_enlargement_contains_input(extra, seed):
    sq = DomainSpec.unit_square()
    net = CurveNetwork.polyline([(0.2, 0.3), (0.5, 0.6), (0.8, 0.3)])
    out = enlarge_to_length(net, sq, total_length(net) + extra, rng_seed=seed, h=1 / 32)
    for v in net.vertices:
        assert np.min(np.hypot(*(out.vertices - v).T)) <= 1e-12
    # original edges survive, possibly split at new junctions
    for seg in net.segments():
        for t in (0.25, 0.5, 0.75):
            p = (1 - t) * seg[:2] + t * seg[2:]
            assert distance_to_network(p, out) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(polylines(3), polylines(3))
def test_inradius_monotone_under_obstacle_growth(a, b):
    sq = DomainSpec.unit_square()
    h = 1 / 32
    base = G.components(G.rasterize(sq, a, h))
    grown = G.components(G.rasterize(sq, a, h, walls=G.Walls().add(segments=b.segments())))
    assert G.inradius(grown) <= G.inradius(base) + 1e-12


def test_inradius_grid_refinement():
    sq = DomainSpec.unit_square()
    net = CurveNetwork.polyline([(0.1, 0.2), (0.55, 0.7), (0.9, 0.35)])
    vals = [G.inradius(G.components(G.rasterize(sq, net, 2.0 ** -k))) for k in range(4, 8)]
    for k, (coarse, fine) in enumerate(zip(vals, vals[1:]), start=4):
        assert abs(coarse - fine) <= 2.0 ** -k


def test_inradius_two_squares():
    dom = DomainSpec.rectangle(0.0, 0.0, 3.5, 2.0)
    wall = CurveNetwork.polyline([(1.25, 0.0), (1.25, 2.0)])
    g = G.rasterize(dom, wall, 1 / 64, walls=G.Walls().add(segments=np.array([[0.0, 1.0, 1.25, 1.0]])))
    region = G.components(g)
    # two 1.25 x 1 rectangles beside a 2.25 x 2 one: max(1/2, 1/2, 1)
    assert FN.Inradius().evaluate(region) == pytest.approx(1.0, abs=1e-9)


def test_inradius_local_maxitivity_at_boundary_point():
    disk = DomainSpec.disk((0.0, 0.0), 1.0, n=256)
    ring = CurveNetwork.circle((0.0, 0.0), 0.1, arcs=32)
    region = G.components(G.rasterize(disk, ring, 1 / 40))
    rec = FN.check_local_maxitivity(FN.Inradius(), region, (1.0, 0.0), 0.01)
    assert rec["gap"] == 0.0 and rec["pass"]
