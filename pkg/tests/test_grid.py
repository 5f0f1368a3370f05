import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxshape import grid as G
from maxshape.errors import GridTooLarge
from maxshape.geometry import Ball, CurveNetwork, DomainSpec


def test_node_classes_on_unit_square(unit_square):
    g = G.rasterize(unit_square, None, 1 / 16)
    assert g.nx == g.ny == 16 + 3
    pts = g.node_points().reshape(g.nx, g.ny, 2)
    interior = g.node_class == G.INTERIOR
    assert np.all((pts[interior] > 1 / 32) & (pts[interior] < 1 - 1 / 32))
    assert not np.any(g.node_class == G.OBSTACLE)


def test_chord_splits_square(unit_square):
    net = CurveNetwork.segment((0.5, 0.0), (0.5, 1.0))
    region = G.components(G.rasterize(unit_square, net, 1 / 32))
    assert region.n_components == 2
    sizes = [len(c) for c in region.components]
    assert sizes[0] == sizes[1]
    # equal sizes: first component holds the smallest flat index
    assert region.components[0][0] < region.components[1][0]


def test_components_ordered_by_size(unit_square):
    net = CurveNetwork.segment((0.3, 0.0), (0.3, 1.0))
    region = G.components(G.rasterize(unit_square, net, 1 / 32))
    sizes = [len(c) for c in region.components]
    assert sizes == sorted(sizes, reverse=True)


def test_obstacle_band_never_bridged():
    # a thin slanted chord must separate at any grid spacing
    sq = DomainSpec.unit_square()
    net = CurveNetwork.segment((0.0, 0.137), (1.0, 0.911))
    for h in (1 / 17, 1 / 31, 1 / 64):
        assert G.components(G.rasterize(sq, net, h)).n_components == 2


def test_grid_cap(unit_square):
    with pytest.raises(GridTooLarge):
        G.rasterize(unit_square, None, 1e-4, cap=1000)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 1.0), st.sampled_from([1 / 32, 1 / 48, 1 / 64]))
def test_inradius_of_disk(radius, h):
    g = G.rasterize(DomainSpec.disk((0.0, 0.0), radius, n=512), None, h)
    R = G.inradius(G.components(g))
    # certified lower bound, accurate to the polygon and grid resolution
    assert R <= radius + 1e-12
    assert R >= radius * math.cos(math.pi / 512) - 1e-6


def test_inradius_slit_square(unit_square):
    net = CurveNetwork.segment((0.5, 0.0), (0.5, 1.0))
    R = G.inradius(G.components(G.rasterize(unit_square, net, 1 / 64)))
    assert R == pytest.approx(0.25, abs=1e-9)


def test_split_by_ball_partitions(unit_square):
    region = G.components(G.rasterize(unit_square, None, 1 / 32))
    outer, joined = G.split_by_ball(region, Ball((0.5, 0.5), 0.2))
    assert outer.node_count < region.node_count
    assert region.contains(outer)
    assert joined.contains(outer)


def test_union_and_overlap(unit_square):
    net = CurveNetwork.segment((0.5, 0.0), (0.5, 1.0))
    region = G.components(G.rasterize(unit_square, net, 1 / 32))
    a, b = region.subregion([0]), region.subregion([1])
    assert not a.overlaps(b)
    u = a.union(b)
    assert u.node_count == region.node_count
