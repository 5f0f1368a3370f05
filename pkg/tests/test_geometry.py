import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxshape.errors import DisconnectedResult, InvalidDomain, InvalidNetwork
from maxshape.geometry import (Ball, CurveNetwork, DomainSpec, ball_surgery, enlarge_to_length,
                               hausdorff_distance, length_in_ball, lengths_in_balls, total_length)


def test_segment_basics():
    net = CurveNetwork.segment((0.0, 0.0), (3.0, 4.0))
    assert net.n_vertices == 2 and net.n_edges == 1
    assert total_length(net) == pytest.approx(5.0)
    assert net.diameter() == pytest.approx(5.0)
    assert net.is_connected()


def test_disconnected_network_rejected():
    with pytest.raises(InvalidNetwork):
        CurveNetwork(np.array([[0.0, 0], [1, 0], [2, 0], [3, 0]]), np.array([[0, 1], [2, 3]]))


def test_json_roundtrip():
    net = CurveNetwork.star((0.5, 0.5), [(0.2, 0.0), (0.3, 2.0), (0.1, 4.0)])
    back = CurveNetwork.from_json(net.to_json())
    np.testing.assert_array_equal(back.vertices, net.vertices)
    np.testing.assert_array_equal(back.edges, net.edges)


def test_domain_properties(unit_square):
    assert unit_square.area == pytest.approx(1.0)
    assert unit_square.perimeter == pytest.approx(4.0)
    assert unit_square.centroid == pytest.approx((0.5, 0.5))
    assert unit_square.inside((0.0, 0.3))  # closed
    assert not unit_square.inside((1.1, 0.3))


def test_self_intersecting_domain_rejected():
    with pytest.raises(InvalidDomain):
        DomainSpec.from_dict({"boundary": [[0, 0], [1, 1], [1, 0], [0, 1]]})


def test_length_in_ball_exact():
    net = CurveNetwork.segment((-2.0, 0.0), (2.0, 0.0))
    assert length_in_ball(net, Ball((0.0, 0.0), 1.0)) == pytest.approx(2.0, abs=1e-14)
    # chord at distance 0.6 from the center of a unit ball
    net = CurveNetwork.segment((-2.0, 0.6), (2.0, 0.6))
    assert length_in_ball(net, Ball((0.0, 0.0), 1.0)) == pytest.approx(1.6, abs=1e-14)


def test_hausdorff_segments():
    a = CurveNetwork.segment((0.0, 0.0), (1.0, 0.0))
    b = CurveNetwork.segment((0.0, 0.5), (1.0, 0.5))
    assert hausdorff_distance(a, b) == pytest.approx(0.5, abs=1e-4)
    c = CurveNetwork.segment((0.0, 0.0), (0.5, 0.0))
    assert hausdorff_distance(a, c) == pytest.approx(0.5, abs=1e-4)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.45), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.integers(16, 96))
def test_ball_surgery_length_identity(r, cx, cy, arcs):
    net = CurveNetwork.star((0.0, 0.0), [(1.0, 0.3), (0.8, 2.1), (0.9, 4.0)])
    ball = Ball((cx, cy), r)
    try:
        out, perimeter = ball_surgery(net, ball, arcs=arcs, return_perimeter=True)
    except DisconnectedResult:
        assert length_in_ball(net, ball) == 0.0
        return
    expected = total_length(net) - length_in_ball(net, ball) + perimeter
    assert out.is_connected()
    assert total_length(out) == pytest.approx(expected, rel=1e-9, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 2.0), st.integers(0, 10_000))
def test_enlarge_hits_target(target, seed):
    sq = DomainSpec.unit_square()
    net = CurveNetwork.segment((0.4, 0.5), (0.6, 0.5))
    out = enlarge_to_length(net, sq, target, rng_seed=seed, h=1 / 64)
    assert out.is_connected()
    assert total_length(out) == pytest.approx(target, abs=1e-9)
    assert all(sq.inside(v) for v in out.vertices)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-5, 5), st.floats(-5, 5))
def test_densities_invariant_under_rigid_motion(angle, dx, dy):
    net = CurveNetwork.star((0.1, 0.2), [(1.0, 0.3), (0.5, 2.0), (0.7, 4.0)])
    moved = net.rotated(angle).translated(dx, dy)
    radii = np.array([0.8, 0.4, 0.2, 0.1])
    a = lengths_in_balls(net, net.vertices, radii)
    b = lengths_in_balls(moved, moved.vertices, radii)
    np.testing.assert_allclose(a, b, atol=1e-9)
