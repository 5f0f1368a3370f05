import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxshape import audit as AU
from maxshape.errors import NotConverging
from maxshape.geometry import CurveNetwork


def test_segment_density_between_one_and_two():
    net = CurveNetwork.segment((0.0, 0.0), (1.0, 0.0))
    profiles = AU.ahlfors_profile(net, radii=[0.5, 0.25, 0.1])
    for p in profiles:
        assert p.passed
        np.testing.assert_allclose(p.densities, 1.0)  # endpoints see half a diameter


def test_midpoint_density_is_two():
    net = CurveNetwork.segment((0.0, 0.0), (1.0, 0.0))
    (p,) = AU.ahlfors_profile(net, [[0.5, 0.0]], [0.5, 0.1])
    np.testing.assert_allclose(p.densities, 2.0)


def test_radii_validation():
    net = CurveNetwork.segment((0.0, 0.0), (1.0, 0.0))
    with pytest.raises(ValueError):
        AU.ahlfors_profile(net, radii=[0.1, 0.2])
    with pytest.raises(ValueError):
        AU.ahlfors_profile(net, radii=[0.9])


def test_slack_scales_with_grid():
    net = CurveNetwork.segment((0.0, 0.0), (1.0, 0.0))
    (p,) = AU.ahlfors_profile(net, [[0.0, 0.0]], [0.5, 0.25], h=0.01)
    np.testing.assert_allclose(p.slack, [0.06, 0.12])


@pytest.mark.parametrize("depth", [1, 3, 6, 10])
def test_dyadic_fan_densities(depth):
    rep = AU.dyadic_fan_report(depth)
    np.testing.assert_allclose(rep["densities"], rep["expected"], rtol=0, atol=1e-12)
    assert rep["total_length"] == pytest.approx(2.0, abs=1e-14)
    assert rep["truncated_length"] == pytest.approx(2 - 2.0 ** -depth, abs=1e-14)


def test_non_ahlfors_from_depth_five():
    flags = {d: AU.dyadic_fan_report(d)["non_ahlfors"] for d in range(1, 9)}
    assert not any(flags[d] for d in range(1, 5))
    assert all(flags[d] for d in range(5, 9))


def test_three_arm_star_densities_in_band():
    net = AU.three_arm_star()
    radii = np.geomspace(0.5, 1e-3, 20)
    for p in AU.ahlfors_profile(net, radii=radii):
        assert np.all(p.densities >= 1 - 1e-12) and np.all(p.densities <= 3 + 1e-12)


def test_three_arm_star_is_regular():
    net = AU.three_arm_star()
    assert all(p.passed for p in AU.ahlfors_profile(net, radii=AU.default_radii(net, 0.0)))


def test_golab_battery_passes():
    assert all(r["pass"] for r in AU.golab_battery())


def test_diverging_sequence_rejected():
    unit = CurveNetwork.segment((0.0, 0.0), (1.0, 0.0))
    seq = [CurveNetwork.segment((0.0, 0.1 * n), (1.0, 0.1 * n)) for n in (1, 2, 3)]
    with pytest.raises(NotConverging):
        AU.golab_check(seq, unit)


def test_csv_written(tmp_path):
    net = CurveNetwork.segment((0.0, 0.0), (1.0, 0.0))
    AU.write_profiles_csv(tmp_path / "d.csv", AU.ahlfors_profile(net, radii=[0.5, 0.25]))
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == "point_id,r,density,pass"
    assert len(lines) == 1 + 2 * 2


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-3, 3), st.floats(-3, 3))
def test_profile_invariant_under_rigid_motion(angle, dx, dy):
    net = AU.dyadic_fan(6)
    moved = net.rotated(angle).translated(dx, dy)
    radii = 2.0 ** -np.arange(1, 7)
    a = AU.ahlfors_profile(net, radii=radii)
    b = AU.ahlfors_profile(moved, radii=radii)
    # chords of nearly tangent segments are sqrt(eps)-conditioned, hence 1e-6
    for pa, pb in zip(a, b):
        np.testing.assert_allclose(pa.densities, pb.densities, rtol=0, atol=1e-6)
        np.testing.assert_array_equal(pa.flags, pb.flags)
