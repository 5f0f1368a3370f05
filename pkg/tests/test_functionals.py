import math

import pytest

from maxshape import functionals as FN
from maxshape import grid as G
from maxshape import pde
from maxshape.errors import NotNested, Overlap
from maxshape.geometry import CurveNetwork, DomainSpec

H = 1 / 32


@pytest.fixture(scope="module")
def pairs():
    return FN.disjoint_pair_fixtures(H)


@pytest.fixture(scope="module")
def nested():
    return FN.nested_fixtures(H)


def test_from_spec_roundtrip():
    for spec in [{"name": "Inradius"}, {"name": "TorsionMax"}, {"name": "Eigenvalue", "k": 2},
                 {"name": "PoincareSobolev", "p": 1.5, "q": 2.0},
                 {"name": "SpectralComposite", "f": "sum_inv", "k": 3}]:
        F = FN.from_spec(spec)
        assert FN.from_spec(F.to_dict()).to_dict() == F.to_dict()


def test_unknown_functional():
    with pytest.raises(ValueError):
        FN.from_spec({"name": "Diameter"})


@pytest.mark.parametrize("F", [FN.Inradius(), FN.TorsionMax(), FN.Eigenvalue(2),
                               FN.SpectralComposite("sum_inv", 2)], ids=lambda f: f.name)
def test_maxitive_on_disjoint_pairs(F, pairs):
    for name, a, b in pairs[:4]:
        rec = FN.check_maxitivity(F, a, b, fixture=name)
        assert rec["pass"], rec


def test_inradius_gap_is_exact(pairs):
    for name, a, b in pairs:
        assert FN.check_maxitivity(FN.Inradius(), a, b, fixture=name)["gap"] == 0.0


def test_rigidity_is_additive(pairs):
    name, a, b = pairs[0]
    rec = FN.check_maxitivity(FN.TorsionalRigidity(), a, b, fixture=name)
    assert rec["pass"]
    T = FN.TorsionalRigidity()
    assert T.evaluate(a.union(b)) == pytest.approx(T.evaluate(a) + T.evaluate(b), rel=1e-7)


def test_overlap_rejected():
    region = G.components(G.rasterize(DomainSpec.unit_square(), None, H))
    with pytest.raises(Overlap):
        FN.check_maxitivity(FN.Inradius(), region, region)


@pytest.mark.parametrize("F", [FN.Inradius(), FN.TorsionMax(), FN.TorsionalRigidity(), FN.Eigenvalue(1),
                               FN.SpectralComposite("inv_lambda_k", 1)], ids=lambda f: f.name)
def test_monotone_on_nested(F, nested):
    for name, small, big in nested:
        assert FN.check_monotonicity(F, small, big, fixture=name)["pass"]


def test_not_nested_rejected(pairs):
    _, a, b = pairs[0]
    with pytest.raises(NotNested):
        FN.check_monotonicity(FN.Inradius(), a, b)


def test_empty_values():
    g = G.rasterize(DomainSpec.unit_square(), None, H)
    empty = G.empty_region(g)
    assert FN.Inradius().evaluate(empty) == 0.0
    assert FN.TorsionMax().evaluate(empty) == 0.0
    assert math.isinf(FN.Eigenvalue(1).evaluate(empty))
    assert FN.SpectralComposite("inv_lambda_k", 1).evaluate(empty) == 0.0


def test_composite_decrease_probe():
    F = FN.SpectralComposite("sum_inv", 3)
    probes = F.decrease_probes([10.0, 20.0, 30.0], 1e-3)
    assert all(probes)
    # inv_lambda_k only sees the k-th eigenvalue
    assert FN.SpectralComposite("inv_lambda_k", 2).decrease_probes([10.0, 20.0], 1e-3) == [False, True]


def test_certified_radius_constant_coefficients():
    region = G.components(G.rasterize(DomainSpec.unit_square(), None, H))
    r_a, c1, c2 = FN.certified_radius(region, None, 1)
    R = G.inradius(region)
    assert r_a == pytest.approx(R / math.sqrt(2), rel=1e-12)
    assert c1 == pytest.approx(2.4048255576957724)


def test_local_maxitivity_eigenvalue_below_certified_radius():
    net = CurveNetwork.segment((0.0, 0.5), (0.6, 0.5))
    region = G.components(G.rasterize(DomainSpec.unit_square(), net, 1 / 40))
    r_a, _, _ = FN.certified_radius(region, None, 1)
    rec = FN.check_local_maxitivity(FN.Eigenvalue(1), region, (0.3, 0.2), 0.5 * r_a)
    assert rec["binding"] and rec["pass"]


def test_ball_ladder_positive_and_shrinking():
    rec = FN.check_positive_on_balls_and_shrinking(FN.Inradius(), r0=0.5, levels=3)
    assert rec["pass"]


def test_strict_enlargement():
    sq = DomainSpec.unit_square()
    net = CurveNetwork.segment((0.25, 0.5), (0.75, 0.5))
    rec = FN.check_strict_enlargement(FN.SpectralComposite("inv_lambda_k", 1), net, sq, 1 / 32)
    assert rec["pass"]


def test_solver_config_is_respected():
    cfg = pde.SolverConfig(eig_tol=1e-9)
    assert FN.Eigenvalue(1).tolerance(cfg) == pytest.approx(1e-8)
