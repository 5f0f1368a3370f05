import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxshape import functionals as FN
from maxshape import optimizer as OPT
from maxshape.errors import ConfigError, InfeasibleLength, MoveInapplicable, RepairFailed
from maxshape.geometry import CurveNetwork, DomainSpec, total_length

SQ = DomainSpec.unit_square()


def small_config(functional=None, iterations=24, seed=3, **kw):
    return OPT.OptConfig(SQ, 1.0, functional or FN.Inradius(), grid_h=1 / 32,
                         schedule=OPT.Schedule(iterations=iterations, generation_size=4), seed=seed, **kw)


def test_initial_guess_is_horizontal_segment():
    net = OPT.initial_guess(SQ, 0.6)
    assert total_length(net) == pytest.approx(0.6)
    np.testing.assert_allclose(net.vertices[:, 1], 0.5)


def test_initial_guess_enlarges_long_targets():
    net = OPT.initial_guess(SQ, 1.5, h=1 / 32)
    assert total_length(net) == pytest.approx(1.5, abs=1e-9)
    assert net.is_connected()


@pytest.mark.parametrize("L", [0.0, -1.0, 1e6])
def test_infeasible_length(L):
    with pytest.raises(InfeasibleLength):
        OPT.check_length(SQ, L, 1 / 64)


def test_unknown_move_rejected():
    with pytest.raises(ConfigError):
        small_config(moves={"Teleport": 1.0})


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(OPT.MOVES))
def test_moves_then_repair_keep_constraints(seed, move):
    cfg = small_config()
    net = OPT.initial_guess(SQ, 1.0, h=cfg.grid_h)
    rng = np.random.default_rng(seed)
    ctx = {"scale": 1.0, "r0": 0.25}
    try:
        _, cand = OPT.propose(net, cfg, rng, ctx, move)
        cand = OPT.repair(cand, SQ, 1.0, cfg.grid_h, cfg.length_tol, seed)
    except (MoveInapplicable, RepairFailed):
        return
    assert cand.is_connected()
    assert abs(total_length(cand) - 1.0) <= cfg.length_tol
    assert all(SQ.inside(v) for v in cand.vertices)


def test_repair_trims_and_scales():
    long = CurveNetwork.polyline([(0.1, 0.1), (0.9, 0.1), (0.9, 0.9)])
    out = OPT.repair(long, SQ, 1.0, 1 / 32)
    assert total_length(out) == pytest.approx(1.0, abs=1e-6)


def test_minimize_improves_and_is_deterministic():
    cfg = small_config()
    a = OPT.minimize(cfg, threads=1)
    b = OPT.minimize(cfg, threads=3)
    assert a.best_value <= a.initial_value
    assert a.to_dict() == b.to_dict()
    assert [r["value"] for r in a.trace] == [r["value"] for r in b.trace]
    assert len(a.trace) == cfg.schedule.iterations


def test_best_value_matches_rescore():
    cfg = small_config(FN.SpectralComposite("inv_lambda_k", 1), iterations=12)
    res = OPT.minimize(cfg, threads=1)
    assert OPT.score(res.best, cfg) == res.best_value
    assert abs(total_length(res.best) - cfg.L) <= cfg.length_tol


def test_raw_eigenvalue_rejected():
    with pytest.raises(ConfigError):
        small_config(FN.Eigenvalue(1))


def test_config_from_dict():
    cfg = OPT.config_from_dict({"L": 0.5, "functional": {"name": "TorsionMax"},
                                "schedule": {"iterations": 10}}, SQ)
    assert cfg.schedule.iterations == 10
    assert cfg.functional.name == "TorsionMax"


def test_parametric_family_lengths():
    fam = list(OPT.parametric_family(SQ, 1.0, step=0.1, angle_step=15.0))
    assert fam
    for _, net in fam:
        assert total_length(net) == pytest.approx(1.0, abs=1e-12)
