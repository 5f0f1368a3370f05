import math

import numpy as np
import pytest

from maxshape import grid as G
from maxshape import pde
from maxshape.bessel import J01, disk_eigenvalue
from maxshape.errors import BadExponents
from maxshape.geometry import CurveNetwork, DomainSpec


@pytest.fixture(scope="module")
def square():
    return G.components(G.rasterize(DomainSpec.unit_square(), None, 1 / 48))


def test_square_spectrum(square):
    lam = pde.eigenvalues(square, k=3).values / math.pi ** 2
    np.testing.assert_allclose(lam, [2, 5, 5], rtol=3e-3)


def test_disk_first_eigenvalue():
    g = G.rasterize(DomainSpec.disk((0.0, 0.0), 1.0), None, 1 / 64)
    lam = pde.eigenvalues(G.components(g), k=1).values[0]
    assert lam == pytest.approx(J01 ** 2, rel=0.01)
    assert disk_eigenvalue(1) == pytest.approx(J01 ** 2)


def test_empty_region_spectrum():
    g = G.rasterize(DomainSpec.unit_square(), None, 1 / 8)
    lam = pde.eigenvalues(G.empty_region(g), k=2).values
    assert np.all(np.isinf(lam))


def test_dense_and_sparse_paths_agree(square):
    dense = pde.eigenvalues(square, k=2, config=pde.SolverConfig(dense_cutoff=10 ** 6)).values
    sparse = pde.eigenvalues(square, k=2, config=pde.SolverConfig(dense_cutoff=0)).values
    np.testing.assert_allclose(dense, sparse, rtol=1e-8)


def test_componentwise_matches_whole_grid():
    net = CurveNetwork.segment((0.35, 0.0), (0.35, 1.0))
    region = G.components(G.rasterize(DomainSpec.unit_square(), net, 1 / 32))
    a = pde.eigenvalues(region, k=3).values
    b = pde.eigenvalues(region, k=3, componentwise=False).values
    np.testing.assert_allclose(a, b, rtol=1e-8)


def test_torsion_square(square):
    ts = pde.solve_torsion(square)
    # series values for the unit square
    assert ts.M == pytest.approx(0.0736713, rel=2e-3)
    assert ts.T == pytest.approx(0.0351442, rel=2e-3)
    assert np.all(ts.w[square.mask] > 0)


def test_constant_coefficients_scale_spectrum(square):
    base = pde.eigenvalues(square, k=2).values
    c = pde.Coefficients.constant(3.0, 2.0, 1.0)
    lam = pde.eigenvalues(square, c, k=2).values
    np.testing.assert_allclose(lam, 1.5 * base + 0.5, rtol=1e-8)


@pytest.mark.parametrize("seed", [0, 1])
def test_sandwich_bounds(square, seed):
    rep = pde.ede_bounds_check(square, pde.Coefficients.random(seed), 3)
    assert rep["pass"]
    assert min(rep["lower_margin"]) >= -max(rep["tolerance"])


def test_ps_two_two_is_inverse_eigenvalue(square):
    lam = pde.eigenvalues(square, k=1).values[0]
    assert pde.poincare_sobolev(square, 2, 2) == pytest.approx(1 / lam, rel=1e-10)


def test_ps_ascent_reproduces_eigenvalue():
    region = G.components(G.rasterize(DomainSpec.unit_square(), None, 1 / 24))
    cfg = pde.SolverConfig(ps_tol=1e-10)
    value, _ = pde._ps_ascent(region.grid, region.mask, 2.0, 2.0, cfg)
    lam = pde.eigenvalues(region, k=1).values[0]
    assert value == pytest.approx(1 / lam, rel=1e-6)


@pytest.mark.parametrize("p,q", [(1.0, 2.0), (2.0, 1.5), (1.5, 6.0), (2.5, 2.0)])
def test_bad_exponents(square, p, q):
    with pytest.raises(BadExponents):
        pde.poincare_sobolev(square, p, q)


def test_critical_exponent():
    assert pde.critical_exponent(1.5) == pytest.approx(6.0)
    assert math.isinf(pde.critical_exponent(2.0))
