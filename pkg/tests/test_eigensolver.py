import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarbond import eigensolver as es


def free_box(n, L=1.0, dimension=es.SPATIAL):
    grid = es.RadialGrid(1e-12, L, n)
    return es.RadialProblem.from_function(grid, np.zeros_like, 0, dimension)


def coulomb(n, dimension, rho_max=40.0, rho_min=1e-5):
    grid = es.RadialGrid(rho_min, rho_max, n)
    return es.RadialProblem.from_function(grid, lambda r: -2.0 / r, 0, dimension)


class TestGrid:
    def test_points_and_step(self):
        g = es.RadialGrid(0.1, 1.1, 1001)
        assert g.h == pytest.approx(1e-3)
        assert g.points[0] == 0.1 and g.points[-1] == pytest.approx(1.1)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 2000), (1.0, 0.5, 2000), (0.1, 1.0, 999)])
    def test_rejects_bad_grid(self, args):
        with pytest.raises(ValueError):
            es.RadialGrid(*args)

    def test_problem_validates_samples(self):
        g = es.RadialGrid(0.1, 1.0, 1000)
        with pytest.raises(ValueError):
            es.RadialProblem(g, np.zeros(10))
        bad = np.zeros(1000)
        bad[3] = np.inf
        with pytest.raises(ValueError):
            es.RadialProblem(g, bad)


def test_centrifugal_terms():
    assert es.centrifugal(2.0, 0, es.PLANAR) == pytest.approx(-0.0625)
    assert es.centrifugal(2.0, 1, es.SPATIAL) == pytest.approx(0.5)
    assert es.seed_exponent(0, es.PLANAR) == 0.5


@pytest.mark.parametrize("node", [0, 1, 2, 5])
def test_infinite_well(node):
    prob = free_box(4001)
    exact = ((node + 1) * math.pi) ** 2
    res = es.solve_state(prob, node, 0.5 * exact, 1.5 * exact)
    assert res.nodes == node and res.converged
    assert res.epsilon == pytest.approx(exact, rel=1e-7)


def test_numerov_global_order():
    # Richardson on a highly excited box state, where the h^4 error dominates
    node = 20
    k2 = ((node + 1) * math.pi) ** 2
    eps = [es.solve_state(free_box(n), node, 0.98 * k2, 1.02 * k2, rel_tol=1e-15).epsilon
           for n in (1001, 2001, 4001)]
    order = math.log2((eps[0] - eps[1]) / (eps[1] - eps[2]))
    assert order >= 3.8


def test_spatial_hydrogen():
    res = es.solve_state(coulomb(40001, es.SPATIAL), 0, -5.0, -0.01)
    assert res.epsilon == pytest.approx(-1.0, abs=1e-7)
    mean, literal = es.expectation_rho(res.u, res.grid)
    assert mean == pytest.approx(1.5, rel=1e-5)
    assert literal == pytest.approx(mean, rel=1e-6)


def test_planar_hydrogen_converges_under_refinement():
    # planar ground state of -u'' - u/(4 rho^2) - 2u/rho: eps = -4, <rho> = 1/2
    errs = [abs(es.solve_state(coulomb(n, es.PLANAR), 0, -10.0, -0.1).epsilon + 4.0)
            for n in (40001, 160001)]
    assert errs[1] < errs[0] < 1e-4


@pytest.mark.parametrize("node,exact", [(1, -1 / 2.25), (2, -1 / 6.25)])
def test_planar_hydrogen_excited(node, exact):
    res = es.solve_state(coulomb(40001, es.PLANAR, rho_max=120.0), node, -3.0, -0.01)
    assert res.nodes == node
    assert res.epsilon == pytest.approx(exact, rel=1e-4)


def test_harmonic_oscillator_levels():
    # u'' + (eps - rho^2) u = 0 in 3D with l = 0: eps = 3, 7, 11
    grid = es.RadialGrid(1e-6, 8.0, 8001)
    prob = es.RadialProblem.from_function(grid, lambda r: r * r, 0, es.SPATIAL)
    for node, exact in enumerate((3.0, 7.0, 11.0)):
        assert es.solve_state(prob, node, 0.0, 15.0).epsilon == pytest.approx(exact, rel=1e-8)


def test_normalized_and_positive():
    res = es.solve_state(coulomb(20001, es.SPATIAL), 0, -5.0, -0.01)
    assert es.trapezoid(res.u**2, res.grid.h) == pytest.approx(1.0, rel=1e-12)
    assert res.u[np.argmax(np.abs(res.u))] > 0


def test_deterministic():
    a = es.solve_state(coulomb(20001, es.SPATIAL), 0, -5.0, -0.01)
    b = es.solve_state(coulomb(20001, es.SPATIAL), 0, -5.0, -0.01)
    assert a.epsilon == b.epsilon
    assert np.array_equal(a.u, b.u)


def test_empty_bracket_raises():
    with pytest.raises(es.NoEigenvalueInBracket):
        es.solve_state(coulomb(20001, es.SPATIAL), 0, -0.9, -0.5)
    with pytest.raises(es.NoEigenvalueInBracket):
        es.solve_state(coulomb(20001, es.SPATIAL), 0, -0.2, -0.1)


def test_overflow_is_rescaled():
    # deep forbidden region: the raw shooting solution overflows without rescaling
    grid = es.RadialGrid(1e-3, 60.0, 6001)
    prob = es.RadialProblem.from_function(grid, lambda r: (r - 50.0) ** 2, 0, es.SPATIAL)
    res = es.solve_state(prob, 0, 0.0, 5.0)
    assert res.epsilon == pytest.approx(1.0, rel=1e-6)
    assert np.all(np.isfinite(res.u))


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=2.0, max_value=30.0), st.floats(min_value=0.05, max_value=0.5))
def test_narrow_peak_mean(center, width):
    grid = es.RadialGrid(1e-3, 40.0, 20001)
    u = np.exp(-((grid.points - center) / width) ** 2)
    u = es.normalize(u, grid)
    assert es.expectation_rho(u, grid)[0] == pytest.approx(center, rel=1e-6)


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.3, max_value=3.0))
def test_oscillator_scaling(omega):
    # eps(omega) = 3 omega for U = omega^2 rho^2
    L = 10.0 / math.sqrt(omega)
    grid = es.RadialGrid(1e-6, L, 4001)
    prob = es.RadialProblem.from_function(grid, lambda r: (omega * r) ** 2, 0, es.SPATIAL)
    res = es.solve_state(prob, 0, 0.0, 6.0 * omega)
    assert res.epsilon == pytest.approx(3.0 * omega, rel=1e-6)
