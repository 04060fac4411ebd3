import logging
import math

import numpy as np
from scipy.integrate import trapezoid
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarbond import eigensolver as es
from planarbond.atomic import (AtomSolution, AtomSpec, FitDegenerate, build_atomic_problem,
                               eval_orbital, fit_orbital, fit_samples, normalize_orbital,
                               orbital_from_b, solve_atom, table_orbital)
from planarbond.constants import MUON_MASS


@pytest.fixture(scope="module")
def pe_small():
    return solve_atom(AtomSpec("pe", 0.2e-5))


@pytest.fixture(scope="module")
def pe_large():
    return solve_atom(AtomSpec("pe", 0.2e-3))


def test_fig1_energy(pe_small):
    assert pe_small.eta == pytest.approx(-2.2417, rel=5e-3)


def test_lambda_shift_law(pe_small, pe_large):
    # deep in the logarithmic regime only (1/pi) ln(k) shifts, i.e. (1/pi) ln 100
    shift = pe_large.eta - pe_small.eta
    assert shift == pytest.approx(math.log(100) / math.pi, rel=1e-2)


def test_ground_state_is_nodeless(pe_small):
    assert pe_small.eigen.nodes == 0
    assert pe_small.fit.residual < 0.05 * np.abs(pe_small.eigen.u).max()


def test_conventions_coincide_for_electrons():
    a = solve_atom(AtomSpec("pe", 0.2e-3, convention="A"), fit=False).eta
    b = solve_atom(AtomSpec("pe", 0.2e-3, convention="B"), fit=False).eta
    c = solve_atom(AtomSpec("pe", 0.2e-3, convention="C"), fit=False).eta
    assert a == b
    # convention C only rescales k by 1/sqrt(zeta_atom), a log shift
    assert c - a == pytest.approx(-math.log(math.sqrt(AtomSpec("pe").zeta_atom)) / math.pi,
                                  rel=2e-2)


def test_muon_deepens_under_B():
    a = solve_atom(AtomSpec("pmu", 0.2e-3, convention="A"), fit=False).eta
    b = solve_atom(AtomSpec("pmu", 0.2e-3, convention="B"), fit=False).eta
    assert b < a


def test_coulomb_reference():
    sol = solve_atom(AtomSpec("pe", model="coulomb3d"))
    assert sol.eta == pytest.approx(-1.0, abs=1e-7)
    assert sol.fit.b == pytest.approx(1.0, rel=1e-6)
    assert sol.fit.c == pytest.approx(1 / math.sqrt(math.pi), rel=1e-5)


def test_coulomb_muonic_scaling():
    sol = solve_atom(AtomSpec("pmu", model="coulomb3d", convention="B"), fit=False)
    assert sol.eta == pytest.approx(-MUON_MASS**2, rel=1e-7)


def test_log_atom_is_bound_above_zero():
    sol = solve_atom(AtomSpec("pe", model="log"))
    assert sol.eta > 0 and sol.eigen.nodes == 0


def test_worked_normalization():
    A, c = normalize_orbital(12.8453, 1.72068)
    assert A == pytest.approx(0.0275237, abs=1e-4)
    assert c == pytest.approx(0.353501, abs=1e-4)


@pytest.mark.parametrize("dimension", [es.PLANAR, es.SPATIAL])
def test_normalized_density_integrates_to_one(dimension):
    fit = orbital_from_b(1.7, dimension)
    r = np.linspace(1e-9, 60, 200001)
    psi = eval_orbital(fit, r)
    measure = 2 * np.pi * r if dimension == es.PLANAR else 4 * np.pi * r * r
    assert trapezoid(psi**2 * measure, r) == pytest.approx(1.0, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.5, max_value=4.0), st.floats(min_value=0.1, max_value=20.0))
def test_fit_recovers_exact_form(b, a):
    rho = np.linspace(1e-4, 40.0, 4001)
    ah, bh, rms = fit_samples(rho, a * rho * np.exp(-rho / b))
    assert bh == pytest.approx(b, rel=1e-7)
    assert ah == pytest.approx(a, rel=1e-7)
    assert rms < 1e-8 * a


def test_fit_profile_is_noise_tolerant():
    rng = np.random.default_rng(7)
    rho = np.linspace(1e-4, 30.0, 3001)
    u = 3.0 * rho * np.exp(-rho / 1.7) + rng.normal(0, 1e-4, rho.size)
    assert fit_samples(rho, u)[1] == pytest.approx(1.7, rel=1e-3)


def test_table_orbital_lookup():
    fit = table_orbital("pe", 0.2e-5)
    assert (fit.a, fit.b) == (12.8453, 1.72068)
    with pytest.raises(KeyError):
        table_orbital("pe", 1e-4)


def test_fit_rejects_excited_state():
    spec = AtomSpec("pe", model="coulomb3d")
    prob = build_atomic_problem(spec)
    excited = es.solve_state(prob, 1, -0.5, -0.1)
    with pytest.raises(FitDegenerate):
        fit_orbital(AtomSolution(spec, excited.epsilon, excited))


def test_spec_validation(caplog):
    with pytest.raises(ValueError):
        AtomSpec("xx")
    with pytest.raises(ValueError):
        AtomSpec("pe", convention="Q")
    with pytest.raises(ValueError):
        AtomSpec("pe", lam=-1.0)
    with caplog.at_level(logging.WARNING):
        AtomSpec("pe", lam=1e-2)
    assert "outside the studied range" in caplog.text
