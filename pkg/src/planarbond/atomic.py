"""Single-nucleus ground states and their fitted orbitals.

Scaling conventions for the Chern-Simons atom (``k = lambda/alpha``):

``A``  planar, ``U = -(1/pi) K0(k rho) - 1/(4 rho^2)``, eta = eps
``B``  planar, ``U = -(m3/pi) K0(k rho) - 1/(4 rho^2)``, eta = eps
``C``  planar, ``U = -(1/pi) K0(k rho / sqrt(zeta_atom)) - 1/(4 rho^2)``, eta = eps
``D``  radial form without centrifugal term, ``-u''/2 - (1/pi) K0(k rho) u = E u``,
       solved as ``U = -(2/pi) K0(k rho)`` with eta = E = eps/2

The logarithmic model uses the planar form with ``V = +ln rho``; the 3D Coulomb
model uses ``U = -2/rho`` with spatial centrifugal term and eta = eps. Under
convention ``B`` the lepton mass multiplies the attraction in these models too
(``-2 m3/rho`` and ``m3 ln rho``) and the grid shrinks with the orbital.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import eigensolver as es
from .constants import (ATOMS, LAMBDA_RANGE, ORBITAL_TABLE, PotentialModel,
                        lambda_key, reduced_mass, screening)
from .specfun import k0

log = logging.getLogger(__name__)

CONVENTIONS = ("A", "B", "C", "D")
DEFAULT_CONVENTION = "D"
ATOM_GRID = (1e-5, 40.0, 40001)


class NoBoundState(es.EigenError):
    pass


class FitDegenerate(ValueError):
    pass


@dataclass(frozen=True)
class AtomSpec:
    label: str
    lam: float = 0.2e-5
    model: PotentialModel = PotentialModel.CS
    convention: str = DEFAULT_CONVENTION
    Z: int = 1
    grid: tuple = ATOM_GRID

    def __post_init__(self):
        if self.label not in ATOMS:
            raise ValueError(f"unknown atom {self.label!r}; choose from {', '.join(ATOMS)}")
        object.__setattr__(self, "model", PotentialModel.parse(self.model))
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        lo, hi = LAMBDA_RANGE
        if self.model is PotentialModel.CS and not (lo * (1 - 1e-9) <= self.lam <= hi * (1 + 1e-9)):
            log.warning("lambda=%g outside the studied range [%g, %g]", self.lam, lo, hi)

    @property
    def m3(self) -> float:
        return ATOMS[self.label][1]

    @property
    def zeta_atom(self) -> float:
        nucleus, lepton = ATOMS[self.label]
        return reduced_mass(nucleus, lepton)

    @property
    def dimension(self) -> str:
        if self.model is PotentialModel.COULOMB3D:
            return es.SPATIAL
        if self.model is PotentialModel.CS and self.convention == "D":
            return es.SPATIAL
        return es.PLANAR

    @property
    def length_scale(self) -> float:
        if self.convention != "B":
            return 1.0
        if self.model is PotentialModel.COULOMB3D:
            return 1.0 / self.m3
        if self.model is PotentialModel.LOG:
            return 1.0 / math.sqrt(self.m3)
        return 1.0

    @property
    def energy_scale(self) -> float:
        """Factor taking the solver eigenvalue to eta."""
        if self.model is PotentialModel.CS and self.convention == "D":
            return 0.5
        return 1.0


@dataclass(frozen=True)
class OrbitalFit:
    """Orbital ``u = a r exp(-r/b)``; normalized ``psi = c r**(1/2) exp(-r/b)``
    (planar) or ``c exp(-r/b)`` (spatial), with ``c = A a``."""

    a: float
    b: float
    A: float
    c: float
    residual: float = 0.0
    dimension: str = es.PLANAR


@dataclass
class AtomSolution:
    spec: AtomSpec
    eta: float
    eigen: es.EigenResult = field(repr=False)
    fit: OrbitalFit | None = None


def atomic_potential(spec: AtomSpec, rho):
    """Regular part of the atomic potential (no centrifugal term)."""
    rho = np.asarray(rho, dtype=float)
    if spec.model is PotentialModel.COULOMB3D:
        charge = spec.Z * (spec.m3 if spec.convention == "B" else 1.0)
        return -2.0 * charge / rho
    if spec.model is PotentialModel.LOG:
        return spec.Z * (spec.m3 if spec.convention == "B" else 1.0) * np.log(rho)
    if spec.Z == 0:
        return np.zeros_like(rho)
    k = screening(spec.lam)
    conv = spec.convention
    if conv == "A":
        return -(spec.Z / np.pi) * k0(k * rho)
    if conv == "B":
        return -(spec.Z * spec.m3 / np.pi) * k0(k * rho)
    if conv == "C":
        return -(spec.Z / np.pi) * k0(k * rho / math.sqrt(spec.zeta_atom))
    return -(2.0 * spec.Z / np.pi) * k0(k * rho)


def build_atomic_problem(spec: AtomSpec) -> es.RadialProblem:
    lo, hi, n = spec.grid
    grid = es.RadialGrid(lo * spec.length_scale, hi * spec.length_scale, n)
    return es.RadialProblem.from_function(grid, lambda r: atomic_potential(spec, r),
                                          0, spec.dimension)


def solve_atom(spec: AtomSpec, fit: bool = True) -> AtomSolution:
    """Ground state of the atom; ``eta`` is reported in the convention's units."""
    problem = build_atomic_problem(spec)
    regular = problem.potential - es.centrifugal(problem.grid.points, 0, spec.dimension)
    lo = float(regular.min())
    hi = float(problem.potential[-1])
    if spec.model is not PotentialModel.LOG:
        # bound states lie below the outer edge of the well
        hi = float(regular[-1])
    if not hi > lo:
        raise NoBoundState(f"no well for atom {spec.label} ({spec.model.value})")
    try:
        res = es.solve_state(problem, 0, lo, hi)
    except es.NoEigenvalueInBracket as exc:
        raise NoBoundState(str(exc)) from exc
    sol = AtomSolution(spec, res.epsilon * spec.energy_scale, res)
    if fit:
        sol.fit = fit_orbital(sol)
    return sol


def _profiled(rho, u, b):
    f = rho * np.exp(-rho / b)
    ff = f @ f
    a = (f @ u) / ff
    r = u - a * f
    return a, r @ r


def fit_samples(rho, u, b_guess: float = 1.7) -> tuple[float, float, float]:
    """Least-squares fit of ``u ~ a rho exp(-rho/b)`` with uniform weights.

    ``a`` is eliminated in closed form; the profiled residual is minimized over
    ``b`` by golden section. Returns ``(a, b, rms)``.
    """
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    # bracket the minimum on a log-spaced scan
    trial = b_guess * np.logspace(-1.5, 1.5, 61)
    sse = np.array([_profiled(rho, u, b)[1] for b in trial])
    j = int(np.clip(np.argmin(sse), 1, len(trial) - 2))
    res = minimize_scalar(lambda b: _profiled(rho, u, b)[1], method="golden",
                          bracket=(trial[j - 1], trial[j], trial[j + 1]),
                          options={"xtol": 1e-13})
    b = float(res.x)
    a, sse_min = _profiled(rho, u, b)
    return float(a), b, math.sqrt(max(sse_min, 0.0) / len(u))


def normalize_orbital(a: float, b: float, dimension: str = es.PLANAR) -> tuple[float, float]:
    """Normalization constant ``A`` and normalized amplitude ``c = A a``."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if dimension == es.PLANAR:
        c = math.sqrt(2.0 / (math.pi * b**3))
    else:
        c = 1.0 / math.sqrt(math.pi * b**3)
    return c / a, c


def fit_orbital(solution: AtomSolution) -> OrbitalFit:
    eig = solution.eigen
    u = eig.u
    if np.count_nonzero(np.diff(np.sign(u[u != 0]))):
        raise FitDegenerate("orbital fit needs a nodeless ground state")
    rho = eig.grid.points
    a, b, rms = fit_samples(rho, u)
    dim = es.SPATIAL if solution.spec.model is PotentialModel.COULOMB3D else es.PLANAR
    A, c = normalize_orbital(a, b, dim)
    return OrbitalFit(a, b, A, c, rms, dim)


def table_orbital(label: str, lam: float) -> OrbitalFit:
    """Published orbital for ``label`` at a studied lambda endpoint."""
    key = (label, lambda_key(lam))
    if key not in ORBITAL_TABLE:
        raise KeyError(f"no tabulated orbital for {label} at lambda={lam:g}")
    a, b = ORBITAL_TABLE[key]
    A, c = normalize_orbital(a, b)
    return OrbitalFit(a, b, A, c, 0.0, es.PLANAR)


def orbital_from_b(b: float, dimension: str = es.PLANAR) -> OrbitalFit:
    A, c = normalize_orbital(1.0, b, dimension)
    return OrbitalFit(1.0, b, A, c, 0.0, dimension)


def eval_orbital(fit: OrbitalFit, r):
    """Normalized orbital value at distance ``r`` from its nucleus."""
    r = np.asarray(r, dtype=float)
    if fit.dimension == es.PLANAR:
        return fit.c * np.sqrt(r) * np.exp(-r / fit.b)
    return fit.c * np.exp(-r / fit.b)
