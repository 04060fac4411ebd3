"""Effective molecular potential and the molecular ground state.

The nuclear radial equation is solved in the scaled coordinate ``rho`` with

    U(rho) = rep(R) + W(R) / m3 + centrifugal(rho),   R = rho / sqrt(zeta)

where ``rep`` is the nucleus-nucleus interaction of the model and ``W`` the
bonding or antibonding lepton curve from :mod:`planarbond.twocenter`. The
argument of ``W`` (``R = rho/sqrt(zeta)`` or ``R = rho``) and the units of
``eta`` are not fixed by the source and are selectable; :func:`calibrate`
scans them against one anchor cell.

Beyond the last tabulated separation the two-center integrals take their
far-field form (``Delta = E = 0`` and ``D`` from :func:`twocenter.far_direct`),
so a table covers ``[R_min, inf)``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline

from . import cache as table_cache
from . import eigensolver as es
from . import twocenter as tc
from .atomic import AtomSpec, OrbitalFit, orbital_from_b, solve_atom, table_orbital
from .constants import LAMBDA_ENDPOINTS, MOLECULES, PotentialModel, screening
from .specfun import k0

log = logging.getLogger(__name__)

PARITIES = ("plus", "minus")
MODES = ("paper", "self_consistent")
W_ARGUMENTS = ("scaled", "rho")
ETA_SOURCES = ("native", "halved", "doubled")
_ETA_FACTOR = {"native": 1.0, "halved": 0.5, "doubled": 2.0}

TABLE_R_MIN = 1e-8
TABLE_POINTS = 96
TAIL_DECAY_LENGTHS = 40.0
DEFAULT_POINTS = 20001
RHO_FLOOR = 1e-6
DECAY_CUT = 1e-10


class NoBoundState(es.EigenError):
    pass


class TableCoverageError(ValueError):
    pass


@dataclass(frozen=True)
class MoleculeSpec:
    """One molecular calculation.

    ``convention`` selects the atomic scaling used for ``eta`` (and, in the
    self-consistent mode, for the orbital). ``w_argument`` and ``eta_source``
    are the remaining open conventions.
    """

    label: str
    lam: float = 0.2e-3
    model: PotentialModel = PotentialModel.CS
    parity: str = "plus"
    ell: int = 0
    mode: str = "paper"
    convention: str = "D"
    w_argument: str = "scaled"
    eta_source: str = "native"
    Z1: int = 1
    Z2: int = 1
    n_points: int = DEFAULT_POINTS

    def __post_init__(self):
        if self.label not in MOLECULES:
            raise ValueError(f"unknown molecule {self.label!r}; choose from {', '.join(MOLECULES)}")
        object.__setattr__(self, "model", PotentialModel.parse(self.model))
        for name, allowed in (("parity", PARITIES), ("mode", MODES),
                              ("w_argument", W_ARGUMENTS), ("eta_source", ETA_SOURCES)):
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name} must be one of {', '.join(allowed)}")
        if self.Z1 != 1 or self.Z2 != 1:
            raise ValueError("only homonuclear Z1 = Z2 = 1 molecules are supported")
        if self.ell < 0:
            raise ValueError("ell must be non-negative")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.n_points < es.MIN_POINTS:
            raise ValueError(f"n_points must be at least {es.MIN_POINTS}")

    @property
    def zeta(self) -> float:
        return MOLECULES[self.label][0]

    @property
    def m3(self) -> float:
        return MOLECULES[self.label][1]

    @property
    def atom(self) -> str:
        return MOLECULES[self.label][2]

    @property
    def dimension(self) -> str:
        return es.SPATIAL if self.model is PotentialModel.COULOMB3D else es.PLANAR

    def to_R(self, rho):
        rho = np.asarray(rho, dtype=float)
        return rho / math.sqrt(self.zeta) if self.w_argument == "scaled" else rho


@dataclass
class MoleculeResult:
    spec: MoleculeSpec
    epsilon: float
    eta: float
    u: np.ndarray = field(repr=False)
    mean_rho: float = 0.0
    mean_rho_paper_literal: float = 0.0
    table_provenance: str = ""
    grid: es.RadialGrid | None = None
    potential: np.ndarray | None = field(default=None, repr=False)
    nodes: int = 0


# ---------------------------------------------------------------- ingredients

def atom_for(spec: MoleculeSpec) -> AtomSpec:
    """Constituent atom. Log and 3D atoms always carry the lepton mass in their
    attraction so that the orbital is an eigenstate of the two-center kernel."""
    conv = spec.convention if spec.model is PotentialModel.CS else "B"
    return AtomSpec(spec.atom, spec.lam, spec.model, conv)


_ATOM_MEMO: dict = {}


def atomic_reference(spec: MoleculeSpec):
    """``(eta, orbital)`` for the molecule's constituent atom.

    ``eta`` is the atomic energy in the chosen convention times the
    ``eta_source`` factor. The orbital comes from ``ORBITAL_TABLE`` in paper
    mode (CS only) and from the fitted atomic solution otherwise; the
    Coulomb-3D orbital is the exact 1s function with decay length ``1/m3``.
    """
    aspec = atom_for(spec)
    needs_fit = spec.model is PotentialModel.LOG or (
        spec.mode == "self_consistent" and spec.model is PotentialModel.CS)
    key = (aspec, needs_fit)
    if key not in _ATOM_MEMO:
        sol = solve_atom(aspec, fit=key[1])
        _ATOM_MEMO[key] = (sol.eta, sol.fit)
    eta, fit = _ATOM_MEMO[key]
    if spec.model is PotentialModel.COULOMB3D:
        fit = orbital_from_b(1.0 / spec.m3, es.SPATIAL)
    elif spec.mode == "paper" and spec.model is PotentialModel.CS:
        fit = table_orbital(spec.atom, spec.lam)
    return eta * _ETA_FACTOR[spec.eta_source], fit


def kernel_scale(model) -> float:
    """Factor putting D and E in the units of the atomic eigenvalue.

    The Coulomb-3D atom is solved as ``-u'' - 2u/rho`` (eigenvalue ``2E``),
    so its integrals over the ``-1/r`` kernel are doubled.
    """
    return 2.0 if PotentialModel.parse(model) is PotentialModel.COULOMB3D else 1.0


def repulsion(spec: MoleculeSpec, R):
    """Nucleus-nucleus term in the units of ``U``."""
    R = np.asarray(R, dtype=float)
    zz = spec.Z1 * spec.Z2
    if spec.model is PotentialModel.CS:
        return (zz / math.pi) * k0(screening(spec.lam) * R)
    if spec.model is PotentialModel.LOG:
        return -zz * np.log(R)
    return 2.0 * zz / R


def table_R_grid(fit: OrbitalFit) -> np.ndarray:
    return tc.log_grid(TABLE_R_MIN, TAIL_DECAY_LENGTHS * fit.b, TABLE_POINTS)


_INTEGRAL_MEMO: dict = {}


def two_center_table(spec: MoleculeSpec, eta: float, fit: OrbitalFit,
                     cache_dir=None) -> tuple[tc.TwoCenterTable, str]:
    """Table for ``spec`` and its cache key; disk cache first, then memo, then quadrature."""
    model = spec.model
    lam = spec.lam if model is PotentialModel.CS else 0.0
    scale = kernel_scale(model)
    R_grid = table_R_grid(fit)
    quad = tc.QuadratureSpec(tc.coords_for(fit))
    lines = table_cache.meta_lines(model, lam, spec.m3, eta, fit.b, fit.c, fit.dimension,
                                   R_grid, quad.target_rel_err)
    key = table_cache.key_for(lines)
    if cache_dir is not None:
        hit = table_cache.lookup(lines, cache_dir)
        if hit is not None:
            return hit, key
    memo_key = (model, lam, spec.m3, fit.b, fit.c, fit.dimension, quad)
    if memo_key not in _INTEGRAL_MEMO:
        base = tc.tabulate(model, lam, spec.m3, 0.0, fit, R_grid, quad)
        _INTEGRAL_MEMO[memo_key] = base
    base = _INTEGRAL_MEMO[memo_key]
    pts = []
    for p in base.points:
        # the base table has eta = 0, so its W columns are the pure LCAO parts
        pts.append(tc.TwoCenterPoint(p.R, p.Delta, scale * p.D, scale * p.E,
                                     eta + scale * p.w_plus, eta + scale * p.w_minus))
    table = tc.TwoCenterTable(model, lam, spec.m3, eta, fit.b, fit.c, fit.dimension, pts,
                              base.target_rel_err, base.max_quad_err)
    if cache_dir is not None:
        table_cache.store(table, cache_dir)
    return table, key


def _minus_valid(table):
    # W- is infinite only where the overlap gap rounds to zero
    return np.isfinite(table.column("w_minus"))


def valid_R_min(spec: MoleculeSpec, table: tc.TwoCenterTable) -> float:
    """Smallest separation where the spec's W curve is defined by the table."""
    if spec.parity == "plus":
        return float(table.R[0])
    ok = _minus_valid(table)
    if not ok.any():
        raise TableCoverageError("W- is undefined on the whole table")
    return float(table.R[ok][0])


def w_curve(spec: MoleculeSpec, table: tc.TwoCenterTable, R):
    """W(R) for the spec's parity: spline inside the table, far field beyond it."""
    R = np.atleast_1d(np.asarray(R, dtype=float))
    grid = table.R
    if np.any(R < grid[0] * (1 - 1e-12)):
        raise TableCoverageError(f"R={R.min():.3g} below table start {grid[0]:.3g}")
    out = np.empty_like(R)
    inside = R <= grid[-1]
    if np.any(inside):
        if spec.parity == "plus":
            spl = table.spline("plus")
        else:
            ok = _minus_valid(table)
            if R[inside].min() < grid[ok][0] * (1 - 1e-12):
                raise TableCoverageError("W- is undefined where the orbitals coincide "
                                         f"(R < {grid[ok][0]:.3g})")
            spl = CubicSpline(np.log(grid[ok]), table.column("w_minus")[ok])
        out[inside] = spl(np.log(np.maximum(R[inside], grid[0])))
    far = ~inside
    if np.any(far):
        d = tc.far_direct(table.fit, R[far], table.model, table.lam, table.m3)
        out[far] = table.eta + kernel_scale(table.model) * d
    return out


def regular_potential(spec: MoleculeSpec, table: tc.TwoCenterTable, rho):
    R = spec.to_R(rho)
    return repulsion(spec, R) + w_curve(spec, table, R) / spec.m3


def asymptote(spec: MoleculeSpec, eta: float) -> float:
    """Large-rho limit of the regular potential (repulsion and D cancel or vanish)."""
    return eta / spec.m3


def build_U(spec: MoleculeSpec, table: tc.TwoCenterTable, grid: es.RadialGrid) -> es.RadialProblem:
    return es.RadialProblem.from_function(grid, lambda r: regular_potential(spec, table, r),
                                          spec.ell, spec.dimension)


# ---------------------------------------------------------------- solving

def _rho_of_R(spec, R):
    return R * math.sqrt(spec.zeta) if spec.w_argument == "scaled" else R


def _well(spec, table, rho_lo, rho_hi):
    rho = np.geomspace(rho_lo, rho_hi, 4000)
    v = regular_potential(spec, table, rho)
    j = int(np.argmin(v))
    return rho[j], v


def _wkb_edge(spec, table, eps, rho_well, rho_far):
    """Where the WKB tail beyond the outer turning point has decayed by ``DECAY_CUT``."""
    rho = np.geomspace(rho_well, rho_far, 20000)
    U = regular_potential(spec, table, rho) + es.centrifugal(rho, spec.ell, spec.dimension)
    allowed = np.nonzero(U < eps)[0]
    start = allowed[-1] if allowed.size else 0
    kappa = np.sqrt(np.clip(U[start:] - eps, 0.0, None))
    phase = np.concatenate([[0.0], np.cumsum(0.5 * (kappa[1:] + kappa[:-1]) * np.diff(rho[start:]))])
    beyond = np.nonzero(phase >= -math.log(DECAY_CUT))[0]
    if beyond.size == 0:
        raise NoBoundState(f"{spec.label}: ground state does not decay inside rho < {rho_far:g}")
    return float(rho[start + beyond[0]])


def solve_molecule(spec: MoleculeSpec, cache_dir=None, table=None) -> MoleculeResult:
    """Ground state of the molecular radial problem on an automatic domain.

    The domain starts at ``max(1e-6, rho_well/50)``. A trial solve fixes the
    outer turning point, and the domain ends where the WKB decay of the
    trial state past that point reaches ``1e-10``. The problem is then solved
    again on that domain.
    """
    eta, fit = atomic_reference(spec)
    key = ""
    if table is None:
        table, key = two_center_table(spec, eta, fit, cache_dir)
    top = asymptote(spec, eta)
    rho_lo = max(RHO_FLOOR * 1e-2, _rho_of_R(spec, valid_R_min(spec, table)))
    rho_far = _rho_of_R(spec, table.R[-1] * 1e3)
    rho_well, v = _well(spec, table, rho_lo, rho_far)
    if not v.min() < top:
        raise NoBoundState(f"{spec.label} ({spec.model.value}, {spec.parity}): "
                           "no well below the asymptote")
    rho_min = max(RHO_FLOOR, rho_well / 50.0, rho_lo)
    rho_max = rho_well * 20.0
    for _ in range(8):
        grid = es.RadialGrid(rho_min, rho_max, spec.n_points)
        problem = build_U(spec, table, grid)
        regular = problem.potential - es.centrifugal(grid.points, spec.ell, spec.dimension)
        try:
            trial = es.solve_state(problem, 0, float(regular.min()), float(regular.max()))
            break
        except es.NoEigenvalueInBracket:
            rho_max *= 4.0
    else:
        raise NoBoundState(f"{spec.label}: no level found for rho < {rho_max:g}")
    if trial.epsilon >= top:
        raise NoBoundState(f"{spec.label} ({spec.model.value}, {spec.parity}): lowest level "
                           f"{trial.epsilon:.6g} is not below the asymptote {top:.6g}")
    edge = _wkb_edge(spec, table, trial.epsilon, rho_well, rho_far)
    grid = es.RadialGrid(rho_min, edge, spec.n_points)
    problem = build_U(spec, table, grid)
    regular = problem.potential - es.centrifugal(grid.points, spec.ell, spec.dimension)
    res = es.solve_state(problem, 0, float(regular.min()), float(regular.max()))
    if res.epsilon >= top:
        raise NoBoundState(f"{spec.label}: lowest level {res.epsilon:.6g} is not below "
                           f"the asymptote {top:.6g}")
    mean, literal = es.expectation_rho(res.u, grid)
    return MoleculeResult(spec, res.epsilon, eta, res.u, mean, literal, key, grid,
                          problem.potential, res.nodes)


def mean_distance(result: MoleculeResult) -> tuple[float, float]:
    return es.expectation_rho(result.u, result.grid)


def compare_models(label: str, lambda_list=LAMBDA_ENDPOINTS, base: MoleculeSpec | None = None,
                   cache_dir=None) -> list[dict]:
    """Table-3 style row for one molecule: CS at each lambda, then log and 3D.

    ``lambda`` is reported as NaN for the models that do not depend on it.
    """
    base = base or MoleculeSpec(label)
    rows = []
    jobs = [(PotentialModel.CS, lam) for lam in lambda_list]
    jobs += [(PotentialModel.LOG, None), (PotentialModel.COULOMB3D, None)]
    for model, lam in jobs:
        spec = replace(base, label=label, model=model, lam=lam or base.lam)
        res = solve_molecule(spec, cache_dir)
        rows.append({"label": label, "model": model.value,
                     "lambda": lam if lam is not None else math.nan,
                     "epsilon": res.epsilon, "mean_rho": res.mean_rho,
                     "mean_rho_paper_literal": res.mean_rho_paper_literal,
                     "result": res})
    return rows


# ---------------------------------------------------------------- calibration

@dataclass(frozen=True)
class Calibration:
    convention: str
    w_argument: str
    eta_source: str
    epsilon: float
    rel_dev: float


ANCHOR = ("ppe", 0.2e-3, 52.2987)


def calibrate(conventions=("A", "B", "C", "D"), anchor=ANCHOR, mode="paper",
              cache_dir=None) -> list[Calibration]:
    """Score every convention combination on the anchor cell, best first.

    Combinations without a bound state get ``rel_dev = inf``.
    """
    label, lam, target = anchor
    out = []
    for conv, warg, src in itertools.product(conventions, W_ARGUMENTS, ETA_SOURCES):
        spec = MoleculeSpec(label, lam, PotentialModel.CS, mode=mode, convention=conv,
                            w_argument=warg, eta_source=src)
        try:
            eps = solve_molecule(spec, cache_dir).epsilon
            dev = abs(eps / target - 1.0)
        except es.EigenError as exc:
            log.info("calibration %s/%s/%s: %s", conv, warg, src, exc)
            eps, dev = math.nan, math.inf
        out.append(Calibration(conv, warg, src, eps, dev))
    out.sort(key=lambda c: c.rel_dev)
    return out


def locked_spec(best: Calibration, label: str, lam: float, **kw) -> MoleculeSpec:
    return MoleculeSpec(label, lam, convention=best.convention, w_argument=best.w_argument,
                        eta_source=best.eta_source, **kw)
