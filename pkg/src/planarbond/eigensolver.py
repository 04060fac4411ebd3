"""Numerov shooting solver for ``u''(rho) + [eps - U(rho)] u(rho) = 0``.

The solver integrates outward from ``rho_min`` with a power-law seed, counts
interior sign changes, and locates eigenvalues by bisection on the node count.
By the Sturm oscillation theorem the number of sign changes on
``(rho_min, rho_max)`` equals the number of Dirichlet eigenvalues below ``eps``,
so the ``n``-th eigenvalue is the point where the count steps from ``n`` to
``n + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numba import njit

PLANAR = "planar"
SPATIAL = "spatial"
DIMENSIONS = (PLANAR, SPATIAL)

MIN_POINTS = 1000
COARSE_STEPS = 200
MAX_BISECTIONS = 200
REL_TOL = 1e-9
_RESCALE_AT = 1e150


class EigenError(RuntimeError):
    """Base class for solver failures."""


class NoEigenvalueInBracket(EigenError):
    pass


class NotConverged(EigenError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid on ``[rho_min, rho_max]`` with ``n`` points."""

    rho_min: float
    rho_max: float
    n: int

    def __post_init__(self):
        if not self.rho_min > 0:
            raise ValueError("rho_min must be positive")
        if not self.rho_max > self.rho_min:
            raise ValueError("rho_max must exceed rho_min")
        if self.n < MIN_POINTS:
            raise ValueError(f"grid needs at least {MIN_POINTS} points")

    @property
    def h(self) -> float:
        return (self.rho_max - self.rho_min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.rho_min, self.rho_max, self.n)


def centrifugal(rho, ell: int, dimension: str):
    """Centrifugal term: ``(l^2 - 1/4)/rho^2`` (planar) or ``l(l+1)/rho^2``."""
    rho = np.asarray(rho, dtype=float)
    if dimension == PLANAR:
        return (ell * ell - 0.25) / rho**2
    if dimension == SPATIAL:
        return ell * (ell + 1.0) / rho**2
    raise ValueError(f"unknown dimension {dimension!r}")


def seed_exponent(ell: int, dimension: str) -> float:
    return ell + 0.5 if dimension == PLANAR else ell + 1.0


@dataclass(frozen=True)
class RadialProblem:
    """Sampled effective potential (centrifugal term included) on a grid."""

    grid: RadialGrid
    potential: np.ndarray = field(repr=False)
    ell: int = 0
    dimension: str = PLANAR

    def __post_init__(self):
        pot = np.asarray(self.potential, dtype=float)
        object.__setattr__(self, "potential", pot)
        if pot.shape != (self.grid.n,):
            raise ValueError("potential samples must match grid size")
        if not np.all(np.isfinite(pot)):
            raise ValueError("potential must be finite on the grid")
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension {self.dimension!r}")
        if self.ell < 0:
            raise ValueError("ell must be non-negative")

    @classmethod
    def from_function(cls, grid, func, ell=0, dimension=PLANAR):
        """Build a problem from ``func(rho)`` plus the centrifugal term."""
        rho = grid.points
        pot = np.asarray(func(rho), dtype=float) + centrifugal(rho, ell, dimension)
        return cls(grid, pot, ell, dimension)


class Sweep(NamedTuple):
    u: np.ndarray
    nodes: int
    terminal: float
    rescaled: bool


@dataclass
class EigenResult:
    epsilon: float
    u: np.ndarray = field(repr=False)
    nodes: int
    converged: bool
    bracket_width: float
    grid: RadialGrid = field(repr=False, default=None)


@njit(cache=True)
def _numerov(g, alpha, beta, gamma, h, u0, u1, u2):
    # alpha/beta/gamma: three-point operator for u'' - (centrifugal) u;
    # g: remaining potential minus eps, weighted the Numerov way (1, 10, 1)
    n = g.shape[0]
    u = np.empty(n)
    u[0] = u0
    u[1] = u1
    u[2] = u2
    c = h * h / 12.0
    rescaled = False
    for i in range(2, n - 1):
        num = (10.0 * c * g[i] - beta[i]) * u[i] + (c * g[i - 1] - gamma[i]) * u[i - 1]
        u[i + 1] = num / (alpha[i] - c * g[i + 1])
        if abs(u[i + 1]) > _RESCALE_AT:
            for j in range(i + 2):
                u[j] /= _RESCALE_AT
            rescaled = True
    nodes = 0
    last = 0.0
    for i in range(n):
        if u[i] != 0.0:
            if last != 0.0 and (u[i] > 0.0) != (last > 0.0):
                nodes += 1
            last = u[i]
    return u, nodes, rescaled


def _centrifugal_operator(problem):
    """Three-point coefficients for ``u'' = (centrifugal) u``.

    Away from the origin these are the plain Numerov weights. On the first
    ``_EXACT_POINTS`` points they are instead solved so the stencil is exact
    for both power-law solutions of the centrifugal equation; plain Numerov
    would otherwise mix a fixed fraction of the irregular solution into ``u``
    no matter how fine the grid.
    """
    cached = _OPERATOR_CACHE.get((problem.grid, problem.ell, problem.dimension))
    if cached is not None:
        return cached
    grid = problem.grid
    rho = grid.points
    c = grid.h**2 / 12.0
    gc = centrifugal(rho, problem.ell, problem.dimension)
    alpha = np.ones(grid.n)
    beta = np.full(grid.n, -2.0)
    gamma = np.ones(grid.n)
    alpha[:-1] = 1.0 - c * gc[1:]
    beta[:] = -(2.0 + 10.0 * c * gc)
    gamma[1:] = 1.0 - c * gc[:-1]
    if np.any(gc != 0):
        p = seed_exponent(problem.ell, problem.dimension)
        if problem.dimension == PLANAR and problem.ell == 0:
            y2 = lambda r: np.sqrt(r) * np.log(r)
        else:
            q = 1.0 - p
            y2 = lambda r: r**q
        y1 = lambda r: r**p
        k = min(_EXACT_POINTS, grid.n - 1)
        i = np.arange(1, k)
        rm, r0, rp = rho[i - 1], rho[i], rho[i + 1]
        a = alpha[i]
        m11, m12, m21, m22 = y1(r0), y1(rm), y2(r0), y2(rm)
        det = m11 * m22 - m12 * m21
        rhs1, rhs2 = -a * y1(rp), -a * y2(rp)
        beta[i] = (rhs1 * m22 - m12 * rhs2) / det
        gamma[i] = (m11 * rhs2 - m21 * rhs1) / det
    out = (alpha, beta, gamma, gc)
    if len(_OPERATOR_CACHE) > 32:
        _OPERATOR_CACHE.clear()
    _OPERATOR_CACHE[(problem.grid, problem.ell, problem.dimension)] = out
    return out


_OPERATOR_CACHE: dict = {}
_EXACT_POINTS = 64


def _seed(rho, p, g):
    """Regular solution on the first three points.

    ``g`` (potential minus centrifugal minus eps) is modelled near the origin
    as ``a/rho + b ln(rho) + c`` from samples 1..3, which covers Coulomb-like
    and logarithmic cores; the seed is ``rho**p`` times the matching
    first-order Frobenius correction.
    """
    r = rho[1:4]
    basis = np.column_stack([1.0 / r, np.log(r), np.ones(3)])
    try:
        a, b, c = np.linalg.solve(basis, g[1:4])
    except np.linalg.LinAlgError:
        a = b = c = 0.0
    x = rho[:3]
    k1 = b / (4 * p + 2)
    corr = (1.0 + a / (2 * p) * x + c / (4 * p + 2) * x**2
            + k1 * x**2 * (np.log(x) - (2 * p + 3) / (4 * p + 2)))
    return x**p * corr


def numerov_sweep(problem: RadialProblem, epsilon: float) -> Sweep:
    """Integrate outward at trial eigenvalue ``epsilon``.

    Seeds follow the regular power law ``rho**p`` (``p = l + 1/2`` planar,
    ``l + 1`` spatial) with a local first-order correction, so the singular
    value of the potential at ``rho_min`` never enters a recurrence step.
    Nodes are sign changes over all samples, so a zero crossing at the
    terminal point registers as soon as it happens.
    """
    if not np.isfinite(epsilon):
        raise ValueError("epsilon must be finite")
    grid = problem.grid
    alpha, beta, gamma, gc = _centrifugal_operator(problem)
    g = problem.potential - gc - epsilon
    p = seed_exponent(problem.ell, problem.dimension)
    seeds = _seed(grid.points[:4], p, g)
    u, nodes, rescaled = _numerov(g, alpha, beta, gamma, grid.h, *seeds)
    return Sweep(u, int(nodes), float(u[-1]), bool(rescaled))


def _trim_tail(u, g):
    """Zero the exponentially growing tail that outward shooting leaves.

    Past the outermost classically allowed region, the last local minimum of
    ``|u|`` marks where the growing solution takes over.
    """
    a = np.abs(u)
    allowed = np.nonzero(g < 0)[0]
    if allowed.size == 0:
        return u
    start = allowed[-1]
    tail = a[start:]
    rising = np.nonzero(np.diff(tail) > 0)[0]
    if rising.size == 0:
        return u
    cut = start + rising[0]
    out = u.copy()
    out[cut:] = 0.0
    return out


def trapezoid(y, h):
    return h * (np.sum(y) - 0.5 * (y[0] + y[-1]))


def normalize(u, grid: RadialGrid) -> np.ndarray:
    """Scale ``u`` to unit trapezoidal norm with its first antinode positive."""
    u = np.asarray(u, dtype=float)
    peak = np.max(np.abs(u)) if u.size else 0.0
    if not peak > 0:
        raise ValueError("cannot normalize a zero function")
    # pre-scale so that squares of tiny prefixes cannot underflow the norm
    u = u / peak
    out = u / np.sqrt(trapezoid(u * u, grid.h))
    # first antinode: first local extremum of |u|, else the global one
    a = np.abs(out)
    d = np.diff(a)
    peaks = np.nonzero((d[:-1] > 0) & (d[1:] <= 0))[0]
    k = peaks[0] + 1 if peaks.size else int(np.argmax(a))
    if out[k] < 0:
        out = -out
    return out


def expectation_rho(u, grid: RadialGrid) -> tuple[float, float]:
    """Mean radius for a normalized radial function.

    Returns ``(mean_rho, paper_literal)``: the first is ``int u^2 rho`` over
    ``int u^2``; the second is ``int (u/sqrt(rho))^2 rho^2`` taken as written,
    which equals the first when ``u`` is unit-normalized.
    """
    rho = grid.points
    u = np.asarray(u, dtype=float)
    h = grid.h
    mean = trapezoid(u * u * rho, h) / trapezoid(u * u, h)
    psi = u / np.sqrt(rho)
    literal = trapezoid(psi * psi * rho * rho, h)
    return float(mean), float(literal)


def _count(problem, eps):
    return numerov_sweep(problem, eps).nodes


def bracket(problem: RadialProblem, node_target: int, eps_lo: float, eps_hi: float,
            steps: int = COARSE_STEPS) -> tuple[float, float]:
    """Coarse scan for a sub-interval where the node count crosses ``node_target``."""
    grid = np.linspace(eps_lo, eps_hi, steps + 1)
    prev_e = grid[0]
    prev_n = _count(problem, prev_e)
    if prev_n > node_target:
        raise NoEigenvalueInBracket(
            f"{prev_n} nodes already at eps_lo={eps_lo:g}; lower the bracket")
    for e in grid[1:]:
        n = _count(problem, e)
        if n > node_target:
            return prev_e, e
        prev_e = e
    raise NoEigenvalueInBracket(
        f"no eigenvalue with {node_target} nodes in [{eps_lo:g}, {eps_hi:g}]")


def solve_state(problem: RadialProblem, node_target: int, eps_lo: float, eps_hi: float,
                rel_tol: float = REL_TOL, steps: int = COARSE_STEPS) -> EigenResult:
    """Find the eigenvalue whose eigenfunction has ``node_target`` interior nodes."""
    lo, hi = bracket(problem, node_target, eps_lo, eps_hi, steps)
    for _ in range(MAX_BISECTIONS):
        width = hi - lo
        if width <= rel_tol * max(1.0, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _count(problem, mid) > node_target:
            hi = mid
        else:
            lo = mid
    else:
        raise NotConverged(f"bracket width {hi - lo:g} after {MAX_BISECTIONS} bisections")
    eps = 0.5 * (lo + hi)
    sweep = numerov_sweep(problem, lo)
    u = _trim_tail(sweep.u, problem.potential - eps)
    try:
        u = normalize(u, problem.grid)
    except ValueError as exc:
        raise NotConverged(f"degenerate eigenfunction at eps={eps:g}: {exc}") from None
    nodes = int(np.count_nonzero(np.diff(np.sign(u[u != 0])) != 0))
    return EigenResult(eps, u, nodes, nodes == node_target, hi - lo, problem.grid)
