"""Two-center LCAO integrals and the adiabatic curves W+/W-.

Integrals are taken in confocal elliptic coordinates with the nuclei at the
foci, ``xi = cosh t`` and ``nu = cos theta``. Then

    r_a = (R/2)(cosh t + cos theta),   r_b = (R/2)(cosh t - cos theta)

and the area element of the plane is ``2 r_a r_b dt dtheta`` (both half
planes), while the 3D prolate spheroidal volume element is
``2 pi (R/2) r_a r_b sinh t sin theta dt dtheta``. Neither carries the
``1/sqrt(xi^2 - 1)`` endpoint singularity of the (xi, nu) form, and both
vanish at the foci, which tames the orbital cusps and the logarithmic kernel.

Sign conventions: with the attraction kernel ``v(r)`` (negative for CS and
Coulomb),

    Delta = int phi_a phi_b,  D = int v(r_b) phi_a^2,  E = int v(r_b) phi_a phi_b

and ``W+- = eta + (D +- E) / (1 +- Delta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from . import eigensolver as es
from .atomic import OrbitalFit
from .constants import PotentialModel, screening
from .specfun import k0

ELLIPTIC_2D = "elliptic-2D"
PROLATE_3D = "prolate-spheroidal-3D"

DEFAULT_TARGET = 1e-8
_GL_ORDER = 12
_MAX_LEVEL = 4
_TAIL_LOG = 46.0  # exp(-46) ~ 1e-20


class QuadratureError(RuntimeError):
    pass


class TableRangeError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    coordinates: str = ELLIPTIC_2D
    target_rel_err: float = DEFAULT_TARGET
    level: int = 0
    gl_order: int = _GL_ORDER

    def __post_init__(self):
        if self.coordinates not in (ELLIPTIC_2D, PROLATE_3D):
            raise ValueError(f"unknown coordinates {self.coordinates!r}")
        if not 0 < self.target_rel_err <= 1e-7:
            raise ValueError("target_rel_err must lie in (0, 1e-7]")


def coords_for(fit: OrbitalFit) -> str:
    return ELLIPTIC_2D if fit.dimension == es.PLANAR else PROLATE_3D


@lru_cache(maxsize=8)
def _gauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_rule(breaks, order):
    x, w = _gauss(order)
    a = np.asarray(breaks[:-1])[:, None]
    b = np.asarray(breaks[1:])[:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _graded(lo, hi, first, n_uniform):
    """Breakpoints on [lo, hi]: geometric toward ``lo`` then uniform."""
    span = hi - lo
    pts = [lo]
    step = first
    while step < span / max(n_uniform, 1) and lo + 2 * step < hi:
        pts.append(lo + step)
        step *= 3.0
    start = pts[-1]
    pts.extend(np.linspace(start, hi, n_uniform + 1)[1:])
    return np.array(pts)


def _theta_breaks(level):
    n = 6 * 2**level
    left = _graded(0.0, 0.5 * math.pi, 1e-4 / 2**level, n)
    right = math.pi - left[::-1]
    return np.concatenate([left, right[1:]])


def _t_breaks(t_max, level):
    n = max(8, int(math.ceil(2.0 * t_max))) * 2**level
    return _graded(0.0, t_max, 1e-4 / 2**level, n)


def _t_max(b, R):
    xi_max = 1.0 + _TAIL_LOG * b / R
    return math.acosh(xi_max)


def _grid(b, R, coords, level, order):
    tn, tw = _panel_rule(_t_breaks(_t_max(b, R), level), order)
    qn, qw = _panel_rule(_theta_breaks(level), order)
    t = tn[:, None]
    th = qn[None, :]
    ch = np.cosh(t)
    ct = np.cos(th)
    ra = 0.5 * R * (ch + ct)
    rb = 0.5 * R * (ch - ct)
    if coords == ELLIPTIC_2D:
        jac = 2.0 * ra * rb
    else:
        jac = 2.0 * math.pi * 0.5 * R * ra * rb * np.sinh(t) * np.sin(th)
    w = tw[:, None] * qw[None, :] * jac
    return ra, rb, w


def _orbital(fit, r):
    if fit.dimension == es.PLANAR:
        return fit.c * np.sqrt(r) * np.exp(-r / fit.b)
    return fit.c * np.exp(-r / fit.b)


def kernel(model, lam: float, m3: float):
    """Attraction of the lepton to one unit nucleus as a function of distance."""
    model = PotentialModel.parse(model)
    if model is PotentialModel.CS:
        k = screening(lam)
        return lambda r: -(m3 / math.pi) * k0(k * r)
    if model is PotentialModel.LOG:
        return lambda r: m3 * np.log(r)
    return lambda r: -m3 / r


# instrumentation: number of quadrature evaluations performed
EVALUATIONS = {"count": 0}


def _raw(fit, R, kern, coords, level, order, swap=False):
    """``(Delta, D, E, gap, dminus)`` on one fixed rule.

    ``gap = 1 - Delta = (1/2) int (phi_a - phi_b)^2`` and
    ``dminus = D - E = int v(r_b) phi_a (phi_a - phi_b)`` are summed directly so
    that neither loses digits when the orbitals nearly coincide. ``swap``
    integrates with the roles of the two nuclei exchanged.
    """
    EVALUATIONS["count"] += 1
    ra, rb, w = _grid(fit.b, R, coords, level, order)
    if swap:
        ra, rb = rb, ra
    pa = _orbital(fit, ra)
    pb = _orbital(fit, rb)
    diff = pa - pb
    gap = 0.5 * float(np.sum(w * diff * diff))
    # each form is exact to rounding in its own half of (0, 1)
    delta = 1.0 - gap if gap < 0.5 else float(np.sum(w * pa * pb))
    if kern is None:
        return delta, 0.0, 0.0, gap, 0.0
    v = kern(rb)
    d = float(np.sum(w * v * pa * pa))
    e = float(np.sum(w * v * pa * pb))
    dminus = float(np.sum(w * v * pa * diff))
    return delta, d, e, gap, dminus


def _converged(fit, R, kern, quad, swap):
    prev = _raw(fit, R, kern, quad.coordinates, quad.level, quad.gl_order, swap)
    for level in range(quad.level + 1, quad.level + _MAX_LEVEL + 1):
        cur = _raw(fit, R, kern, quad.coordinates, level, quad.gl_order, swap)
        err = max(abs(c - p) / max(abs(c), 1e-300) for c, p in zip(cur, prev) if c or p)
        if err <= quad.target_rel_err:
            return cur, err
        prev = cur
    raise QuadratureError(f"quadrature at R={R:g} did not reach "
                          f"{quad.target_rel_err:g} (last change {err:.2e})")


def integrals(fit: OrbitalFit, R: float, model=PotentialModel.CS, lam: float = 0.2e-5,
              m3: float = 1.0, quad: QuadratureSpec | None = None, swap: bool = False,
              kernel_fn=None):
    """Return ``(Delta, D, E, err)`` converged to ``quad.target_rel_err``.

    Successive rules double the panels along both axes; ``err`` is the largest
    relative change over the three integrals at the accepted level.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    quad = quad or QuadratureSpec(coords_for(fit))
    kern = kernel_fn or kernel(model, lam, m3)
    vals, err = _converged(fit, R, kern, quad, swap)
    return vals[:3] + (err,)


def overlap(fit: OrbitalFit, R: float, coords: str | None = None, **kw) -> float:
    quad = kw.pop("quad", None) or QuadratureSpec(coords or coords_for(fit))
    return integrals(fit, R, quad=quad, kernel_fn=lambda r: np.zeros_like(r), **kw)[0]


def direct(fit: OrbitalFit, model, lam: float, m3: float, R: float, **kw) -> float:
    return integrals(fit, R, model, lam, m3, **kw)[1]


def exchange(fit: OrbitalFit, model, lam: float, m3: float, R: float, **kw) -> float:
    return integrals(fit, R, model, lam, m3, **kw)[2]


def w_pm(eta: float, D: float, E: float, Delta: float, gap: float | None = None,
         dminus: float | None = None) -> tuple[float, float]:
    """Bonding and antibonding curves; W- is +inf when Delta reaches 1.

    ``gap = 1 - Delta`` and ``dminus = D - E``, when given, replace the
    differences formed here.
    """
    w_plus = eta + (D + E) / (1.0 + Delta)
    denom = 1.0 - Delta if gap is None else gap
    num = D - E if dminus is None else dminus
    w_minus = eta + num / denom if denom > 0 else math.inf
    return w_plus, w_minus


def far_direct(fit: OrbitalFit, R, model, lam: float, m3: float):
    """Direct integral once the orbital density lies entirely inside ``r < R``.

    Log and Coulomb kernels are harmonic, so the density acts as a point
    charge. For K0 the ring average is ``K0(kR) I0(kr)``, giving the factor
    ``<I0(kr)>`` summed from the radial moments of the planar density,
    ``<r^n> = Gamma(n + 3)/2 (b/2)^n``.
    """
    model = PotentialModel.parse(model)
    value = kernel(model, lam, m3)(np.asarray(R, dtype=float))
    if model is not PotentialModel.CS:
        return value
    q = (0.5 * screening(lam) * 0.5 * fit.b) ** 2
    weight, term, j = 1.0, 1.0, 0
    while term > 1e-18 * weight and j < 200:
        j += 1
        # ratio of consecutive (k/2)^2j <r^2j> / (j!)^2 terms
        term *= q * (2 * j + 1) * (2 * j + 2) / (j * j)
        weight += term
    return value * weight


def coulomb3d_closed(b_scale: float, R: float) -> tuple[float, float, float]:
    """Closed-form 1s two-center integrals for decay length ``b_scale``.

    With ``x = R/b``: ``Delta = e^-x (1 + x + x^2/3)``,
    ``D = (-1/x + e^-2x (1 + 1/x)) / b`` and ``E = -e^-x (1 + x) / b``.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    x = R / b_scale
    delta = math.exp(-x) * (1.0 + x + x * x / 3.0)
    d = (-1.0 / x + math.exp(-2.0 * x) * (1.0 + 1.0 / x)) / b_scale
    e = -math.exp(-x) * (1.0 + x) / b_scale
    return delta, d, e


@dataclass(frozen=True)
class TwoCenterPoint:
    R: float
    Delta: float
    D: float
    E: float
    w_plus: float
    w_minus: float


@dataclass
class TwoCenterTable:
    model: PotentialModel
    lam: float
    m3: float
    eta: float
    b: float
    c: float
    dimension: str
    points: list = field(repr=False)
    target_rel_err: float = DEFAULT_TARGET
    max_quad_err: float = 0.0

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])

    @property
    def R(self) -> np.ndarray:
        return self.column("R")

    @property
    def fit(self) -> OrbitalFit:
        return OrbitalFit(1.0, self.b, self.c, self.c, 0.0, self.dimension)

    def spline(self, parity: str = "plus"):
        name = "w_plus" if parity == "plus" else "w_minus"
        key = ("_spline", name)
        cache = self.__dict__.setdefault("_splines", {})
        if key not in cache:
            cache[key] = CubicSpline(np.log(self.R), self.column(name))
        return cache[key]


def log_grid(r_lo: float, r_hi: float, n: int = 96) -> np.ndarray:
    return np.geomspace(r_lo, r_hi, n)


def tabulate(model, lam: float, m3: float, eta: float, fit: OrbitalFit, R_grid,
             quad: QuadratureSpec | None = None) -> TwoCenterTable:
    """Evaluate Delta, D, E and W+- at every separation in ``R_grid``.

    Each point uses its own fixed rule sequence, so the table does not depend
    on evaluation order.
    """
    model = PotentialModel.parse(model)
    R_grid = np.asarray(R_grid, dtype=float)
    if np.any(np.diff(R_grid) <= 0):
        raise ValueError("R grid must be strictly increasing")
    quad = quad or QuadratureSpec(coords_for(fit))
    pts = []
    worst = 0.0
    kern = kernel(model, lam, m3)
    for R in R_grid:
        try:
            (delta, d, e, gap, dminus), err = _converged(fit, float(R), kern, quad, False)
        except QuadratureError as exc:
            raise QuadratureError(f"tabulation failed at R={R:.6g}: {exc}") from exc
        worst = max(worst, err)
        wp, wm = w_pm(eta, d, e, delta, gap, dminus)
        pts.append(TwoCenterPoint(float(R), delta, d, e, wp, wm))
    return TwoCenterTable(model, lam, m3, eta, fit.b, fit.c, fit.dimension, pts,
                          quad.target_rel_err, worst)


def interp_w(table: TwoCenterTable, R, parity: str = "plus"):
    """Cubic interpolation of W in ``ln R``; exact at the nodes."""
    R_arr = np.asarray(R, dtype=float)
    grid = table.R
    lo, hi = grid[0], grid[-1]
    if np.any(R_arr < lo * (1 - 1e-12)) or np.any(R_arr > hi * (1 + 1e-12)):
        raise TableRangeError(f"R outside table range [{lo:g}, {hi:g}]")
    val = table.spline(parity)(np.log(np.clip(R_arr, lo, hi)))
    return float(val) if np.ndim(R) == 0 else val
