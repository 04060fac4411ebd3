"""Modified Bessel functions of the second kind, orders 0 and 1.

Two regimes, split at ``x = 2``:

* ``x <= 2``: ascending series, with the logarithmic term coupled to I0/I1.
* ``x > 2``: Steed's continued fraction (CF2) for the exponentially scaled
  pair ``e^x K0``, ``e^x K1``.

Both regimes reach full double precision on their side of the split, so the
functions are uniformly accurate to a few ulp over ``[1e-300, 745]``. Above the
decay range the result underflows to 0.
"""

from __future__ import annotations

import numpy as np

EULER_GAMMA = 0.57721566490153286061

SPLIT = 2.0
_SERIES_TERMS = 22  # (x^2/4)^k / (k!)^2 < 1e-19 for k >= 22 when x <= 2
_CF_EPS = 1e-16
_CF_MAXITER = 10_000
_UNDERFLOW = 745.0


class BesselDomainError(ValueError):
    """Raised for non-positive, NaN or infinite arguments."""


def _as_checked_array(x):
    arr = np.asarray(x, dtype=float)
    if arr.size and not (np.all(np.isfinite(arr)) and np.all(arr > 0)):
        raise BesselDomainError("K0/K1 require finite x > 0")
    return arr


def _series(x):
    """Return (K0, K1) from the ascending series, valid for 0 < x <= 2."""
    y = 0.25 * x * x
    lx = np.log(0.5 * x)
    # I0 and K0 series
    term = np.ones_like(x)
    harmonic = 0.0
    i0 = np.ones_like(x)
    k0_tail = np.zeros_like(x)
    # I1 and K1 series share the same powers of y
    i1_sum = np.ones_like(x)  # I1 = (x/2) * sum y^k / (k!(k+1)!)
    term1 = np.ones_like(x)
    psi_k1 = -EULER_GAMMA  # psi(k+1)
    psi_k2 = 1.0 - EULER_GAMMA  # psi(k+2)
    k1_sum = np.full_like(x, psi_k1 + psi_k2)
    for k in range(1, _SERIES_TERMS):
        term = term * y / (k * k)
        harmonic += 1.0 / k
        i0 = i0 + term
        k0_tail = k0_tail + harmonic * term
        term1 = term1 * y / (k * (k + 1))
        psi_k1 += 1.0 / k
        psi_k2 += 1.0 / (k + 1)
        i1_sum = i1_sum + term1
        k1_sum = k1_sum + (psi_k1 + psi_k2) * term1
    k0 = -(lx + EULER_GAMMA) * i0 + k0_tail
    i1 = 0.5 * x * i1_sum
    k1 = 1.0 / x + lx * i1 - 0.25 * x * k1_sum
    return k0, k1


def _steed_scaled(x):
    """Return (e^x K0, e^x K1) by Steed's CF2, valid for x > ~1.5."""
    a1 = 0.25
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    done = np.zeros(x.shape, dtype=bool)
    for i in range(2, _CF_MAXITER):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = np.where(done, h, h + delh)
        dels = q * delh
        s = np.where(done, s, s + dels)
        done |= np.abs(dels / s) < _CF_EPS
        if done.all():
            break
    else:  # pragma: no cover - CF2 converges in < 100 steps for x > 1
        raise RuntimeError("Steed continued fraction did not converge")
    h = a1 * h
    k0s = np.sqrt(np.pi / (2.0 * x)) / s
    k1s = k0s * (x + 0.5 - h) / x
    return k0s, k1s


def k0k1(x):
    """Evaluate K0 and K1 together.

    Parameters
    ----------
    x : float or array_like
        Positive finite argument(s).

    Returns
    -------
    (k0, k1) : tuple of float or ndarray
        Same shape as ``x``.
    """
    arr = _as_checked_array(x)
    flat = np.atleast_1d(arr).ravel()
    out0 = np.zeros_like(flat)
    out1 = np.zeros_like(flat)
    lo = flat <= SPLIT
    if lo.any():
        out0[lo], out1[lo] = _series(flat[lo])
    hi = (flat > SPLIT) & (flat < _UNDERFLOW)
    if hi.any():
        xs = flat[hi]
        k0s, k1s = _steed_scaled(xs)
        damp = np.exp(-xs)
        out0[hi] = k0s * damp
        out1[hi] = k1s * damp
    if arr.ndim == 0:
        return float(out0[0]), float(out1[0])
    return out0.reshape(arr.shape), out1.reshape(arr.shape)


def k0(x):
    """Modified Bessel function K0(x) for x > 0."""
    return k0k1(x)[0]


def k1(x):
    """Modified Bessel function K1(x) for x > 0."""
    return k0k1(x)[1]


def k0_small(x):
    """Leading small-argument form ``-ln(x/2) - gamma``."""
    return -np.log(0.5 * np.asarray(x, dtype=float)) - EULER_GAMMA
