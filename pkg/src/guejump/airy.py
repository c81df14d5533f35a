"""Airy function Ai and its derivative on the real line.

Self-contained evaluator used for boundary data of the edge limit system
and for the Airy-kernel Fredholm oracle.  Three regimes:

* ``|x| <= 9``  -- Maclaurin series accumulated in double-double arithmetic.
  The series suffers catastrophic cancellation (amplification up to
  ``exp(2*zeta)`` with ``zeta = (2/3)|x|^{3/2}``), which plain doubles cannot
  absorb past ``|x| ~ 4``; compensated products/sums keep the result at full
  double accuracy over the whole bracket.
* ``x > 9``   -- Poincare asymptotic expansion, truncated at the smallest term.
* ``x < -9``  -- oscillatory asymptotic form with phase ``(2/3)|x|^{3/2} + pi/4``.

Accuracy: relative error <= 1e-12 for |x| <= 12, absolute error <= 1e-15 for
x > 12 (values underflow toward zero), absolute error <= 1e-10 for x < -12.

Pure and stateless; safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["AiryValue", "airy_ai"]

_SERIES_CUT = 9.0

# Ai(0) = 3^(-2/3)/Gamma(2/3) and Ai'(0) = -3^(-1/3)/Gamma(1/3),
# stored as double-double (hi, lo) pairs.
_AI0 = (0.3550280538878172, 2.05233632436212e-17)
_AIP0 = (-0.2588194037928068, 2.522243111610832e-17)

_SPLITTER = 134217729.0  # 2**27 + 1


@dataclass(frozen=True)
class AiryValue:
    """Value of Ai and Ai' at a real point."""

    x: float
    ai: float
    aip: float


# ---------------------------------------------------------------------------
# double-double primitives (error-free transforms)

def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    ta = _SPLITTER * a
    ahi = ta - (ta - a)
    alo = a - ahi
    tb = _SPLITTER * b
    bhi = tb - (tb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _dd_add(x, y):
    s, e = _two_sum(x[0], y[0])
    e += x[1] + y[1]
    return _quick_two_sum(s, e)


def _dd_mul(x, y):
    p, e = _two_prod(x[0], y[0])
    e += x[0] * y[1] + x[1] * y[0]
    return _quick_two_sum(p, e)


def _dd_mul_d(x, c):
    p, e = _two_prod(x[0], c)
    e += x[1] * c
    return _quick_two_sum(p, e)


def _dd_div_d(x, c):
    q = x[0] / c
    p, pe = _two_prod(q, c)
    r = ((x[0] - p) - pe + x[1]) / c
    return _quick_two_sum(q, r)


# ---------------------------------------------------------------------------
# regime evaluators

def _series(x: float):
    """Maclaurin series for (Ai, Ai') in double-double arithmetic."""
    if x == 0.0:
        return _AI0[0] + _AI0[1], _AIP0[0] + _AIP0[1]
    x2 = _two_prod(x, x)
    x3 = _dd_mul_d(x2, x)
    t = (1.0, 0.0)      # f-series term,  t_{k+1} = t_k x^3 / ((3k+2)(3k+3))
    u = (x, 0.0)        # g-series term,  u_{k+1} = u_k x^3 / ((3k+3)(3k+4))
    f = t
    g = u
    fp = (0.0, 0.0)
    gp = _dd_div_d(u, x)        # k = 0 contribution of g' is u_0/x = 1
    for k in range(400):
        t = _dd_div_d(_dd_mul(t, x3), float((3 * k + 2) * (3 * k + 3)))
        u = _dd_div_d(_dd_mul(u, x3), float((3 * k + 3) * (3 * k + 4)))
        f = _dd_add(f, t)
        g = _dd_add(g, u)
        fp = _dd_add(fp, _dd_div_d(_dd_mul_d(t, float(3 * k + 3)), x))
        gp = _dd_add(gp, _dd_div_d(_dd_mul_d(u, float(3 * k + 4)), x))
        if abs(t[0]) < 1e-40 * (abs(f[0]) + 1.0) and abs(u[0]) < 1e-40 * (abs(g[0]) + 1.0):
            break
    ai = _dd_add(_dd_mul(_AI0, f), _dd_mul(_AIP0, g))
    aip = _dd_add(_dd_mul(_AI0, fp), _dd_mul(_AIP0, gp))
    return ai[0] + ai[1], aip[0] + aip[1]


def _asymptotic_coeffs(zeta: float, max_terms: int = 60):
    """Partial sums S_u = sum (-1)^k u_k / zeta^k and S_v likewise, truncated
    at the smallest term."""
    su = 1.0
    sv = 1.0
    uk = 1.0
    term_prev = 1.0
    sign = 1.0
    zk = 1.0
    for k in range(1, max_terms):
        uk *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
        vk = uk * (6 * k + 1) / (1 - 6 * k)
        zk *= zeta
        sign = -sign
        tu = uk / zk
        if tu >= term_prev or tu < 1e-18:
            break
        su += sign * tu
        sv += sign * vk / zk
        term_prev = tu
    return su, sv


def _asymptotic_pos(x: float):
    zeta = (2.0 / 3.0) * x ** 1.5
    su, sv = _asymptotic_coeffs(zeta)
    pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    ai = pref * su / x ** 0.25
    aip = -pref * sv * x ** 0.25
    return ai, aip


def _asymptotic_neg(x: float):
    z = -x
    zeta = (2.0 / 3.0) * z ** 1.5
    chi = zeta + 0.25 * math.pi
    # even/odd splits of the u- and v-coefficient series
    se_u = 1.0
    so_u = 0.0
    se_v = 1.0
    so_v = 0.0
    uk = 1.0
    zk = 1.0
    term_prev = math.inf
    for k in range(1, 60):
        uk *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
        vk = uk * (6 * k + 1) / (1 - 6 * k)
        zk *= zeta
        t = uk / zk
        if t >= term_prev or t < 1e-18:
            break
        term_prev = t
        sgn = -1.0 if (k // 2) % 2 else 1.0  # (-1)^floor(k/2)
        if k % 2 == 0:
            se_u += sgn * t
            se_v += sgn * vk / zk
        else:
            so_u += sgn * t
            so_v += sgn * vk / zk
    s, c = math.sin(chi), math.cos(chi)
    ai = (s * se_u - c * so_u) / (math.sqrt(math.pi) * z ** 0.25)
    aip = -(c * se_v + s * so_v) * z ** 0.25 / math.sqrt(math.pi)
    return ai, aip


def airy_ai(x: float) -> AiryValue:
    """Evaluate Ai(x) and Ai'(x) for finite real x."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"airy_ai requires finite x, got {x}")
    if abs(x) <= _SERIES_CUT:
        ai, aip = _series(x)
    elif x > 0:
        ai, aip = _asymptotic_pos(x)
    else:
        ai, aip = _asymptotic_neg(x)
    return AiryValue(x=x, ai=ai, aip=aip)
