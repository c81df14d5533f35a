"""Orthogonal-polynomial data for the Gaussian weight with two jumps.

The weight is ``w(x) = exp(-x^2) * (1 on x<s1, omega1 on (s1,s2), omega2 on
x>s2)``.  The measure is discretized by composite Gauss-Legendre panels that
split exactly at the jump locations, and the three-term recurrence is
extracted by Lanczos tridiagonalization with full reorthogonalization on the
discretized inner product.  Moment-determinant routes are catastrophically
ill-conditioned and are used only as test oracles.

All Hankel-determinant quantities are stored in log space; completed tables
are immutable and freely shareable across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import LossOfPositivityError

__all__ = [
    "JumpWeightSpec",
    "QuadratureGrid",
    "RecurrenceTable",
    "build_quadrature",
    "compute_recurrence",
    "eval_monic_op",
    "eval_monic_pair",
    "hankel_dlog_cd",
    "hankel_dlog_subleading",
    "log_hankel_gue",
]

N_MAX_LIMIT = 500


@dataclass(frozen=True)
class JumpWeightSpec:
    """Jump locations and heights of the weight.

    Requires s1 < s2 and omega1, omega2 >= 0.  A single-jump weight is
    represented through :meth:`single_jump`.
    """

    s1: float
    s2: float
    omega1: float
    omega2: float

    def __post_init__(self):
        if not (self.s1 < self.s2):
            raise ValueError(f"need s1 < s2, got ({self.s1}, {self.s2}); "
                             "use JumpWeightSpec.single_jump for a single jump")
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("jump heights must be nonnegative")

    @classmethod
    def single_jump(cls, s: float, omega: float) -> "JumpWeightSpec":
        """Weight with a single jump of height omega at s.

        Encoded as equal heights at (s, s+1); the second breakpoint is
        inert because the weight does not change across it.
        """
        return cls(s1=s, s2=s + 1.0, omega1=omega, omega2=omega)

    def height(self, x: float) -> float:
        if x < self.s1:
            return 1.0
        if x < self.s2:
            return self.omega1
        return self.omega2

    def as_dict(self) -> dict:
        return {"s1": self.s1, "s2": self.s2,
                "omega1": self.omega1, "omega2": self.omega2}


@dataclass(frozen=True)
class QuadratureGrid:
    """Discretization of the weighted measure.

    ``weights`` include the full weight function; nodes whose weight
    underflows to zero are dropped.
    """

    spec: JumpWeightSpec
    nodes: np.ndarray
    weights: np.ndarray
    panel_edges: np.ndarray
    nodes_per_panel: int

    def moment(self, k: int) -> float:
        return float(self.weights @ self.nodes**k)


def _domain_halfwidth(spec: JumpWeightSpec, n_max: int) -> float:
    return max(abs(spec.s1), abs(spec.s2)) + max(9.0, math.sqrt(2.0 * n_max) + 6.0)


def build_quadrature(spec: JumpWeightSpec, n_max: int,
                     nodes_per_panel: int = 40) -> QuadratureGrid:
    """Composite Gauss-Legendre grid exact (to roundoff) for the moments
    of degree <= 2*n_max.

    Panels have width <= 1 and split exactly at s1 and s2, so a jump never
    lies inside a panel.  The truncation half-width grows like
    ``sqrt(2 n_max)`` so that the highest-degree integrand is resolved.
    """
    if not (1 <= n_max <= N_MAX_LIMIT):
        raise ValueError(f"n_max must be in [1, {N_MAX_LIMIT}], got {n_max}")
    L = _domain_halfwidth(spec, n_max)
    breakpoints = sorted({-L, spec.s1, spec.s2, L})
    gn, gw = leggauss(nodes_per_panel)
    xs, ws, edges = [], [], [breakpoints[0]]
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        panels = max(1, int(math.ceil(b - a)))
        sub = np.linspace(a, b, panels + 1)
        edges.extend(sub[1:])
        height = spec.height(0.5 * (a + b))
        if height == 0.0:
            continue
        for lo, hi in zip(sub[:-1], sub[1:]):
            x = 0.5 * (hi - lo) * gn + 0.5 * (lo + hi)
            with np.errstate(under="ignore"):
                w = 0.5 * (hi - lo) * gw * height * np.exp(-x * x)
            xs.append(x)
            ws.append(w)
    nodes = np.concatenate(xs)
    weights = np.concatenate(ws)
    keep = weights > 0.0
    nodes, weights = nodes[keep], weights[keep]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureGrid(spec=spec, nodes=nodes, weights=weights,
                          panel_edges=np.asarray(edges),
                          nodes_per_panel=nodes_per_panel)


@dataclass(frozen=True)
class RecurrenceTable:
    """Monic three-term recurrence data and log-space Hankel determinants.

    ``alpha[k]``   recurrence coefficient alpha_k, k = 0..n_max-1
    ``beta2[k]``   beta_k^2 for k >= 1; slot 0 holds the total mass m0
                   (Golub-Welsch convention), so squared norms factor as
                   h_k = prod(beta2[:k+1]).
    ``log_norm[k]``  ln h_k = -2 ln gamma_k
    ``log_hankel[k]`` ln D_{k+1} = sum_{j<=k} ln h_j
    """

    spec: JumpWeightSpec
    n_max: int
    alpha: np.ndarray
    beta2: np.ndarray
    log_norm: np.ndarray
    log_hankel: np.ndarray
    nodes_per_panel: int

    @property
    def gamma(self) -> np.ndarray:
        """Leading coefficients of the orthonormal polynomials (may underflow
        to 0 for degrees beyond ~450; log_gamma stays exact)."""
        with np.errstate(under="ignore"):
            return np.exp(-0.5 * self.log_norm)

    @property
    def log_gamma(self) -> np.ndarray:
        return -0.5 * self.log_norm

    def log_gamma2(self, n: int) -> float:
        """ln gamma_n^2."""
        return -float(self.log_norm[n])

    def rows(self):
        g = self.gamma
        for k in range(self.n_max):
            yield (k, float(self.alpha[k]), float(self.beta2[k]),
                   float(g[k]), float(self.log_hankel[k]))


def compute_recurrence(spec: JumpWeightSpec, n_max: int,
                       nodes_per_panel: int = 40,
                       grid: QuadratureGrid | None = None) -> RecurrenceTable:
    """Recurrence coefficients alpha_k, beta_k^2 and log Hankel determinants
    for k < n_max, via Lanczos with full reorthogonalization.

    Deterministic for fixed inputs.  Raises :class:`LossOfPositivityError`
    if the discretized moment functional degenerates numerically.
    """
    if not (1 <= n_max <= N_MAX_LIMIT):
        raise ValueError(f"n_max must be in [1, {N_MAX_LIMIT}], got {n_max}")
    if grid is None:
        grid = build_quadrature(spec, n_max, nodes_per_panel)
    x, w = grid.nodes, grid.weights
    if x.size < n_max + 1:
        raise LossOfPositivityError(
            f"discretized measure has only {x.size} support points, "
            f"cannot orthogonalize {n_max} degrees")
    m0 = float(w.sum())
    # Lanczos vectors carry sqrt(w) so the inner product is the plain dot
    # product and entries stay O(1) at every degree.
    sw = np.sqrt(w)
    alpha = np.empty(n_max)
    beta2 = np.empty(n_max)
    beta2[0] = m0
    basis = np.empty((n_max + 1, x.size))
    basis[0] = sw / math.sqrt(m0)
    phi_prev = np.zeros_like(x)
    phi = basis[0]
    b = 0.0
    for k in range(n_max):
        r = x * phi
        alpha[k] = phi @ r
        r = r - alpha[k] * phi - b * phi_prev
        Q = basis[:k + 1]
        for _ in range(2):  # twice is enough for full reorthogonalization
            r -= Q.T @ (Q @ r)
        b2 = float(r @ r)
        if b2 <= 1e-28:
            raise LossOfPositivityError(
                f"beta_{k + 1}^2 = {b2:.3e} <= 0 within roundoff; "
                "moment functional numerically degenerate")
        if k + 1 < n_max:
            beta2[k + 1] = b2
        b = math.sqrt(b2)
        phi_prev = phi
        phi = r / b
        basis[k + 1] = phi
    log_norm = np.log(beta2).cumsum()
    log_hankel = log_norm.cumsum()
    for arr in (alpha, beta2, log_norm, log_hankel):
        arr.setflags(write=False)
    return RecurrenceTable(spec=spec, n_max=n_max, alpha=alpha, beta2=beta2,
                           log_norm=log_norm, log_hankel=log_hankel,
                           nodes_per_panel=nodes_per_panel)


class ScaledPair(NamedTuple):
    """pi_n, pi_{n-1} and derivatives at a point, on a common log scale.

    True values are ``field * exp(log_scale)``; log_scale is 0 whenever the
    magnitudes fit comfortably in doubles.
    """

    pn: float
    pnm1: float
    dpn: float
    dpnm1: float
    log_scale: float


def eval_monic_pair(table: RecurrenceTable, n: int, x: float) -> ScaledPair:
    """Forward recurrence for (pi_n, pi_{n-1}, pi_n', pi_{n-1}') at x with
    overflow-safe rescaling."""
    if not (0 <= n <= table.n_max):
        raise ValueError(f"need 0 <= n <= n_max={table.n_max}, got {n}")
    pm, p = 0.0, 1.0
    dpm, dp = 0.0, 0.0
    log_scale = 0.0
    alpha = table.alpha
    beta2 = table.beta2
    for k in range(n):
        b2 = beta2[k] if k > 0 else 0.0
        pn = (x - alpha[k]) * p - b2 * pm
        dpn = p + (x - alpha[k]) * dp - b2 * dpm
        pm, p, dpm, dp = p, pn, dp, dpn
        m = abs(p)
        if m > 1e120:
            pm /= m
            p /= m
            dpm /= m
            dp /= m
            log_scale += math.log(m)
    return ScaledPair(pn=p, pnm1=pm, dpn=dp, dpnm1=dpm, log_scale=log_scale)


def eval_monic_op(table: RecurrenceTable, n: int, x: float) -> tuple[float, float]:
    """Value and derivative of the monic orthogonal polynomial pi_n at x.

    Overflows to +-inf for degrees/arguments where |pi_n| exceeds the double
    range; use :func:`eval_monic_pair` and its log scale in that regime.
    """
    r = eval_monic_pair(table, n, x)
    scale = math.exp(r.log_scale) if r.log_scale < 700 else math.inf
    return r.pn * scale, r.dpn * scale


def hankel_dlog_cd(table: RecurrenceTable, n: int) -> float:
    """(d/ds1 + d/ds2) ln D_n via the Christoffel-Darboux form.

    Equals ``sum_k coeff_k e^{-s_k^2} gamma_{n-1}^2 W_n(s_k)`` with
    ``W_n = pi_n' pi_{n-1} - pi_n pi_{n-1}'`` and coefficients
    (1 - omega1) at s1 and (omega1 - omega2) at s2.
    """
    if not (1 <= n <= table.n_max - 1):
        raise ValueError("hankel_dlog_cd needs 1 <= n <= n_max - 1 "
                         f"(got n={n}, n_max={table.n_max})")
    spec = table.spec
    lg2 = table.log_gamma2(n - 1)
    total = 0.0
    for s, coeff in ((spec.s1, 1.0 - spec.omega1),
                     (spec.s2, spec.omega1 - spec.omega2)):
        if coeff == 0.0:
            continue
        r = eval_monic_pair(table, n, s)
        wr = r.dpn * r.pnm1 - r.pn * r.dpnm1
        if wr == 0.0:
            continue
        log_mag = math.log(abs(wr)) + 2.0 * r.log_scale + lg2 - s * s
        total += coeff * math.copysign(math.exp(log_mag), wr)
    return total


def hankel_dlog_subleading(table: RecurrenceTable, n: int) -> float:
    """Same log-derivative via the subleading-coefficient identity,
    ``-2 sum_{j<n} alpha_j``."""
    if not (0 <= n <= table.n_max):
        raise ValueError(f"need n <= n_max={table.n_max}")
    return -2.0 * float(table.alpha[:n].sum())


def _hankel_dlog_sum(table: RecurrenceTable, n: int) -> float:
    """Third route: explicit sum over degrees j < n of
    coeff_k e^{-s_k^2} gamma_j^2 pi_j(s_k)^2 (test cross-check)."""
    spec = table.spec
    total = 0.0
    for s, coeff in ((spec.s1, 1.0 - spec.omega1),
                     (spec.s2, spec.omega1 - spec.omega2)):
        if coeff == 0.0:
            continue
        pm, p = 0.0, 1.0
        acc = 0.0
        for j in range(n):
            acc += math.exp(-float(table.log_norm[j]) - s * s) * p * p
            b2 = table.beta2[j] if j > 0 else 0.0
            pm, p = p, (s - table.alpha[j]) * p - b2 * pm
        total += coeff * acc
    return total


def log_hankel_gue(n: int) -> float:
    """ln D_n for the pure Gaussian weight exp(-x^2):
    (n/2) ln(2 pi) - (n^2/2) ln 2 + sum_{k<n} ln k!."""
    if n < 1:
        raise ValueError("n >= 1 required")
    return (0.5 * n * math.log(2.0 * math.pi) - 0.5 * n * n * math.log(2.0)
            + sum(math.lgamma(k + 1) for k in range(1, n)))
