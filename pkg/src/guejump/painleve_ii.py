"""Coupled Painlevé II system with Airy-tail boundary data, and the edge
limit laws built from it.

The Hamiltonian system in (v_k, w_k),

    v1' = 2 v1 w1,   w1' = 2(v1 + v2 + x/2)     - w1^2,
    v2' = 2 v2 w2,   w2' = 2(v1 + v2 + (x+s)/2) - w2^2,

with H(v1,v2,w1,w2;x;s) = -(v1+v2)^2 - (v1+v2) x + v1 w1^2 + v2 w2^2 - s v2
and dH/dx = -(v1+v2), is integrated backward from x_max with boundary data

    v1 ~ (1 - omega1)      Ai(x)^2,
    v2 ~ (omega1 - omega2) Ai(x+s)^2,     x -> +infinity.

Integration is carried out in real amplitude variables u_k with
v_k = sigma_k u_k^2 (sigma_k the sign of the tail coefficient):

    u1'' = x u1 + 2 (sigma1 u1^2 + sigma2 u2^2) u1,
    u2'' = (x+s) u2 + 2 (sigma1 u1^2 + sigma2 u2^2) u2.

The (v, w) chart degenerates wherever a channel touches zero (w_k has a
simple pole there even though the solution is regular); the amplitude chart
stays smooth through those points, which occur inside the domain needed by
the gap law.  Signs of v_k are preserved structurally; an actual pole of the
system shows up as amplitude blow-up and is signalled.

Quadratures for the tail exponents are integrated alongside the state, so
their accuracy is tied to the solver tolerance, and both exponent routes
(weighted v-integral and Hamiltonian integral) carry analytic Airy-tail
closures beyond x_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .airy import airy_ai
from .errors import PoleOrSignChangeError, RouteDisagreementError

__all__ = [
    "CPIIParams",
    "CPIITrajectory",
    "DistributionCurve",
    "OrthopolyPredictions",
    "solve_cpii",
    "solve_as_pii",
    "hamiltonian_ii",
    "tw_exponent",
    "gap_probability_limit",
    "conditional_distribution_limit",
    "tracy_widom_cdf",
    "hankel_ratio_prediction",
    "orthopoly_predictions",
    "edge_coordinate",
]

_X_MIN_FLOOR = -10.0
_X_MIN_NEAR_CRITICAL = -8.0
_AMPLITUDE_BLOWUP = 1e8
_TOL_RANGE = (1e-13, 1e-8)


def edge_coordinate(n: int, t: float) -> float:
    """Jump location s = sqrt(2n) + t / (sqrt(2) n^(1/6)) for the edge
    scaling coordinate t."""
    return math.sqrt(2.0 * n) + t / (math.sqrt(2.0) * n ** (1.0 / 6.0))


@dataclass(frozen=True)
class CPIIParams:
    """Parameters of the limit system.

    Channel tail coefficients are c1 = 1 - omega1 (unshifted argument) and
    c2 = omega1 - omega2 (argument shifted by s).  s > 0 is required when
    both channels are active.
    """

    omega1: float
    omega2: float
    s: float

    def __post_init__(self):
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("omega1, omega2 must be nonnegative")
        if self.s < 0:
            raise ValueError("s must be nonnegative")
        if self.c1 != 0.0 and self.c2 != 0.0 and self.s <= 0.0:
            raise ValueError("coupled mode (omega1 != 1 and omega1 != omega2) "
                             "requires s > 0")

    @property
    def c1(self) -> float:
        return 1.0 - self.omega1

    @property
    def c2(self) -> float:
        return self.omega1 - self.omega2


def hamiltonian_ii(v1: float, v2: float, w1: float, w2: float,
                   x: float, s: float) -> float:
    """Hamiltonian -(v1+v2)^2 - (v1+v2) x + v1 w1^2 + v2 w2^2 - s v2."""
    vs = v1 + v2
    return -vs * vs - vs * x + v1 * w1 * w1 + v2 * w2 * w2 - s * v2


def _ai_sq_tail(z: float) -> float:
    """int_z^inf Ai(t)^2 dt = Ai'(z)^2 - z Ai(z)^2."""
    v = airy_ai(z)
    return v.aip * v.aip - z * v.ai * v.ai


def _ai_sq_first_moment_tail(z: float) -> float:
    """int_z^inf (t - z) Ai(t)^2 dt = (2 z^2 Ai^2 - 2 z Ai'^2 - Ai Ai')/3."""
    v = airy_ai(z)
    return (2.0 * z * z * v.ai * v.ai - 2.0 * z * v.aip * v.aip
            - v.ai * v.aip) / 3.0


@dataclass(frozen=True)
class CPIITrajectory:
    """Solved trajectory on a descending grid, plus a dense interpolant.

    Channel values satisfy v1 = sigma1 u1^2 and v2 = sigma2 u2^2; w_k is
    u_k'/u_k (NaN on identically-zero channels, +-inf at isolated zeros).
    """

    params: CPIIParams
    x_max: float
    x_min: float
    tol: float
    x_grid: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    h: np.ndarray
    sigma1: float
    sigma2: float
    u1: np.ndarray
    u2: np.ndarray
    _dense: object = field(repr=False)
    _h_at_xmax: float = field(repr=False)

    def amplitudes(self, x: float) -> tuple[float, float, float, float]:
        """(u1, u1', u2, u2') at x from the dense solution."""
        y = self._dense(x)
        return float(y[0]), float(y[1]), float(y[2]), float(y[3])

    def state(self, x: float) -> tuple[float, float, float, float, float]:
        """(v1, v2, w1, w2, H) at x."""
        u1, du1, u2, du2 = self.amplitudes(x)
        v1 = self.sigma1 * u1 * u1
        v2 = self.sigma2 * u2 * u2
        with np.errstate(divide="ignore", invalid="ignore"):
            w1 = du1 / u1 if u1 != 0 else math.nan
            w2 = du2 / u2 if u2 != 0 else math.nan
        hh = self._h_amplitude(x, u1, du1, u2, du2)
        return v1, v2, w1, w2, hh

    def _h_amplitude(self, x, u1, du1, u2, du2) -> float:
        v1 = self.sigma1 * u1 * u1
        v2 = self.sigma2 * u2 * u2
        vs = v1 + v2
        return (-vs * vs - vs * x + self.sigma1 * du1 * du1
                + self.sigma2 * du2 * du2 - self.params.s * v2)

    def quadratures(self, x: float) -> tuple[float, float, float]:
        """(Ja, Jb, Jh)(x): integrals of (v1+v2), tau (v1+v2) and H from x
        up to x_max, co-integrated with the state."""
        y = self._dense(x)
        return float(y[4]), float(y[5]), float(y[6])

    def hamiltonian_drift(self) -> float:
        """max over the grid of |H(x) - (H(x_max) + Ja(x))|; the energy-drift
        measure of integration quality."""
        ja = np.array([self.quadratures(x)[0] for x in self.x_grid])
        return float(np.max(np.abs(self.h - (self._h_at_xmax + ja))))

    @property
    def q(self) -> np.ndarray:
        """Single-channel solution values q(x) = u1(x); meaningful when the
        shifted channel is inactive."""
        return self.u1

    def rows(self):
        for i, x in enumerate(self.x_grid):
            yield (float(x), float(self.v1[i]), float(self.v2[i]),
                   float(self.w1[i]), float(self.w2[i]), float(self.h[i]))


def _near_critical(c: float) -> bool:
    return c != 0.0 and abs(abs(c) - 1.0) <= 1e-3 and abs(c) != 1.0


def solve_cpii(params: CPIIParams, x_min: float, x_max: float = 12.0,
               tol: float = 1e-11, grid_step: float = 0.02) -> CPIITrajectory:
    """Integrate the coupled system backward from Airy tail data at x_max.

    Preconditions: x_max >= 8, x_min >= -10, tol in [1e-13, 1e-8]; for tail
    coefficients within 1e-3 of (but not at) the critical magnitude 1, the
    backward instability of the critical solution limits x_min to -8.

    Raises :class:`PoleOrSignChangeError` if an amplitude blows up (the
    solution left the pole-free regime).
    """
    if x_max < 8.0:
        raise ValueError("x_max >= 8 required for Airy-tail initialization")
    if x_min < _X_MIN_FLOOR:
        raise ValueError(f"x_min >= {_X_MIN_FLOOR} required")
    if x_min >= x_max:
        raise ValueError("x_min < x_max required")
    if not (_TOL_RANGE[0] <= tol <= _TOL_RANGE[1]):
        raise ValueError(f"tol must lie in {_TOL_RANGE}")
    c1, c2 = params.c1, params.c2
    if (x_min < _X_MIN_NEAR_CRITICAL) and (_near_critical(c1) or _near_critical(c2)):
        raise ValueError(
            "tail coefficient within 1e-3 of the critical magnitude 1: "
            f"backward integration is limited to x_min >= {_X_MIN_NEAR_CRITICAL}")
    sig1 = float(np.sign(c1))
    sig2 = float(np.sign(c2))
    s = params.s
    a1 = airy_ai(x_max)
    a2 = airy_ai(x_max + s)
    r1 = math.sqrt(abs(c1))
    r2 = math.sqrt(abs(c2))
    y0 = np.array([r1 * a1.ai, r1 * a1.aip, r2 * a2.ai, r2 * a2.aip,
                   0.0, 0.0, 0.0])

    def h_of(x, y):
        v1 = sig1 * y[0] * y[0]
        v2 = sig2 * y[2] * y[2]
        vs = v1 + v2
        return (-vs * vs - vs * x + sig1 * y[1] * y[1]
                + sig2 * y[3] * y[3] - s * v2)

    def rhs(x, y):
        u1, du1, u2, du2 = y[:4]
        q = sig1 * u1 * u1 + sig2 * u2 * u2
        return [du1, x * u1 + 2.0 * q * u1,
                du2, (x + s) * u2 + 2.0 * q * u2,
                -q, -x * q, -h_of(x, y)]

    def blowup(x, y):
        return max(abs(y[0]), abs(y[2])) - _AMPLITUDE_BLOWUP
    blowup.terminal = True

    grid = np.concatenate([np.arange(x_max, x_min, -grid_step), [x_min]])
    atol = np.array([1e-30, 1e-30, 1e-30, 1e-30, 1e-14, 1e-14, 1e-14])
    sol = solve_ivp(rhs, (x_max, x_min), y0, method="DOP853",
                    rtol=tol, atol=atol, dense_output=True, events=[blowup])
    if sol.status == 1:
        raise PoleOrSignChangeError(
            f"amplitude blow-up near x = {sol.t[-1]:.4f}: the solution left "
            "the pole-free regime (parameters supercritical or x_min too low)")
    if not sol.success:
        raise PoleOrSignChangeError(f"integration failed: {sol.message}")

    ys = sol.sol(grid)
    u1g, du1g, u2g, du2g = ys[0], ys[1], ys[2], ys[3]
    v1 = sig1 * u1g * u1g
    v2 = sig2 * u2g * u2g
    with np.errstate(divide="ignore", invalid="ignore"):
        w1 = du1g / u1g
        w2 = du2g / u2g
    vs = v1 + v2
    h = (-vs * vs - vs * grid + sig1 * du1g * du1g + sig2 * du2g * du2g
         - s * v2)
    for arr in (grid, v1, v2, w1, w2, h, u1g, u2g):
        arr.setflags(write=False)
    return CPIITrajectory(params=params, x_max=x_max, x_min=x_min, tol=tol,
                          x_grid=grid, v1=v1, v2=v2, w1=w1, w2=w2, h=h,
                          sigma1=sig1, sigma2=sig2, u1=u1g, u2=u2g,
                          _dense=sol.sol, _h_at_xmax=h_of(x_max, y0))


def solve_as_pii(omega: float, x_min: float, x_max: float = 12.0,
                 tol: float = 1e-11) -> CPIITrajectory:
    """Single-channel solution q'' = 2 q^3 + x q with tail
    sqrt(1 - omega) Ai(x):  omega = 0 gives the critical (Hastings-McLeod)
    solution underlying the Tracy-Widom law, omega = 1 gives q == 0.

    Realized as the limit system with the shifted channel switched off
    (omega2 = omega1 = omega), so all trajectory machinery applies with
    q = u1.
    """
    if not (0.0 <= omega <= 1.0):
        raise ValueError("omega in [0, 1] required")
    if x_min < _X_MIN_FLOOR:
        raise ValueError(f"x_min >= {_X_MIN_FLOOR} required")
    params = CPIIParams(omega1=omega, omega2=omega, s=0.0)
    return solve_cpii(params, x_min=x_min, x_max=x_max, tol=tol)


def _exponent_routes(traj: CPIITrajectory, t1: float) -> tuple[float, float]:
    p = traj.params
    x_max = traj.x_max
    ja, jb, jh = traj.quadratures(t1)
    tail_v = 0.0
    tail_h = 0.0
    for c, shift in ((p.c1, 0.0), (p.c2, p.s)):
        if c == 0.0:
            continue
        z = x_max + shift
        tail_v += c * (_ai_sq_first_moment_tail(z) + (x_max - t1) * _ai_sq_tail(z))
        tail_h += c * _ai_sq_first_moment_tail(z)
    route_v = jb - t1 * ja + tail_v
    route_h = jh + tail_h
    return route_v, route_h


def tw_exponent(traj: CPIITrajectory, t1: float) -> float:
    """Tail exponent E(t1) = int_{t1}^inf (tau - t1)(v1 + v2) dtau.

    Evaluated both as the weighted v-integral and, via integration by parts,
    as int_{t1}^inf H dtau; the two routes must agree to 1e-6 (they normally
    agree to ~10 * tol) and the H-route value is returned.
    """
    if t1 < traj.x_min - 1e-12:
        raise ValueError(f"t1 = {t1} below trajectory x_min = {traj.x_min}")
    if abs(traj._h_at_xmax) > 1e-14:
        raise ValueError("trajectory tail does not reach the H < 1e-14 regime; "
                         "increase x_max")
    route_v, route_h = _exponent_routes(traj, t1)
    if abs(route_v - route_h) > 1e-6:
        raise RouteDisagreementError(
            f"exponent routes disagree: v-route {route_v!r} vs H-route "
            f"{route_h!r}")
    return route_h


def gap_probability_limit(t1: float, t2: float, tol: float = 1e-11) -> float:
    """Limiting probability of no eigenvalue in the edge window (t1, t2).

    Solves the limit system with (omega1, omega2) = (0, 1), s = t2 - t1 and
    returns exp(-E(t1)).  t2 == t1 degenerates to probability 1.
    """
    if t2 < t1:
        raise ValueError("t1 <= t2 required")
    if t2 == t1:
        return 1.0
    traj = solve_cpii(CPIIParams(omega1=0.0, omega2=1.0, s=t2 - t1),
                      x_min=t1, tol=tol)
    value = math.exp(-tw_exponent(traj, t1))
    if not (0.0 < value <= 1.0 + 1e-9):
        raise RouteDisagreementError(f"gap probability {value} outside (0, 1]")
    return min(value, 1.0)


def conditional_distribution_limit(t1: float, t2: float, p: float,
                                   tol: float = 1e-11) -> float:
    """Limiting conditional distribution of the extreme eigenvalue under
    thinning: exp(-int (tau - t1)(u1^2 + u2^2 - q(tau; p)^2) dtau) with
    system parameters (omega1, omega2) = (p, 0), s = t2 - t1, and q(.; p)
    the tail-sqrt(1-p) single-channel solution.
    """
    if not (0.0 < p < 1.0):
        raise ValueError("p in (0, 1) required")
    if t2 <= t1:
        raise ValueError("t1 < t2 required")
    coupled = solve_cpii(CPIIParams(omega1=p, omega2=0.0, s=t2 - t1),
                         x_min=t1, tol=tol)
    single = solve_as_pii(p, x_min=t1, tol=tol)
    e_coupled = tw_exponent(coupled, t1)
    e_single = tw_exponent(single, t1)
    value = math.exp(e_single - e_coupled)
    if not (0.0 < value <= 1.0 + 1e-9):
        raise RouteDisagreementError(
            f"conditional probability {value} outside (0, 1]")
    return min(value, 1.0)


@dataclass(frozen=True)
class DistributionCurve:
    """A distribution evaluated on a grid, tagged with its provenance."""

    t: np.ndarray
    value: np.ndarray
    method: str
    params: dict

    def rows(self):
        for ti, vi in zip(self.t, self.value):
            yield (float(ti), float(vi), self.method)


def tracy_widom_cdf(ts: Sequence[float], tol: float = 1e-11) -> DistributionCurve:
    """Tracy-Widom distribution F2 on a grid, from the critical
    single-channel solution."""
    ts = np.asarray(sorted(float(t) for t in ts))
    traj = solve_as_pii(0.0, x_min=float(ts[0]), tol=tol)
    vals = np.array([math.exp(-tw_exponent(traj, float(t))) for t in ts])
    return DistributionCurve(t=ts, value=vals, method="painleve-ii",
                             params={"omega": 0.0, "tol": tol})


@dataclass(frozen=True)
class HankelRatioPrediction:
    n: int
    log_ratio: float            # predicted ln(D_n / D_n^GUE) = -E(t1)
    log_hankel_gue: float


def hankel_ratio_prediction(n: int, t1: float, t2: float, omega1: float,
                            omega2: float, tol: float = 1e-11) -> HankelRatioPrediction:
    """Large-n prediction ln(D_n / D_n^GUE) = -E(t1) for jumps placed at the
    edge coordinates t1 < t2, paired with the exact Gaussian-weight value."""
    from .op_engine import log_hankel_gue
    if n < 16:
        raise ValueError("n >= 16 required for the edge regime")
    if t2 <= t1:
        raise ValueError("t1 < t2 required")
    if omega1 == 1.0 and omega1 == omega2:
        return HankelRatioPrediction(n=n, log_ratio=0.0,
                                     log_hankel_gue=log_hankel_gue(n))
    traj = solve_cpii(CPIIParams(omega1=omega1, omega2=omega2, s=t2 - t1),
                      x_min=t1, tol=tol)
    return HankelRatioPrediction(n=n, log_ratio=-tw_exponent(traj, t1),
                                 log_hankel_gue=log_hankel_gue(n))


@dataclass(frozen=True)
class OrthopolyPredictions:
    """Leading-order predictions for recurrence data at edge-scaled jumps.

    Polynomial values at the jumps are reported as log magnitudes: sign
    choices of the amplitudes are not individually determined, only the
    combination with the channel prefactor is real.
    """

    n: int
    alpha: float
    beta: float
    log_gamma_leading: float
    gamma_correction: float     # 1 + H/(2 n^(1/3)) multiplying the leading term
    log_abs_pn_s1: float
    log_abs_pn_s2: float
    v_sum: float
    h_ii: float


def orthopoly_predictions(n: int, t1: float, t2: float, omega1: float,
                          omega2: float,
                          traj: CPIITrajectory | None = None,
                          tol: float = 1e-11) -> OrthopolyPredictions:
    """Predictions from the limit system evaluated at t1:

    alpha_n   ~ -(v1+v2) / (sqrt(2) n^(1/6))
    beta_n    ~ sqrt(n/2) - (v1+v2) / (2^(3/2) n^(1/6))
    gamma_(n-1) ~ 2^(n/2-3/4) n^(1/4-n/2) e^(n/2) / sqrt(pi)
                  * (1 + H/(2 n^(1/3)))
    |pi_n(s_k)| ~ (2 pi/|c_k|)^(1/2) (n e/2)^(n/2) n^(1/6) e^(t_k n^(1/3)) |u_k|
    """
    params = CPIIParams(omega1=omega1, omega2=omega2, s=t2 - t1)
    if params.c1 == 0.0 or params.c2 == 0.0:
        raise ValueError("both channels must be active for the polynomial "
                         "value predictions (omega1 != 1, omega1 != omega2)")
    if traj is None:
        traj = solve_cpii(params, x_min=t1, tol=tol)
    elif traj.params != params:
        raise ValueError("trajectory was solved at different parameters")
    u1, _, u2, _ = traj.amplitudes(t1)
    v1, v2, _, _, h = traj.state(t1)
    vsum = v1 + v2
    n16 = n ** (1.0 / 6.0)
    n13 = n ** (1.0 / 3.0)
    alpha = -vsum / (math.sqrt(2.0) * n16)
    beta = math.sqrt(n / 2.0) - vsum / (2.0 ** 1.5 * n16)
    log_gamma_leading = ((n / 2.0 - 0.75) * math.log(2.0)
                         + (0.25 - n / 2.0) * math.log(n) + n / 2.0
                         - 0.5 * math.log(math.pi))
    base = 0.5 * n * math.log(0.5 * math.e * n) + math.log(n) / 6.0
    log_p1 = (0.5 * math.log(2.0 * math.pi / abs(params.c1)) + base
              + t1 * n13 + math.log(abs(u1)))
    log_p2 = (0.5 * math.log(2.0 * math.pi / abs(params.c2)) + base
              + t2 * n13 + math.log(abs(u2)))
    return OrthopolyPredictions(n=n, alpha=alpha, beta=beta,
                                log_gamma_leading=log_gamma_leading,
                                gamma_correction=1.0 + 0.5 * h / n13,
                                log_abs_pn_s1=log_p1, log_abs_pn_s2=log_p2,
                                v_sum=vsum, h_ii=h)
