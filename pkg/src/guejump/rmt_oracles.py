"""Independent validation oracles: GUE eigenvalue sampling and a Nystrom
Fredholm determinant of the Airy kernel with piecewise-constant symbol.

Sampling convention (matches the eigenvalue density prod exp(-lambda_i^2)
prod |lambda_i - lambda_j|^2): the symmetric tridiagonal reduction has

    diagonal entries   ~ Normal(0, variance 1/2),
    off-diagonal k-th  ~ chi_{2k} / 2,   k = n-1, ..., 1.

A factor slip here is the most likely bug; the n=2 moments E[tr T] = 0 and
E[tr T^2] = 2 pin the convention and are asserted in the tests.

Monte-Carlo streams are split off a single seed via SeedSequence.spawn, so
estimates are reproducible given (seed, n_samples, n_streams); samples are
drawn in fixed-size chunks with a frozen draw order (normals, chi-squares,
thinning binomials).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from numpy.polynomial.legendre import leggauss

from .airy import airy_ai
from .errors import InsufficientConditioningError, NonConvergenceError

__all__ = [
    "SpectrumSample",
    "MCEstimate",
    "sample_gue_spectrum",
    "mc_gap_probability",
    "mc_gap_probability_multi",
    "mc_conditional_distribution",
    "fredholm_airy_discontinuous",
]

_N_RANGE = (2, 2000)
_CHUNK = 4096
_TAIL_LENGTH = 14.0


@dataclass(frozen=True)
class SpectrumSample:
    """One GUE spectrum (ascending), deterministic per seed."""

    eigenvalues: np.ndarray
    seed: int
    n: int


@dataclass(frozen=True)
class MCEstimate:
    """Probability estimate with binomial standard error."""

    estimate: float
    stderr: float
    n_samples: int
    seed: int
    n_effective: int | None = None

    def as_dict(self) -> dict:
        d = {"estimate": self.estimate, "stderr": self.stderr,
             "n_samples": self.n_samples, "seed": self.seed}
        if self.n_effective is not None:
            d["n_effective"] = self.n_effective
        return d


def _draw_tridiag(rng: np.random.Generator, n: int, size: int):
    """Batch of tridiagonal reductions: diagonals d (size, n) and squared
    off-diagonals e2 (size, n-1)."""
    d = rng.normal(0.0, math.sqrt(0.5), size=(size, n))
    df = 2.0 * np.arange(n - 1, 0, -1)
    e2 = rng.chisquare(df, size=(size, n - 1)) / 4.0
    return d, e2


def _sturm_count_below(d: np.ndarray, e2: np.ndarray, t: float) -> np.ndarray:
    """Number of eigenvalues < t per batch row, by the Sturm / LDL^T sign
    count (no eigenvector work, O(n) per row, vectorized over the batch)."""
    count = np.zeros(d.shape[0], dtype=np.int64)
    pivmin = 1e-290
    q = d[:, 0] - t
    count += q < 0.0
    for i in range(1, d.shape[1]):
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        q = (d[:, i] - t) - e2[:, i - 1] / q
        count += q < 0.0
    return count


def sample_gue_spectrum(n: int, seed: int) -> SpectrumSample:
    """Eigenvalues of one GUE draw via the tridiagonal reduction."""
    if not (_N_RANGE[0] <= n <= _N_RANGE[1]):
        raise ValueError(f"n must be in {_N_RANGE}, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    d, e2 = _draw_tridiag(rng, n, 1)
    ev = eigvalsh_tridiagonal(d[0], np.sqrt(e2[0]))
    ev = np.sort(ev)
    ev.setflags(write=False)
    return SpectrumSample(eigenvalues=ev, seed=seed, n=n)


def _stream_rngs(seed: int, n_streams: int):
    return [np.random.default_rng(ss)
            for ss in np.random.SeedSequence(seed).spawn(n_streams)]


def _stream_sizes(n_samples: int, n_streams: int):
    base, extra = divmod(n_samples, n_streams)
    return [base + (1 if i < extra else 0) for i in range(n_streams)]


def mc_gap_probability_multi(n: int, intervals, n_samples: int, seed: int,
                             n_streams: int = 1) -> list[MCEstimate]:
    """Gap probabilities for several intervals from one set of samples."""
    if not (_N_RANGE[0] <= n <= _N_RANGE[1]):
        raise ValueError(f"n must be in {_N_RANGE}, got {n}")
    if n_samples < 10_000:
        raise ValueError("n_samples >= 1e4 required")
    intervals = [(float(a), float(b)) for a, b in intervals]
    for a, b in intervals:
        if not a < b:
            raise ValueError(f"need s1 < s2, got ({a}, {b})")
    hits = np.zeros(len(intervals), dtype=np.int64)
    for rng, size in zip(_stream_rngs(seed, n_streams),
                         _stream_sizes(n_samples, n_streams)):
        done = 0
        while done < size:
            b = min(_CHUNK, size - done)
            d, e2 = _draw_tridiag(rng, n, b)
            for j, (a, bb) in enumerate(intervals):
                inside = (_sturm_count_below(d, e2, bb)
                          - _sturm_count_below(d, e2, a))
                hits[j] += int((inside == 0).sum())
            done += b
    out = []
    for j in range(len(intervals)):
        p = hits[j] / n_samples
        out.append(MCEstimate(estimate=float(p),
                              stderr=math.sqrt(max(p * (1 - p), 1e-300) / n_samples),
                              n_samples=n_samples, seed=seed))
    return out


def mc_gap_probability(n: int, s1: float, s2: float, n_samples: int,
                       seed: int, n_streams: int = 1) -> MCEstimate:
    """Fraction of spectra with no eigenvalue in (s1, s2)."""
    return mc_gap_probability_multi(n, [(s1, s2)], n_samples, seed,
                                    n_streams)[0]


def mc_conditional_distribution(n: int, x: float, y: float, p: float,
                                n_samples: int, seed: int,
                                n_streams: int = 1) -> MCEstimate:
    """Estimate Pro(lambda_max < x | thinned max < y) by rejection.

    Each eigenvalue is removed independently with probability p; the
    conditioning event 'largest kept eigenvalue < y' depends only on how
    many of the eigenvalues >= y are kept, so it is simulated by a binomial
    draw on that count.  Both x > y and x < y are handled (for x < y the
    target event already implies the condition).
    """
    if not (_N_RANGE[0] <= n <= _N_RANGE[1]):
        raise ValueError(f"n must be in {_N_RANGE}, got {n}")
    if not (0.0 < p < 1.0):
        raise ValueError("p in (0, 1) required")
    if n_samples < 10_000:
        raise ValueError("n_samples >= 1e4 required")
    cond = 0
    joint = 0
    for rng, size in zip(_stream_rngs(seed, n_streams),
                         _stream_sizes(n_samples, n_streams)):
        done = 0
        while done < size:
            b = min(_CHUNK, size - done)
            d, e2 = _draw_tridiag(rng, n, b)
            above_y = n - _sturm_count_below(d, e2, y)
            above_x = n - _sturm_count_below(d, e2, x)
            kept_above_y = rng.binomial(above_y, 1.0 - p)
            passed = kept_above_y == 0
            target = above_x == 0
            cond += int(passed.sum())
            joint += int((passed & target).sum())
            done += b
    if cond < 100:
        raise InsufficientConditioningError(
            f"only {cond} of {n_samples} samples satisfied the conditioning "
            "event; increase n_samples or move y")
    est = joint / cond
    return MCEstimate(estimate=float(est),
                      stderr=math.sqrt(max(est * (1 - est), 1e-300) / cond),
                      n_samples=n_samples, seed=seed, n_effective=cond)


# ---------------------------------------------------------------------------
# Fredholm determinant of the Airy kernel with a piecewise-constant symbol

def _airy_kernel_matrix(xs: np.ndarray) -> np.ndarray:
    """Airy kernel (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y) with the
    diagonal limit Ai'(x)^2 - x Ai(x)^2; near-diagonal entries use the
    midpoint limit to avoid cancellation."""
    vals = [airy_ai(float(t)) for t in xs]
    ai = np.array([v.ai for v in vals])
    aip = np.array([v.aip for v in vals])
    dx = xs[:, None] - xs[None, :]
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        k = (ai[:, None] * aip[None, :] - aip[:, None] * ai[None, :]) / dx
    close = np.abs(dx) < 1e-7
    if close.any():
        idx = np.nonzero(close)
        mids = 0.5 * (xs[idx[0]] + xs[idx[1]])
        mv = [airy_ai(float(m)) for m in mids]
        k[idx] = np.array([v.aip ** 2 - v.x * v.ai ** 2 for v in mv])
    return k


def _fredholm_value(t1: float, t2: float, omega1: float, omega2: float,
                    m: int) -> float:
    gn, gw = leggauss(m)
    xs, ws = [], []
    if 1.0 - omega1 != 0.0:
        xs.append(0.5 * (t2 - t1) * gn + 0.5 * (t1 + t2))
        ws.append(0.5 * (t2 - t1) * gw * (1.0 - omega1))
    if 1.0 - omega2 != 0.0:
        # half-line segment (t2, t2 + L) softened by x = t2 + u^2
        u_max = math.sqrt(_TAIL_LENGTH)
        u = 0.5 * u_max * gn + 0.5 * u_max
        xs.append(t2 + u * u)
        ws.append(2.0 * u * 0.5 * u_max * gw * (1.0 - omega2))
    if not xs:
        return 1.0
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    kernel = _airy_kernel_matrix(x)
    return float(np.linalg.det(np.eye(x.size) - kernel * w[None, :]))


def fredholm_airy_discontinuous(t1: float, t2: float, omega1: float,
                                omega2: float, m_nodes: int = 80) -> float:
    """Nystrom value of det(I - K) for the Airy kernel times the symbol
    taking value (1 - omega1) on (t1, t2) and (1 - omega2) on (t2, inf),
    the half-line truncated at t2 + 14 (the dropped Airy tail is below
    1e-20 for t2 >= -4).

    The value is computed at m_nodes and at 2 m_nodes per segment; if the
    refinement moves it by more than 1e-8 a NonConvergenceError is raised,
    otherwise the refined value is returned.
    """
    if not t1 < t2:
        raise ValueError("t1 < t2 required")
    if not (20 <= m_nodes <= 200):
        raise ValueError("m_nodes in [20, 200] required")
    if omega1 < 0 or omega2 < 0:
        raise ValueError("omega1, omega2 must be nonnegative")
    coarse = _fredholm_value(t1, t2, omega1, omega2, m_nodes)
    fine = _fredholm_value(t1, t2, omega1, omega2, 2 * m_nodes)
    if abs(fine - coarse) > 1e-8:
        raise NonConvergenceError(
            f"doubling m_nodes moved the determinant by {abs(fine - coarse):.3e}")
    return fine
