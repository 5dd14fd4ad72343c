"""
Simulated homodyne measurement: draw quadrature samples from a tomogram,
rebuild a histogram tomogram, and run the inequality checks with
tolerances widened by the sampling error.

Random numbers come from numpy's PCG64 generator, seeded per phase with
``(seed, phase_index)`` so that sampling one phase never depends on the
others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientSamples, InvalidParameter
from .inequalities import CutPoints, four_probs, subadditivity_check
from .statistics import InequalityReport, entropic_check, heisenberg_check
from .tomography import OpticalTomogram, default_x_grid

MIN_SAMPLES = 100
ESTIMATE_STEP = 0.125
SIGMAS = 3.0
TOL_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class QuadratureDataset:
    """Samples ``x[k]`` recorded at phase ``theta[k]``.

    ``source`` describes where the data came from (a state JSON, or
    ``{"kind": "external"}`` for imported measurements).
    """

    theta: np.ndarray
    x: np.ndarray
    seed: int | None = None
    source: dict = field(default_factory=lambda: {"kind": "external"})

    def __post_init__(self):
        th = np.array(self.theta, dtype=float).reshape(-1)
        x = np.array(self.x, dtype=float).reshape(-1)
        if th.size != x.size:
            raise InvalidParameter("theta and X columns differ in length")
        if not (np.all(np.isfinite(th)) and np.all(np.isfinite(x))):
            raise InvalidParameter("dataset contains non-finite values")
        if np.any((th < 0) | (th >= np.pi)):
            raise InvalidParameter("dataset phases must lie in [0, pi)")
        th.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "x", x)

    @property
    def phases(self) -> np.ndarray:
        return np.unique(self.theta)

    def counts(self) -> dict[float, int]:
        ph, n = np.unique(self.theta, return_counts=True)
        return {float(a): int(b) for a, b in zip(ph, n)}

    def at(self, theta: float) -> np.ndarray:
        return self.x[np.abs(self.theta - theta) <= 1e-12]


def _inverse_cdf_sampler(x: np.ndarray, w: np.ndarray):
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(x))])
    if cdf[-1] <= 0:
        raise InvalidParameter("cannot sample a phase with zero mass")
    cdf /= cdf[-1]
    return lambda u: np.interp(u, cdf, x)


def sample_quadratures(
    opt: OpticalTomogram, thetas, n_per_theta: int, seed: int, source: dict | None = None
) -> QuadratureDataset:
    """Draw ``n_per_theta`` samples of X at each phase by inverse-CDF sampling.

    The CDF is the cumulative trapezoid of ``w(X, theta)`` on the X grid,
    inverted by linear interpolation. Phase ``i`` uses
    ``numpy.random.default_rng([seed, i])``.
    """
    if n_per_theta < 1:
        raise InvalidParameter("n_per_theta must be at least 1")
    thetas = np.asarray(thetas, dtype=float).reshape(-1)
    th_col, x_col = [], []
    for i, th in enumerate(thetas):
        draw = _inverse_cdf_sampler(opt.x, opt.curve(th))
        rng = np.random.default_rng([int(seed), i])
        x_col.append(draw(rng.random(n_per_theta)))
        th_col.append(np.full(n_per_theta, th))
    return QuadratureDataset(
        np.concatenate(th_col), np.concatenate(x_col), int(seed),
        source if source is not None else {"kind": "tomogram"},
    )


def clip_dataset(data: QuadratureDataset, lo: float, hi: float) -> QuadratureDataset:
    """Copy with every sample clamped into ``[lo, hi]``; shrinks variances
    so the result no longer comes from any quantum state."""
    return QuadratureDataset(data.theta, np.clip(data.x, lo, hi), data.seed, {**data.source, "clipped": [lo, hi]})


@dataclass(frozen=True, eq=False)
class EstimatedTomogram:
    """Histogram tomogram with bins centred on ``tomogram.x``.

    ``stderr[i, l]`` is the multinomial standard error of the density in
    bin ``l`` at phase ``i``; ``bin_counts`` holds the raw counts.
    """

    tomogram: OpticalTomogram
    stderr: np.ndarray
    bin_counts: np.ndarray
    n_samples: np.ndarray

    @property
    def thetas(self) -> np.ndarray:
        return self.tomogram.thetas

    def probabilities(self, theta: float) -> tuple[np.ndarray, int]:
        """Bin probabilities and sample count at ``theta`` (X-mirrored if folded)."""
        hit = self.tomogram.phase_index(theta)
        if hit is None:
            self.tomogram.curve(theta)  # raises MissingPhase
        i, flipped = hit
        x = self.tomogram.x
        if flipped and not np.allclose(x, -x[::-1], atol=1e-12, rtol=0):
            raise InvalidParameter("folding a phase needs bins symmetric about 0")
        c = self.bin_counts[i][::-1] if flipped else self.bin_counts[i]
        n = int(self.n_samples[i])
        return c / n, n


def estimate_tomogram(data: QuadratureDataset, x_grid=None) -> EstimatedTomogram:
    """Histogram estimate of ``w(X, theta)`` for every phase in ``data``.

    Without ``x_grid`` the bins have width 1/8 on ``[-L, L]`` with ``L``
    the larger of 8 and the largest ``|X|`` rounded up. Samples beyond the
    outer bin edges are counted in the outer bins, so each phase carries
    unit mass.
    """
    if x_grid is None:
        extent = max(8.0, float(math.ceil(np.max(np.abs(data.x))))) if data.x.size else 8.0
        x = default_x_grid(extent, ESTIMATE_STEP)
    else:
        x = np.asarray(x_grid, dtype=float)
    h = float(x[1] - x[0])
    phases = data.phases
    counts = np.zeros((phases.size, x.size))
    n = np.zeros(phases.size, dtype=int)
    for i, th in enumerate(phases):
        xs = data.at(th)
        if xs.size < MIN_SAMPLES:
            raise InsufficientSamples(f"phase {th:.6f} has {xs.size} samples; at least {MIN_SAMPLES} needed")
        idx = np.clip(np.floor((xs - x[0]) / h + 0.5).astype(int), 0, x.size - 1)
        counts[i] = np.bincount(idx, minlength=x.size)
        n[i] = xs.size
    p = counts / n[:, None]
    dens = p / h
    se = np.sqrt(p * (1.0 - p) / n[:, None]) / h
    opt = OpticalTomogram(x, phases, dens, norm_tol=1e-9)
    return EstimatedTomogram(opt, se, counts, n)


def _entropy_stderr(p: np.ndarray, h: float, n: int) -> float:
    pos = p > 0
    lp = np.log(p[pos] / h)
    m1 = np.sum(p[pos] * lp)
    m2 = np.sum(p[pos] * lp * lp)
    return math.sqrt(max(m2 - m1 * m1, 0.0) / n)


def _variance_stderr(p: np.ndarray, x: np.ndarray, n: int) -> tuple[float, float]:
    mean = np.sum(p * x)
    d = x - mean
    m2 = np.sum(p * d * d)
    m4 = np.sum(p * d**4)
    return float(m2), math.sqrt(max(m4 - m2 * m2, 0.0) / n)


def _subadditivity_stderr(p: np.ndarray, n: int) -> float:
    rows = np.array([p[0] + p[1], p[0] + p[1], p[2] + p[3], p[2] + p[3]])
    cols = np.array([p[0] + p[2], p[1] + p[3], p[0] + p[2], p[1] + p[3]])
    g = np.zeros(4)
    pos = p > 0
    g[pos] = np.log(p[pos] / (rows[pos] * cols[pos]))
    var = (np.sum(p * g * g) - np.sum(p * g) ** 2) / n
    return math.sqrt(max(var, 0.0))


def _widen(r: InequalityReport, se: float, extra: dict) -> InequalityReport:
    tol = max(SIGMAS * se, TOL_FLOOR)
    return InequalityReport(r.name, r.lhs, r.rhs, r.margin, tol, details={**r.details, "stderr": se, **extra})


def checked_inequalities(est: EstimatedTomogram, cuts: CutPoints, theta: float = 0.0) -> list[InequalityReport]:
    """Subadditivity, Heisenberg and entropic checks on an estimate.

    Each tolerance is three first-order (delta-method) standard errors of
    the reported margin under multinomial sampling; bins with no counts
    contribute neither value nor variance.
    """
    opt = est.tomogram
    x = opt.x
    h = opt.dx
    pa, na = est.probabilities(theta)
    pb, nb = est.probabilities(theta + np.pi / 2)

    probs = four_probs(opt, theta, cuts)
    sub = subadditivity_check(probs)
    sub = _widen(sub, _subadditivity_stderr(np.array(probs.p), na), {"theta": float(theta), "cuts": list(cuts.as_tuple())})

    heis = heisenberg_check(opt, theta)
    va, sa = _variance_stderr(pa, x, na)
    vb, sb = _variance_stderr(pb, x, nb)
    heis = _widen(heis, math.hypot(vb * sa, va * sb), {})

    ent = entropic_check(opt, theta)
    ent = _widen(ent, math.hypot(_entropy_stderr(pa, h, na), _entropy_stderr(pb, h, nb)), {})
    return [sub, heis, ent]
