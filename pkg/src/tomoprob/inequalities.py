"""
Four-cut inequalities.

Three ordered cuts ``x1 <= x2 <= x3`` split the real line into four cells.
For a tomogram at phase theta the cell masses ``p1..p4`` satisfy::

    H(p1, p2, p3, p4) <= H(p1 + p2, p3 + p4) + H(p1 + p3, p2 + p4)

where ``H`` is the Shannon entropy; reading the four cells as a 2x2 table,
this is subadditivity of the joint entropy. The same holds for the masses
``Pi_i`` of ``W^2 dq dp / (2 pi)`` over the q-strips of a pure state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import entr

from .errors import GridTooSmall, InvalidParameter, NotNormalizedWarning
from .phasespace import WignerGrid
from .statistics import InequalityReport
from .tomography import OpticalTomogram

ROUNDING_TOL = 1e-12


@dataclass(frozen=True)
class CutPoints:
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        vals = (self.x1, self.x2, self.x3)
        if not all(np.isfinite(vals)):
            raise InvalidParameter("cut points must be finite")
        if not (self.x1 <= self.x2 <= self.x3):
            raise InvalidParameter(f"cut points must be ordered, got {vals}")

    @classmethod
    def parse(cls, text: str) -> "CutPoints":
        try:
            a, b, c = (float(s) for s in text.split(","))
        except ValueError:
            raise InvalidParameter(f"cuts must be 'x1,x2,x3', got {text!r}") from None
        return cls(a, b, c)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x1, self.x2, self.x3)


@dataclass(frozen=True)
class FourProbabilities:
    p: tuple[float, float, float, float]

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        if len(p) != 4 or any(v < 0 or not np.isfinite(v) for v in p):
            raise InvalidParameter(f"need four non-negative numbers, got {p}")
        object.__setattr__(self, "p", p)

    @property
    def total(self) -> float:
        return float(sum(self.p))


@dataclass(frozen=True)
class FourFunctionals:
    Pi: tuple[float, float, float, float]

    def __post_init__(self):
        v = tuple(float(x) for x in self.Pi)
        if len(v) != 4 or any(x < 0 or not np.isfinite(x) for x in v):
            raise InvalidParameter(f"need four non-negative numbers, got {v}")
        object.__setattr__(self, "Pi", v)

    @property
    def total(self) -> float:
        return float(sum(self.Pi))


def cell_cdf(density: np.ndarray, x: np.ndarray, points) -> np.ndarray:
    """Cumulative mass of a sampled density at ``points``.

    Each node carries a cell of width ``h`` centred on it, so the total is
    ``sum(density) * h``. Between nodes the density is linearly
    interpolated; the outer half cells are flat.
    """
    density = np.asarray(density, dtype=float)
    h = float(x[1] - x[0])
    pts = np.asarray(points, dtype=float)
    node_cdf = np.empty(x.size)
    node_cdf[0] = 0.5 * h * density[0]
    node_cdf[1:] = node_cdf[0] + np.cumsum(0.5 * h * (density[:-1] + density[1:]))
    total = float(np.sum(density) * h)
    out = np.empty(pts.shape)
    lo = x[0] - 0.5 * h
    hi = x[-1] + 0.5 * h
    for idx, v in np.ndenumerate(pts):
        if v <= lo:
            out[idx] = 0.0
        elif v >= hi:
            out[idx] = total
        elif v <= x[0]:
            out[idx] = density[0] * (v - lo)
        elif v >= x[-1]:
            out[idx] = node_cdf[-1] + density[-1] * (v - x[-1])
        else:
            i = min(int((v - x[0]) // h), x.size - 2)
            t = (v - x[i]) / h
            out[idx] = node_cdf[i] + h * (density[i] * t + 0.5 * (density[i + 1] - density[i]) * t * t)
    return out


def _cells(density: np.ndarray, x: np.ndarray, cuts: CutPoints) -> tuple[float, float, float, float]:
    f1, f2, f3 = cell_cdf(density, x, cuts.as_tuple())
    total = float(np.sum(density) * (x[1] - x[0]))
    vals = (f1, f2 - f1, f3 - f2, total - f3)
    return tuple(max(v, 0.0) for v in vals)


def four_probs(opt: OpticalTomogram, theta: float, cuts: CutPoints) -> FourProbabilities:
    """Masses of ``w(X, theta)`` on ``(-inf, x1], (x1, x2], (x2, x3], (x3, inf)``."""
    return FourProbabilities(_cells(opt.curve(theta), opt.x, cuts))


def _two_by_two_margin(p) -> tuple[float, float]:
    p = np.asarray(p, dtype=float)
    lhs = float(entr(p).sum())
    rows = np.array([p[0] + p[1], p[2] + p[3]])
    cols = np.array([p[0] + p[2], p[1] + p[3]])
    rhs = float(entr(rows).sum() + entr(cols).sum())
    return lhs, rhs


def subadditivity_check(p: FourProbabilities, tolerance: float = ROUNDING_TOL) -> InequalityReport:
    """Entropy of the four cells against the two coarse-grainings."""
    lhs, rhs = _two_by_two_margin(p.p)
    return InequalityReport("subadditivity", lhs, rhs, rhs - lhs, tolerance, details={"p": list(p.p)})


def four_functionals(w: WignerGrid, cuts: CutPoints) -> FourFunctionals:
    """``Pi_i = int_{strip i} int W^2 dp dq / (2 pi)`` over q-strips.

    The p integral is trapezoidal; the q integral of the resulting column
    masses uses a cubic-spline antiderivative, so cuts between grid nodes
    are handled without splitting cells linearly.
    """
    g = w.grid
    wp = np.full(g.n_p, g.dp)
    wp[[0, -1]] *= 0.5
    column = (w.values**2) @ wp / (2 * np.pi)
    outside = [c for c in cuts.as_tuple() if c < g.q_min or c > g.q_max]
    if outside:
        edge = max(column[0], column[-1])
        if edge > 1e-10 * max(column.max(), 1e-300):
            raise GridTooSmall(f"cuts {outside} lie outside the grid while W^2 is not negligible at its edge")
    # the column masses are smooth in q, so a cubic spline integrates the
    # partial strips to O(h^4) where linear splitting would give O(h^2)
    cum = CubicSpline(g.q, column).antiderivative()
    f = cum(np.clip(cuts.as_tuple(), g.q_min, g.q_max)) - cum(g.q_min)
    total = float(cum(g.q_max) - cum(g.q_min))
    vals = (f[0], f[1] - f[0], f[2] - f[1], total - f[2])
    return FourFunctionals(tuple(max(float(v), 0.0) for v in vals))


def wigner_subadditivity_check(Pi: FourFunctionals, tolerance: float = ROUNDING_TOL) -> InequalityReport:
    """Same inequality for the W^2 strip masses; meant for pure states.

    If the masses do not sum to 1 within 1e-3 (mixed state) the check is
    still evaluated but a :class:`NotNormalizedWarning` is issued and the
    report is flagged.
    """
    lhs, rhs = _two_by_two_margin(Pi.Pi)
    details = {"Pi": list(Pi.Pi), "total": Pi.total, "not_normalized": False}
    if abs(Pi.total - 1.0) > 1e-3:
        warnings.warn(f"strip masses sum to {Pi.total:.6f}, not 1", NotNormalizedWarning, stacklevel=2)
        details["not_normalized"] = True
    return InequalityReport("wigner_subadditivity", lhs, rhs, rhs - lhs, tolerance, details=details)


def random_cuts(rng: np.random.Generator, n: int, scale: float = 2.0) -> list[CutPoints]:
    """Sorted triples of ``N(0, scale^2)`` variates."""
    draws = np.sort(rng.normal(0.0, scale, size=(n, 3)), axis=1)
    return [CutPoints(*row) for row in draws]


def factorizing_cut(opt: OpticalTomogram, theta: float, x1: float, x3: float) -> CutPoints:
    """Middle cut for which the four cells form a product table,
    ``p1 p4 = p2 p3``, so the subadditivity inequality is an equality."""
    w = opt.curve(theta)
    total = float(np.sum(w) * opt.dx)

    def gap(x2):
        f1, f2, f3 = cell_cdf(w, opt.x, (x1, x2, x3))
        return f1 * (total - f3) - (f2 - f1) * (f3 - f2)

    # gap(x1) = p1 p4 >= 0; the product p2 p3 peaks where f2 sits midway
    f1, f3 = cell_cdf(w, opt.x, (x1, x3))
    lo, hi = x1, x3
    target = 0.5 * (f1 + f3)
    mid = brentq(lambda v: cell_cdf(w, opt.x, (v,))[0] - target, lo, hi, xtol=1e-14)
    if gap(mid) > 0:
        raise InvalidParameter("no middle cut factorizes the table for these outer cuts")
    return CutPoints(x1, brentq(gap, lo, mid, xtol=1e-14), x3)
