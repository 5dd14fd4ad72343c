"""
Moments of optical tomograms, the variance-product uncertainty check and
the entropic uncertainty check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import OrderTooHigh, TailMassWarning
from .tomography import OpticalTomogram

MAX_ORDER = 8
ANALYTIC_TOL = 1e-6


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one inequality check.

    ``margin`` is signed so that a positive value means the inequality holds
    with room to spare; ``satisfied`` is ``margin >= -tolerance``.
    """

    name: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    satisfied: bool = field(init=False)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "satisfied", bool(self.margin >= -self.tolerance))

    def to_json(self) -> dict:
        d = asdict(self)
        order = ["name", "lhs", "rhs", "satisfied", "margin", "tolerance", "details"]
        return {k: d[k] for k in order}


@dataclass(frozen=True)
class MomentReport:
    theta: float
    moments: list[tuple[int, float]]
    mean: float
    variance: float


def tomographic_moment(opt: OpticalTomogram, theta: float, n: int, interpolate: bool = True) -> float:
    """``int w(X, theta) X^n dX``; theta = 0 gives <q^n>, theta = pi/2 gives <p^n>."""
    if n < 0:
        raise ValueError("moment order must be non-negative")
    if n > MAX_ORDER:
        raise OrderTooHigh(f"moment order {n} exceeds {MAX_ORDER}")
    w = opt.curve(theta, interpolate=interpolate)
    xn = opt.x**n
    edge = max(abs(xn[0] * w[0]), abs(xn[-1] * w[-1]))
    if edge > 1e-10:
        warnings.warn(f"|X|^{n} w = {edge:.2e} at the X-grid boundary", TailMassWarning, stacklevel=2)
    return float(np.sum(w * xn) * opt.dx)


def moment_report(opt: OpticalTomogram, theta: float, max_order: int = 4) -> MomentReport:
    moms = [(n, tomographic_moment(opt, theta, n)) for n in range(max_order + 1)]
    m0, m1, m2 = moms[0][1], moms[1][1], moms[2][1]
    mean = m1 / m0
    return MomentReport(theta, moms, mean, max(m2 / m0 - mean * mean, 0.0))


def _mean_var(w: np.ndarray, x: np.ndarray, dx: float) -> tuple[float, float]:
    mass = np.sum(w) * dx
    mean = np.sum(w * x) * dx / mass
    var = np.sum(w * (x - mean) ** 2) * dx / mass
    return float(mean), float(var)


def heisenberg_check(opt: OpticalTomogram, theta: float = 0.0, tolerance: float = ANALYTIC_TOL) -> InequalityReport:
    """``Var(X | theta) * Var(X | theta + pi/2) >= 1/4``.

    Both phases must be stored in the tomogram. At ``theta = 0`` this is the
    position-momentum relation.
    """
    a = opt.curve(theta)
    b = opt.curve(theta + np.pi / 2)
    _, va = _mean_var(a, opt.x, opt.dx)
    _, vb = _mean_var(b, opt.x, opt.dx)
    lhs = va * vb
    return InequalityReport(
        "heisenberg", lhs, 0.25, lhs - 0.25, tolerance,
        details={"theta": float(theta), "var_theta": va, "var_theta_plus_pi_2": vb},
    )


def entropy_integral(w: np.ndarray, dx: float) -> float:
    """``int w ln w dX`` with ``0 ln 0 = 0``."""
    pos = w > 1e-300
    return float(np.sum(w[pos] * np.log(w[pos])) * dx)


def entropic_check(opt: OpticalTomogram, theta: float = 0.0, tolerance: float = ANALYTIC_TOL) -> InequalityReport:
    """``ln(pi e) + int w_theta ln w_theta + int w_{theta+pi/2} ln w_{theta+pi/2} <= 0``."""
    a = opt.curve(theta)
    b = opt.curve(theta + np.pi / 2)
    ia = entropy_integral(a, opt.dx)
    ib = entropy_integral(b, opt.dx)
    lhs = math.log(math.pi * math.e) + ia + ib
    return InequalityReport(
        "entropic", lhs, 0.0, -lhs, tolerance,
        details={"theta": float(theta), "entropy_theta": -ia, "entropy_theta_plus_pi_2": -ib},
    )
