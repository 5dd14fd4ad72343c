"""
Wigner function of a number-basis density matrix and the inverse map.

The forward map evaluates ``W(q, p) = 2 Tr(rho D(2 alpha) P)`` with
``alpha = (q + i p)/sqrt(2)`` and ``P`` the parity operator, using closed-form
displacement matrix elements. The inverse map integrates
``rho = (1/pi) int W(q, p) D(2 alpha) P dq dp`` on the grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmall, GridWarning, InvalidParameter, NormalizationError, NyquistViolation
from .fock import radial_terms
from .statekit import FockDensityMatrix, quadrature_moments

DEFAULT_EXTENT = 8.0
DEFAULT_POINTS = 129
BOUNDARY_RATIO = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Uniform rectangular phase-space grid, inclusive of both ends."""

    q_min: float = -DEFAULT_EXTENT
    q_max: float = DEFAULT_EXTENT
    p_min: float = -DEFAULT_EXTENT
    p_max: float = DEFAULT_EXTENT
    n_q: int = DEFAULT_POINTS
    n_p: int = DEFAULT_POINTS

    def __post_init__(self):
        if not (self.q_min < self.q_max and self.p_min < self.p_max):
            raise InvalidParameter("grid bounds must satisfy min < max")
        if self.n_q < 8 or self.n_p < 8:
            raise InvalidParameter("grids need at least 8 points per axis")

    @classmethod
    def symmetric(cls, extent: float, step: float = 0.125) -> "GridSpec":
        n = int(round(2 * extent / step)) + 1
        return cls(-extent, extent, -extent, extent, n, n)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"qmin,qmax,pmin,pmax,nq,np"``."""
        parts = [s.strip() for s in text.split(",")]
        if len(parts) != 6:
            raise InvalidParameter("grid spec must be 'qmin,qmax,pmin,pmax,nq,np'")
        try:
            return cls(*map(float, parts[:4]), int(parts[4]), int(parts[5]))
        except ValueError as exc:
            raise InvalidParameter(f"bad grid spec: {exc}") from None

    def __str__(self) -> str:
        return f"{self.q_min!r},{self.q_max!r},{self.p_min!r},{self.p_max!r},{self.n_q},{self.n_p}"

    @property
    def q(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_q)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.n_q - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.n_p - 1)

    def weights(self) -> np.ndarray:
        """Trapezoidal weights for ``dq dp``."""
        wq = np.full(self.n_q, self.dq)
        wq[[0, -1]] *= 0.5
        wp = np.full(self.n_p, self.dp)
        wp[[0, -1]] *= 0.5
        return np.outer(wq, wp)

    def to_json(self) -> dict:
        return {
            "q_min": self.q_min, "q_max": self.q_max, "p_min": self.p_min,
            "p_max": self.p_max, "n_q": self.n_q, "n_p": self.n_p,
        }


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """``W(q_i, p_j)`` sampled on ``grid``; ``values[i, j]`` is row-major in q."""

    grid: GridSpec
    values: np.ndarray
    imag_residue: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n_q, self.grid.n_p):
            raise InvalidParameter(f"values shape {v.shape} does not match grid")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def integral(self, power: int = 1) -> float:
        """``int W^power dq dp / (2 pi)`` by the trapezoidal rule."""
        return float(np.sum(self.grid.weights() * self.values**power) / (2 * np.pi))

    def normalization(self) -> float:
        return self.integral(1)

    def overlap_purity(self) -> float:
        """``int W^2 dq dp / (2 pi)``, equal to ``Tr rho^2``."""
        return self.integral(2)

    def q_marginal(self) -> np.ndarray:
        """``int W dp / (2 pi)`` at each q node."""
        wp = np.full(self.grid.n_p, self.grid.dp)
        wp[[0, -1]] *= 0.5
        return self.values @ wp / (2 * np.pi)

    def boundary_max(self) -> float:
        v = np.abs(self.values)
        return float(max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max()))


def _wigner_complex(elements: np.ndarray, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """``Tr(rho D(2 alpha) P)`` at broadcast points, complex."""
    alpha = (q + 1j * p) / math.sqrt(2.0)
    x = 4.0 * np.abs(alpha) ** 2
    phase = np.exp(1j * np.angle(alpha))
    dim = elements.shape[0]
    sign = (-1.0) ** np.arange(dim)
    total = np.zeros(x.shape, dtype=complex)
    upper = np.zeros(x.shape, dtype=complex)
    lower = np.zeros(x.shape, dtype=complex)
    rot = np.ones(x.shape, dtype=complex)
    current_k = 0
    for k, j, r in radial_terms(x, dim):
        if k != current_k:
            # flush the finished diagonal
            if current_k == 0:
                total += upper
            else:
                total += upper * rot + lower * np.conj(rot)
            upper[:] = 0.0
            lower[:] = 0.0
            rot = rot * phase
            current_k = k
        if k == 0:
            upper += (elements[j, j] * sign[j]) * r
        else:
            upper += (elements[j, j + k] * sign[j]) * r
            lower += (elements[j + k, j] * sign[j]) * r
    if current_k == 0:
        total += upper
    else:
        total += upper * rot + lower * np.conj(rot)
    return total


def wigner_at(rho: FockDensityMatrix, q, p):
    """Wigner function at arbitrary points; broadcasts ``q`` against ``p``."""
    q, p = np.broadcast_arrays(np.asarray(q, float), np.asarray(p, float))
    shape = q.shape
    w = 2.0 * _wigner_complex(rho.elements, q.ravel(), p.ravel()).real
    return w.reshape(shape) if shape else float(w[0])


def wigner_from_rho(
    rho: FockDensityMatrix, grid: GridSpec | None = None, check: bool = True
) -> WignerGrid:
    """Sample the Wigner function of ``rho`` on ``grid``.

    Raises :class:`GridTooSmall` when the boundary value exceeds
    ``1e-6 * max|W|`` and warns when the grid does not reach four standard
    deviations past the state's mean in either quadrature.
    """
    grid = grid or GridSpec()
    if check:
        _support_warning(rho, grid)
    Q, P = np.meshgrid(grid.q, grid.p, indexing="ij")
    wc = 2.0 * _wigner_complex(rho.elements, Q, P)
    out = WignerGrid(grid, wc.real, imag_residue=float(np.max(np.abs(wc.imag))))
    if check:
        peak = float(np.max(np.abs(out.values)))
        edge = out.boundary_max()
        if edge > BOUNDARY_RATIO * peak:
            raise GridTooSmall(
                f"boundary |W| = {edge:.2e} exceeds {BOUNDARY_RATIO:g} * max|W| on {grid}"
            )
    return out


def _support_warning(rho: FockDensityMatrix, grid: GridSpec) -> None:
    mean, cov = quadrature_moments(rho)
    sq, sp = math.sqrt(max(cov[0, 0], 0.0)), math.sqrt(max(cov[1, 1], 0.0))
    if (
        mean[0] - 4 * sq < grid.q_min or mean[0] + 4 * sq > grid.q_max
        or mean[1] - 4 * sp < grid.p_min or mean[1] + 4 * sp > grid.p_max
    ):
        warnings.warn(f"grid {grid} is narrower than mean +/- 4 sd of the state", GridWarning, stacklevel=3)


def suggest_grid(
    rho: FockDensityMatrix, step: float = 0.125, threshold: float = 1e-12, min_extent: float = DEFAULT_EXTENT
) -> GridSpec:
    """Smallest symmetric grid (integer half-width >= ``min_extent``) that
    covers mean +/- 4 sd in both quadratures and on whose boundary
    ``|W| <= threshold``."""
    mean, cov = quadrature_moments(rho)
    reach = max(
        abs(mean[0]) + 4 * math.sqrt(max(cov[0, 0], 0.0)),
        abs(mean[1]) + 4 * math.sqrt(max(cov[1, 1], 0.0)),
    )
    extent = float(math.ceil(max(min_extent, reach)))
    while extent < 64:
        g = GridSpec.symmetric(extent, step)
        q = g.q
        edge = np.concatenate([q, q, np.full_like(q, q[0]), np.full_like(q, q[-1])])
        other = np.concatenate([np.full_like(q, q[0]), np.full_like(q, q[-1]), q, q])
        if np.max(np.abs(wigner_at(rho, edge, other))) <= threshold:
            return g
        extent += 1.0
    raise GridTooSmall("state support exceeds the largest suggested grid")


def rho_from_wigner(w: WignerGrid, dim: int) -> FockDensityMatrix:
    """Reconstruct the density matrix on ``dim`` levels from a Wigner grid.

    The result is Hermitized and trace-renormalized; no positivity
    projection is applied.
    """
    g = w.grid
    if dim < 1:
        raise InvalidParameter("dim must be positive")
    if max(g.dq, g.dp) * math.sqrt(2 * dim) >= math.pi:
        raise NyquistViolation(
            f"grid step {max(g.dq, g.dp):.3g} too coarse for {dim} levels (need step*sqrt(2 dim) < pi)"
        )
    norm = w.normalization()
    if abs(norm - 1.0) > 1e-4:
        raise NormalizationError(f"Wigner grid integrates to {norm:.6f}, not 1")
    Q, P = np.meshgrid(g.q, g.p, indexing="ij")
    alpha = (Q + 1j * P) / math.sqrt(2.0)
    x = 4.0 * np.abs(alpha) ** 2
    phase = np.exp(1j * np.angle(alpha))
    weighted = w.values * g.weights() / np.pi
    rho = np.zeros((dim, dim), dtype=complex)
    gk = weighted.astype(complex)
    current_k = 0
    for k, j, r in radial_terms(x, dim):
        if k != current_k:
            gk = gk * phase
            current_k = k
        val = (-1) ** j * np.sum(gk * r)
        rho[j + k, j] = val
        if k:
            rho[j, j + k] = np.conj(val)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    return FockDensityMatrix(rho, label="from_wigner")
