"""
Optical and symplectic tomograms.

The optical tomogram ``w(X, theta)`` is the Radon transform of the Wigner
function over the line ``X = q cos(theta) + p sin(theta)`` with measure
``dq dp / (2 pi)``. The symplectic tomogram ``w(X, mu, nu)`` uses the line
``X = mu q + nu p`` and is recovered from the optical one by the scaling
rule ``w(X, mu, nu) = w(X / r, atan2(nu, mu)) / r`` with ``r = |(mu, nu)|``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from .errors import (
    DegenerateDirection,
    InvalidParameter,
    MissingPhase,
    NormalizationError,
    NyquistViolation,
    RadialTruncationWarning,
    SupportClipped,
)
from .fock import displacement_decay_radius, radial_terms
from .phasespace import WignerGrid
from .statekit import ClassicalDensity, FockDensityMatrix

CLIP_THRESHOLD = 1e-9
NORM_TOL = 1e-6
SUPPORT_LIMIT = 1e-8
PHASE_ATOL = 1e-9


def default_thetas(n: int = 64) -> np.ndarray:
    """``n`` phases uniform on ``[0, pi)``."""
    return np.pi * np.arange(n) / n


def default_x_grid(extent: float = 8.0, step: float = 1.0 / 16) -> np.ndarray:
    n = int(round(2 * extent / step)) + 1
    return np.linspace(-extent, extent, n)


def _uniform_step(x: np.ndarray) -> float:
    if x.ndim != 1 or x.size < 2:
        raise InvalidParameter("X grid must be a 1-D array with at least two points")
    d = np.diff(x)
    h = float(d.mean())
    if h <= 0 or np.max(np.abs(d - h)) > 1e-9 * max(1.0, abs(h)):
        raise InvalidParameter("X grid must be uniform and increasing")
    return h


@dataclass(frozen=True, eq=False)
class OpticalTomogram:
    """``values[i, l] = w(x[l], thetas[i])`` on a uniform X grid.

    Negative entries are clipped to zero at construction and the removed
    mass is kept in ``clipped_mass``. Integrals over X use the rectangle
    rule ``sum(w) * dx``; for curves that vanish at the grid ends this
    coincides with the trapezoidal rule.
    """

    x: np.ndarray
    thetas: np.ndarray
    values: np.ndarray
    clipped_mass: float = 0.0
    norm_tol: float | None = NORM_TOL

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        th = np.array(self.thetas, dtype=float).reshape(-1)
        v = np.array(self.values, dtype=float)
        if v.shape != (th.size, x.size):
            raise InvalidParameter(f"values shape {v.shape} != (n_theta, n_x) = {(th.size, x.size)}")
        h = _uniform_step(x)
        if np.any((th < 0) | (th >= np.pi)):
            raise InvalidParameter("phases must lie in [0, pi)")
        if not np.all(np.isfinite(v)):
            raise InvalidParameter("tomogram has non-finite values")
        neg = v < 0
        clipped = float(self.clipped_mass)
        if neg.any():
            if v.min() < -CLIP_THRESHOLD:
                warnings.warn(
                    f"tomogram has values down to {v.min():.2e}; clipped to 0",
                    RuntimeWarning,
                    stacklevel=3,
                )
            clipped += float(-v[neg].sum() * h)
            v = np.where(neg, 0.0, v)
        for arr in (x, th, v):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "clipped_mass", clipped)
        if self.norm_tol is not None:
            mass = self.masses()
            bad = np.abs(mass - 1.0) > self.norm_tol
            if bad.any():
                i = int(np.argmax(np.abs(mass - 1.0)))
                raise NormalizationError(
                    f"tomogram mass {mass[i]:.8f} at theta={th[i]:.4f} differs from 1 by more than {self.norm_tol:g}"
                )

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def masses(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.dx

    def normalized(self) -> "OpticalTomogram":
        """Copy with every phase rescaled to unit mass."""
        m = self.masses()
        if np.any(m <= 0):
            raise NormalizationError("cannot normalize a phase with zero mass")
        return OpticalTomogram(self.x, self.thetas, self.values / m[:, None], self.clipped_mass)

    def phase_index(self, theta: float) -> tuple[int, bool] | None:
        """Row holding ``theta`` (after folding into ``[0, pi)``) and whether
        the X axis is mirrored by the fold; ``None`` if absent."""
        t = math.fmod(float(theta), 2 * np.pi)
        if t < 0:
            t += 2 * np.pi
        flipped = False
        if t >= np.pi - PHASE_ATOL:
            t -= np.pi
            flipped = True
            if t < 0:
                t = 0.0
        d = np.abs(self.thetas - t)
        i = int(np.argmin(d))
        if d[i] <= PHASE_ATOL:
            return i, flipped
        # theta just below pi folds onto 0
        if abs(t - np.pi) <= PHASE_ATOL and abs(self.thetas[0]) <= PHASE_ATOL:
            return 0, not flipped
        return None

    def has_phase(self, theta: float) -> bool:
        return self.phase_index(theta) is not None

    def curve(self, theta: float, interpolate: bool = False) -> np.ndarray:
        """``w(x, theta)`` on the X grid, using ``w(X, t + pi) = w(-X, t)``.

        Phases not stored raise :class:`MissingPhase` unless ``interpolate``.
        """
        hit = self.phase_index(theta)
        if hit is not None:
            i, flipped = hit
            row = self.values[i]
            return self._mirror(row) if flipped else row.copy()
        if not interpolate:
            raise MissingPhase(f"phase {theta:.6f} not present in tomogram")
        return self.evaluate(self.x, np.full(self.x.shape, float(theta)))

    def _mirror(self, row: np.ndarray) -> np.ndarray:
        x = self.x
        if np.allclose(x, -x[::-1], atol=1e-12, rtol=0):
            return row[::-1].copy()
        return np.interp(-x, x, row, left=0.0, right=0.0)

    def _extended(self):
        """Table over phases ``[0, 2 pi]`` built with the fold rule."""
        mirrored = np.array([self._mirror(r) for r in self.values])
        th = np.concatenate([self.thetas, self.thetas + np.pi, [self.thetas[0] + 2 * np.pi]])
        tab = np.concatenate([self.values, mirrored, self.values[:1]])
        if self.thetas[0] > 0:
            # close the cycle below the first stored phase
            th = np.concatenate([[self.thetas[-1] + np.pi - 2 * np.pi], th])
            tab = np.concatenate([mirrored[-1:], tab])
        return th, tab

    def evaluate(self, X, theta) -> np.ndarray:
        """Bilinear interpolation of ``w`` at arbitrary ``(X, theta)``;
        zero outside the X grid."""
        X, theta = np.broadcast_arrays(np.asarray(X, float), np.asarray(theta, float))
        th_ext, tab = self._extended()
        t = np.mod(theta, 2 * np.pi)
        i = np.clip(np.searchsorted(th_ext, t, side="right") - 1, 0, th_ext.size - 2)
        ft = (t - th_ext[i]) / (th_ext[i + 1] - th_ext[i])
        pos = (X - self.x[0]) / self.dx
        inside = (pos >= -1e-9) & (pos <= self.x.size - 1 + 1e-9)
        pos = np.clip(pos, 0.0, self.x.size - 1)
        l = np.clip(np.floor(pos).astype(int), 0, self.x.size - 2)
        fx = pos - l
        v0 = tab[i, l] * (1 - fx) + tab[i, l + 1] * fx
        v1 = tab[i + 1, l] * (1 - fx) + tab[i + 1, l + 1] * fx
        out = v0 * (1 - ft) + v1 * ft
        return np.where(inside, out, 0.0)


@dataclass(frozen=True, eq=False)
class SymplecticTomogram:
    """Lazy symplectic tomogram over an optical one."""

    base: OpticalTomogram

    def __call__(self, X, mu, nu):
        return symplectic_view(self.base, X, mu, nu)


def symplectic_view(opt: OpticalTomogram, X, mu, nu):
    """``w(X, mu, nu) = w(X / r, theta) / r`` with ``(mu, nu) = r (cos theta, sin theta)``."""
    X, mu, nu = np.broadcast_arrays(np.asarray(X, float), np.asarray(mu, float), np.asarray(nu, float))
    r = np.hypot(mu, nu)
    if np.any(r == 0):
        raise DegenerateDirection("(mu, nu) = (0, 0) has no symplectic tomogram")
    theta = np.arctan2(nu, mu)
    out = opt.evaluate(X / r, theta) / r
    return out if out.ndim else float(out)


# --------------------------------------------------------------- Radon transform


def _check_support(w: WignerGrid) -> None:
    edge = w.boundary_max()
    if edge > SUPPORT_LIMIT:
        raise SupportClipped(f"|W| = {edge:.2e} on the grid boundary; lines would leave the support")


def radon_directions(w: WignerGrid, directions, x_grid) -> np.ndarray:
    """``w(X, mu, nu)`` for each row ``(mu, nu)`` of ``directions``.

    Uses the projection-slice identity: the Fourier transform in X of the
    line integral equals the 2-D Fourier transform of ``W`` along
    ``k (mu, nu)``. The 2-D transform is summed directly from the grid
    samples (trapezoidal weights) and the 1-D inverse is a trapezoidal sum
    over ``k`` out to the grid's Nyquist limit.
    """
    _check_support(w)
    dirs = np.atleast_2d(np.asarray(directions, dtype=float))
    X = np.asarray(x_grid, dtype=float)
    g = w.grid
    q, p = g.q, g.p
    wv = w.values * g.weights()
    radius = math.hypot(max(abs(g.q_min), abs(g.q_max)), max(abs(g.p_min), abs(g.p_max)))
    xmax = float(np.max(np.abs(X))) if X.size else 0.0
    out = np.empty((dirs.shape[0], X.size))
    for n, (mu, nu) in enumerate(dirs):
        norm = math.hypot(mu, nu)
        if norm == 0:
            raise DegenerateDirection("(mu, nu) = (0, 0) has no tomogram")
        period = 2.0 * (xmax + radius * norm) + 1.0
        dk = 2 * np.pi / period
        kmax = min(
            np.pi / (g.dq * abs(mu)) if mu else np.inf,
            np.pi / (g.dp * abs(nu)) if nu else np.inf,
        )
        nk = int(math.floor(kmax / dk))
        k = dk * np.arange(nk + 1)
        a = np.exp(-1j * np.outer(k * mu, q))
        b = np.exp(-1j * np.outer(k * nu, p))
        spec = np.sum((a @ wv) * b, axis=1)
        # weights of a symmetric trapezoid over [-kmax, kmax] folded onto k >= 0
        wk = np.full(k.size, 2.0 * dk)
        wk[0] = dk
        if nk > 0 and abs(k[-1] - kmax) < 1e-12:
            wk[-1] = dk
        coeff = wk * spec / (2 * np.pi) ** 2
        out[n] = np.real(np.exp(1j * np.outer(X, k)) @ coeff)
    return out


def _radon_lines(w: WignerGrid, thetas: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Line integrals with bilinear interpolation of the Wigner grid."""
    _check_support(w)
    g = w.grid
    radius = math.hypot(max(abs(g.q_min), abs(g.q_max)), max(abs(g.p_min), abs(g.p_max)))
    ds = 0.5 * min(g.dq, g.dp)
    ns = int(math.ceil(radius / ds))
    s = ds * np.arange(-ns, ns + 1)
    out = np.empty((thetas.size, X.size))
    for i, th in enumerate(thetas):
        c, sn = math.cos(th), math.sin(th)
        qq = X[:, None] * c - s[None, :] * sn
        pp = X[:, None] * sn + s[None, :] * c
        iq = (qq - g.q_min) / g.dq
        ip = (pp - g.p_min) / g.dp
        vals = map_coordinates(w.values, [iq.ravel(), ip.ravel()], order=1, mode="constant", cval=0.0)
        out[i] = vals.reshape(qq.shape).sum(axis=1) * ds / (2 * np.pi)
    return out


def _grid_extent(w: WignerGrid) -> float:
    g = w.grid
    return max(8.0, float(math.ceil(max(abs(g.q_min), g.q_max, abs(g.p_min), g.p_max))))


def optical_tomogram(
    w: WignerGrid, thetas=None, x_grid=None, method: str = "fourier", norm_tol: float | None = NORM_TOL
) -> OpticalTomogram:
    """Radon transform of a Wigner grid onto phases ``thetas`` in ``[0, pi)``.

    ``method="fourier"`` (default) evaluates the line integrals through the
    projection-slice identity and is spectrally accurate for resolved
    Wigner functions. ``method="line"`` integrates along each line with
    bilinear interpolation of ``W``; it is second-order accurate in the
    grid step.

    Without an explicit ``x_grid`` the X range matches the half-width of
    the Wigner grid (at least 8) with step 1/16.
    """
    thetas = default_thetas() if thetas is None else np.asarray(thetas, dtype=float).reshape(-1)
    X = default_x_grid(_grid_extent(w)) if x_grid is None else np.asarray(x_grid, dtype=float)
    if np.any((thetas < 0) | (thetas >= np.pi)):
        raise InvalidParameter("phases must lie in [0, pi)")
    if method == "fourier":
        vals = radon_directions(w, np.column_stack([np.cos(thetas), np.sin(thetas)]), X)
    elif method == "line":
        vals = _radon_lines(w, thetas, X)
    else:
        raise InvalidParameter(f"unknown Radon method {method!r}")
    return OpticalTomogram(X, thetas, vals, norm_tol=norm_tol)


def classical_tomogram(f: ClassicalDensity, thetas=None, x_grid=None) -> OpticalTomogram:
    """Exact tomogram of a Gaussian density: a normal law in X with mean
    ``n . m`` and variance ``n^T C n``, ``n = (cos theta, sin theta)``."""
    thetas = default_thetas() if thetas is None else np.asarray(thetas, dtype=float).reshape(-1)
    X = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    return OpticalTomogram(X, thetas, gaussian_line_density(f, X[None, :], dirs[:, :1], dirs[:, 1:]))


def gaussian_line_density(f: ClassicalDensity, X, mu, nu):
    """Symplectic tomogram of a Gaussian density, broadcasting over inputs."""
    X, mu, nu = np.broadcast_arrays(np.asarray(X, float), np.asarray(mu, float), np.asarray(nu, float))
    c = f.cov
    mean = mu * f.mean[0] + nu * f.mean[1]
    var = c[0, 0] * mu * mu + 2 * c[0, 1] * mu * nu + c[1, 1] * nu * nu
    return np.exp(-0.5 * (X - mean) ** 2 / var) / np.sqrt(2 * np.pi * var)


# ---------------------------------------------------------------- reconstruction


def rho_from_symplectic(
    sym: SymplecticTomogram | OpticalTomogram, dim: int, damping: float = 1e-12
) -> FockDensityMatrix:
    """Density matrix from the symplectic tomogram.

    Evaluates ``rho = (2 pi)^-1 int w(X, mu, nu) exp[i(X - mu q - nu p)] dX dmu dnu``
    in polar coordinates ``(mu, nu) = r (cos theta, sin theta)``. The scaling
    rule turns the X integral into the characteristic function of the
    optical tomogram, ``phi(r, theta) = int w(Y, theta) exp(i r Y) dY``, and
    ``exp[-i r (cos theta q + sin theta p)]`` is the displacement operator
    ``D(-i r exp(i theta) / sqrt 2)``. The radial integral uses Gauss-Legendre
    nodes up to where every displacement element with ``m, n < dim`` has
    decayed below ``damping``; the angular integral is the trapezoidal rule
    on the stored phases, extended to ``[0, 2 pi)`` by
    ``phi(r, theta + pi) = conj(phi(r, theta))``.
    """
    opt = sym.base if isinstance(sym, SymplecticTomogram) else sym
    if dim < 1:
        raise InvalidParameter("dim must be positive")
    nth = opt.thetas.size
    if not np.allclose(opt.thetas, default_thetas(nth), atol=1e-9, rtol=0):
        raise InvalidParameter("reconstruction needs phases uniform on [0, pi) starting at 0")
    h = opt.dx
    if h * 2 * math.sqrt(2 * dim) >= math.pi:
        raise NyquistViolation(f"X step {h:.3g} too coarse for {dim} levels (need 2 h sqrt(2 dim) < pi)")
    r_max = math.sqrt(2.0) * displacement_decay_radius(dim, damping)
    r_nyq = math.pi / h
    if r_max > r_nyq:
        warnings.warn(
            f"radial cut {r_nyq:.3g} below damping radius {r_max:.3g}; result truncated",
            RadialTruncationWarning,
            stacklevel=2,
        )
        r_max = r_nyq
    xmax = float(np.max(np.abs(opt.x)))
    nr = int(r_max * xmax / 2) + 40
    nodes, wts = np.polynomial.legendre.leggauss(nr)
    r = 0.5 * r_max * (nodes + 1.0)
    wr = 0.5 * r_max * wts
    phi = (opt.values @ np.exp(1j * np.outer(opt.x, r))) * h  # (nth, nr)
    dth = np.pi / nth
    rho = np.zeros((dim, dim), dtype=complex)
    current_k = -1
    ck = None
    for k, j, rad in radial_terms(r * r / 2.0, dim):
        if k != current_k:
            e = np.exp(1j * k * (opt.thetas - np.pi / 2))[:, None]
            # theta + pi contributes conj(phi) * e^{ik(theta + pi - pi/2)}
            ck = ((phi * e).sum(axis=0) + (-1) ** k * (np.conj(phi) * e).sum(axis=0)) * dth
            ck = ck * wr * r / (2 * np.pi)
            current_k = k
        val = np.sum(ck * rad)
        rho[j + k, j] = val
        if k:
            rho[j, j + k] = np.conj(val)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    return FockDensityMatrix(rho, label="from_symplectic")
