"""
Tomogram dynamics under quadratic Hamiltonians ``H = p^2/2 + U(q)``.

For ``U = 0`` or ``U = omega^2 q^2 / 2`` the phase-space flow is the linear
symplectic map ``S(t)``, and both the Wigner function and a classical
density are transported by it. In tomographic variables this means

    w_t(X, mu, nu) = w_0(X, S(t)^T (mu, nu)),

so every frame is a symplectic tomogram of the initial distribution along
a transformed direction. The frames are then fed to residual checks of the
tomographic evolution equations, evaluated with central differences in
``t``, ``theta`` (or ``mu, nu``) and ``X`` and a spectral inverse
X-derivative.

Residuals are reported as

    ||lhs - sum(rhs_terms)|| / (||lhs|| + sum ||rhs_term||)

over interior grid points, so a stationary trajectory (``lhs = 0``) still
has a well-defined relative residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, InvalidParameter, UnsupportedHamiltonian
from .phasespace import GridSpec, WignerGrid, suggest_grid, wigner_from_rho
from .statekit import ClassicalDensity, FockDensityMatrix
from .tomography import (
    OpticalTomogram,
    default_thetas,
    default_x_grid,
    gaussian_line_density,
    radon_directions,
)

DEFAULT_DT = 0.01
COARSE_THRESHOLD = 1e-2
EDGE_POINTS = 2


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """``kind`` is ``"free"`` (``U = 0``) or ``"harmonic"`` (``U = omega^2 q^2 / 2``)."""

    kind: str = "harmonic"
    omega: float = 1.0

    def __post_init__(self):
        if self.kind not in ("free", "harmonic"):
            raise UnsupportedHamiltonian(f"only free and harmonic Hamiltonians are supported, got {self.kind!r}")
        if self.kind == "harmonic" and not (math.isfinite(self.omega) and self.omega > 0):
            raise InvalidParameter(f"omega must be finite and positive, got {self.omega}")

    @classmethod
    def free(cls) -> "QuadraticHamiltonian":
        return cls("free", 0.0)

    @classmethod
    def harmonic(cls, omega: float = 1.0) -> "QuadraticHamiltonian":
        return cls("harmonic", float(omega))

    @property
    def omega_sq(self) -> float:
        return 0.0 if self.kind == "free" else self.omega**2

    def flow(self, t: float) -> np.ndarray:
        """Phase-space map ``(q, p)(0) -> (q, p)(t)``."""
        if self.kind == "free":
            return np.array([[1.0, t], [0.0, 1.0]])
        w = self.omega
        c, s = math.cos(w * t), math.sin(w * t)
        return np.array([[c, s / w], [-w * s, c]])

    def to_json(self) -> dict:
        return {"kind": self.kind, "omega": self.omega}


@dataclass(frozen=True, eq=False)
class TomogramTrajectory:
    times: np.ndarray
    frames: tuple[OpticalTomogram, ...]

    def __post_init__(self):
        t = np.array(self.times, dtype=float).reshape(-1)
        if t.size != len(self.frames):
            raise InvalidParameter("one frame per time is required")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise InvalidParameter("times must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "frames", tuple(self.frames))

    @property
    def x(self) -> np.ndarray:
        return self.frames[0].x

    @property
    def thetas(self) -> np.ndarray:
        return self.frames[0].thetas

    def stack(self) -> np.ndarray:
        """Values with shape ``(n_times, n_theta, n_x)``."""
        return np.stack([f.values for f in self.frames])

    def normalization_drift(self) -> float:
        m = np.stack([f.masses() for f in self.frames])
        return float(np.max(np.abs(m - m[0])))

    def shuffled(self, order) -> "TomogramTrajectory":
        """Same time stamps with the frames permuted; a negative control."""
        order = list(order)
        if sorted(order) != list(range(len(self.frames))):
            raise InvalidParameter("order must be a permutation of the frame indices")
        return TomogramTrajectory(self.times, tuple(self.frames[i] for i in order))


@dataclass(frozen=True, eq=False)
class SymplecticTrajectory:
    """``values[t, i, j, l] = M(x[l], mus[i], nus[j], times[t])``."""

    times: np.ndarray
    mus: np.ndarray
    nus: np.ndarray
    x: np.ndarray
    values: np.ndarray

    def shuffled(self, order) -> "SymplecticTrajectory":
        return SymplecticTrajectory(self.times, self.mus, self.nus, self.x, self.values[list(order)])

    def frozen(self) -> "SymplecticTrajectory":
        """Every frame replaced by the first one (a static control)."""
        v = np.broadcast_to(self.values[:1], self.values.shape).copy()
        return SymplecticTrajectory(self.times, self.mus, self.nus, self.x, v)


def _directions(h: QuadraticHamiltonian, t: float, thetas: np.ndarray) -> np.ndarray:
    n = np.column_stack([np.cos(thetas), np.sin(thetas)])
    return n @ h.flow(t)  # rows are S(t)^T n


def _spread(extent: float, h: QuadraticHamiltonian, times, thetas) -> float:
    """Half-width of an X grid holding every frame: a direction of length
    ``r`` stretches the initial support by ``r``."""
    r = max(float(np.max(np.linalg.norm(_directions(h, t, thetas), axis=1))) for t in times)
    return float(max(8.0, math.ceil(extent * max(r, 1.0))))


def propagate_quadratic(
    state,
    h: QuadraticHamiltonian,
    times,
    thetas=None,
    x_grid=None,
    grid: GridSpec | None = None,
) -> TomogramTrajectory:
    """Exact optical-tomogram trajectory of ``state`` under ``h``.

    Parameters
    ----------
    state : FockDensityMatrix, WignerGrid or ClassicalDensity
        Quantum states are sampled on ``grid`` (default: :func:`suggest_grid`)
        and each frame is the projection-slice Radon transform of the
        initial Wigner function along ``S(t)^T n``. Classical Gaussians are
        flowed in closed form.
    times : sequence of float
        Strictly increasing.
    x_grid : array, optional
        Default: step 1/16 on a symmetric range wide enough for the
        largest stretch ``|S(t)^T n|`` met along the trajectory.
    """
    if not isinstance(h, QuadraticHamiltonian):
        raise UnsupportedHamiltonian(f"cannot propagate under {h!r}; only quadratic Hamiltonians are supported")
    thetas = default_thetas() if thetas is None else np.asarray(thetas, dtype=float).reshape(-1)
    times = np.asarray(times, dtype=float).reshape(-1)
    frames = []
    if isinstance(state, ClassicalDensity):
        X = default_x_grid(_spread(8.0, h, times, thetas)) if x_grid is None else np.asarray(x_grid, dtype=float)
        n = np.column_stack([np.cos(thetas), np.sin(thetas)])
        for t in times:
            f = state.flowed(h.flow(t))
            frames.append(OpticalTomogram(X, thetas, gaussian_line_density(f, X[None, :], n[:, :1], n[:, 1:])))
        return TomogramTrajectory(times, tuple(frames))
    if isinstance(state, FockDensityMatrix):
        w0 = wigner_from_rho(state, grid or suggest_grid(state))
    elif isinstance(state, WignerGrid):
        w0 = state
    else:
        raise InvalidParameter(f"cannot propagate an object of type {type(state).__name__}")
    if x_grid is None:
        g = w0.grid
        X = default_x_grid(_spread(max(abs(g.q_min), g.q_max, abs(g.p_min), g.p_max), h, times, thetas))
    else:
        X = np.asarray(x_grid, dtype=float)
    for t in times:
        frames.append(OpticalTomogram(X, thetas, radon_directions(w0, _directions(h, t, thetas), X)))
    return TomogramTrajectory(times, tuple(frames))


def symplectic_trajectory(
    f: ClassicalDensity, h: QuadraticHamiltonian, times, mus=None, nus=None, x_grid=None
) -> SymplecticTrajectory:
    """Exact symplectic-tomogram frames of a classical Gaussian on a
    ``(mu, nu)`` box. The default box ``[0.4, 1.2]^2`` with step 0.05
    surrounds the point ``(1, 1)/sqrt 2`` of the unit circle."""
    mus = np.linspace(0.4, 1.2, 17) if mus is None else np.asarray(mus, dtype=float)
    nus = np.linspace(0.4, 1.2, 17) if nus is None else np.asarray(nus, dtype=float)
    X = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    times = np.asarray(times, dtype=float).reshape(-1)
    MU, NU = np.meshgrid(mus, nus, indexing="ij")
    out = np.empty((times.size, mus.size, nus.size, X.size))
    for k, t in enumerate(times):
        ft = f.flowed(h.flow(t))
        out[k] = gaussian_line_density(ft, X[None, None, :], MU[..., None], NU[..., None])
    return SymplecticTrajectory(times, mus, nus, X, out)


# ------------------------------------------------------------ discrete operators


def inverse_derivative(f: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Antiderivative along the last axis, computed spectrally.

    The periodic inverse of ``d/dX`` fixes everything but the additive
    constant. That constant is chosen so ``int G dX = -int X f dX``, which
    is what integration by parts gives for an antiderivative vanishing at
    both ends of the grid. Simply dropping the zero mode instead leaves an
    offset of ``(int f) / L`` in ``G`` that does not shrink under
    refinement.
    """
    n = x.size
    dx = float(x[1] - x[0])
    k = 2 * np.pi * np.fft.rfftfreq(n, dx)
    F = np.fft.rfft(f, axis=-1)
    G = np.zeros_like(F)
    G[..., 1:] = F[..., 1:] / (1j * k[1:])
    g = np.fft.irfft(G, n, axis=-1)
    const = -np.sum(x * f, axis=-1, keepdims=True) * dx / (n * dx)
    return g + const


def _d_x(v: np.ndarray, dx: float) -> np.ndarray:
    """Fourth-order central difference along the last axis; the two end
    points on each side fall back to second order and are excluded from
    residual norms."""
    out = np.gradient(v, dx, axis=-1, edge_order=2)
    out[..., 2:-2] = (v[..., :-4] - 8 * v[..., 1:-3] + 8 * v[..., 3:-1] - v[..., 4:]) / (12 * dx)
    return out


def _d_theta(v: np.ndarray, dth: float) -> np.ndarray:
    """Periodic central difference in theta for arrays ``(..., n_theta, n_x)``
    on phases ``k pi / n`` and a symmetric X grid, closing the cycle with
    ``v(X, theta + pi) = v(-X, theta)``."""
    before = v[..., -1:, ::-1]
    after = v[..., :1, ::-1]
    ext = np.concatenate([before, v, after], axis=-2)
    return (ext[..., 2:, :] - ext[..., :-2, :]) / (2 * dth)


def _d_t(v: np.ndarray, dt: float) -> np.ndarray:
    return (v[2:] - v[:-2]) / (2 * dt)


def _relative(lhs: np.ndarray, terms: list[np.ndarray], mask) -> float:
    res = lhs - sum(terms)
    den = np.linalg.norm(lhs[mask]) + sum(np.linalg.norm(t[mask]) for t in terms)
    if den == 0:
        return 0.0
    return float(np.linalg.norm(res[mask]) / den)


def truncation_estimate(*steps: float) -> float:
    """Leading central-difference error scale ``h^2 / 6`` for the coarsest step."""
    return max(steps) ** 2 / 6.0


def _check_steps(threshold: float, **steps: float) -> None:
    est = truncation_estimate(*steps.values())
    if est > threshold:
        detail = ", ".join(f"{k}={v:.3g}" for k, v in steps.items())
        raise GridTooCoarse(f"truncation estimate {est:.3g} exceeds {threshold:g} ({detail})")


def _optical_setup(traj: TomogramTrajectory, threshold: float):
    if len(traj.frames) < 3:
        raise InvalidParameter("residuals need at least three frames")
    dts = np.diff(traj.times)
    dt = float(dts.mean())
    if np.max(np.abs(dts - dt)) > 1e-9 * max(dt, 1.0):
        raise InvalidParameter("residuals need uniformly spaced times")
    th = traj.thetas
    n = th.size
    if not np.allclose(th, default_thetas(n), atol=1e-9, rtol=0):
        raise InvalidParameter("residuals need phases k pi / n, k = 0..n-1")
    x = traj.x
    if not np.allclose(x, -x[::-1], atol=1e-9, rtol=0):
        raise InvalidParameter("residuals need an X grid symmetric about 0")
    dth = np.pi / n
    dx = float(x[1] - x[0])
    _check_steps(threshold, dt=dt, dtheta=dth, dx=dx)
    v = traj.stack()
    mask = (slice(None), slice(None), slice(EDGE_POINTS, x.size - EDGE_POINTS))
    return v, dt, dth, dx, th, x, mask


def _free_terms(w, dwdth, dwdx, s, c, x):
    return [c * c * dwdth, -s * c * (w + x * dwdx)]


def quantum_residual(traj: TomogramTrajectory, h: QuadraticHamiltonian, threshold: float = COARSE_THRESHOLD) -> float:
    """Relative residual of the quantum tomographic evolution equation.

    The kinetic part is ``cos^2 theta d_theta w - sin theta cos theta (1 + X d_X) w``.
    For ``U = omega^2 q^2 / 2`` the potential part is the imaginary part of
    ``U(B + iC)`` with ``B = sin theta d_theta [d_X]^-1 + X cos theta`` and
    ``C = (sin theta / 2) d_X``, doubled, i.e. ``omega^2 (BC + CB) w``.
    Both orderings are evaluated separately; they agree because ``B`` and
    ``C`` commute.
    """
    v, dt, dth, dx, th, x, mask = _optical_setup(traj, threshold)
    w = v[1:-1]
    lhs = _d_t(v, dt)
    s = np.sin(th)[:, None]
    c = np.cos(th)[:, None]
    dwdx = _d_x(w, dx)
    terms = _free_terms(w, _d_theta(w, dth), dwdx, s, c, x)
    if h.omega_sq:

        def b_op(f):
            return s * inverse_derivative(_d_theta(f, dth), x) + x * c * f

        def c_op(f):
            return 0.5 * s * _d_x(f, dx)

        terms.append(h.omega_sq * (b_op(c_op(w)) + c_op(b_op(w))))
    return _relative(lhs, terms, mask)


def classical_residual_optical(
    traj: TomogramTrajectory, h: QuadraticHamiltonian, threshold: float = COARSE_THRESHOLD
) -> float:
    """Relative residual of the classical Liouville equation for the optical
    tomogram. The force term is ``dU/dq`` with ``q`` replaced by the
    operator ``B`` acting on ``sin theta d_X w``; for the harmonic
    potential this is ``omega^2 B (sin theta d_X w)``."""
    v, dt, dth, dx, th, x, mask = _optical_setup(traj, threshold)
    w = v[1:-1]
    lhs = _d_t(v, dt)
    s = np.sin(th)[:, None]
    c = np.cos(th)[:, None]
    dwdx = _d_x(w, dx)
    terms = _free_terms(w, _d_theta(w, dth), dwdx, s, c, x)
    if h.omega_sq:
        g = s * dwdx
        terms.append(h.omega_sq * (s * inverse_derivative(_d_theta(g, dth), x) + x * c * g))
    return _relative(lhs, terms, mask)


def classical_residual_symplectic(
    traj: SymplecticTrajectory, h: QuadraticHamiltonian, threshold: float = COARSE_THRESHOLD
) -> float:
    """Relative residual of ``d_t M = mu d_nu M - omega^2 [d_X]^-1 d_mu (nu d_X M)``,
    the symplectic Liouville equation with ``q -> -[d_X]^-1 d_mu``."""
    t = traj.times
    if t.size < 3:
        raise InvalidParameter("residuals need at least three frames")
    dt = float(t[1] - t[0])
    if np.max(np.abs(np.diff(t) - dt)) > 1e-9 * max(dt, 1.0):
        raise InvalidParameter("residuals need uniformly spaced times")
    dmu = float(traj.mus[1] - traj.mus[0])
    dnu = float(traj.nus[1] - traj.nus[0])
    dx = float(traj.x[1] - traj.x[0])
    _check_steps(threshold, dt=dt, dmu=dmu, dnu=dnu, dx=dx)
    v = traj.values
    m = v[1:-1]
    lhs = _d_t(v, dt)
    mu = traj.mus[:, None, None]
    nu = traj.nus[None, :, None]
    terms = [mu * np.gradient(m, dnu, axis=2, edge_order=2)]
    if h.omega_sq:
        inner = nu * _d_x(m, dx)
        terms.append(-h.omega_sq * inverse_derivative(np.gradient(inner, dmu, axis=1, edge_order=2), traj.x))
    e = EDGE_POINTS
    mask = (slice(None), slice(1, -1), slice(1, -1), slice(e, traj.x.size - e))
    return _relative(lhs, terms, mask)


def convergence_order(coarse: float, fine: float, ratio: float = 2.0) -> float:
    """Observed order ``log(coarse / fine) / log(ratio)``."""
    if coarse <= 0 or fine <= 0:
        return math.inf if fine < coarse else 0.0
    return math.log(coarse / fine) / math.log(ratio)
