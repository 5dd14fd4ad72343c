"""
State catalog: number-basis density matrices for Fock, coherent, squeezed
vacuum, cat and thermal states, plus Gaussian classical phase-space densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import CutoffTooSmall, InvalidParameter

TAIL_LIMIT = 1e-10
KINDS = ("fock", "coherent", "squeezed_vacuum", "cat", "thermal")


@dataclass(frozen=True)
class StateSpec:
    """Parameters of a catalog state. ``cutoff`` is the number of Fock
    levels kept; ``None`` selects :func:`recommended_cutoff`."""

    kind: str
    cutoff: int | None = None
    n: int = 0
    alpha: complex = 0j
    r: float = 0.0
    phi: float = 0.0
    parity: int = 1
    nbar: float = 0.0

    @classmethod
    def fock(cls, n: int, cutoff: int | None = None) -> "StateSpec":
        return cls("fock", cutoff, n=int(n))

    @classmethod
    def coherent(cls, alpha: complex, cutoff: int | None = None) -> "StateSpec":
        return cls("coherent", cutoff, alpha=complex(alpha))

    @classmethod
    def squeezed_vacuum(cls, r: float, phi: float = 0.0, cutoff: int | None = None) -> "StateSpec":
        return cls("squeezed_vacuum", cutoff, r=float(r), phi=float(phi))

    @classmethod
    def cat(cls, alpha: complex, parity: int = 1, cutoff: int | None = None) -> "StateSpec":
        return cls("cat", cutoff, alpha=complex(alpha), parity=int(parity))

    @classmethod
    def thermal(cls, nbar: float, cutoff: int | None = None) -> "StateSpec":
        return cls("thermal", cutoff, nbar=float(nbar))

    @property
    def is_pure(self) -> bool:
        return self.kind != "thermal" or self.nbar == 0.0

    @property
    def label(self) -> str:
        if self.kind == "fock":
            return f"fock({self.n})"
        if self.kind == "coherent":
            return f"coherent({_fmt_complex(self.alpha)})"
        if self.kind == "squeezed_vacuum":
            return f"squeezed_vacuum(r={self.r:g},phi={self.phi:g})"
        if self.kind == "cat":
            return f"cat({_fmt_complex(self.alpha)},{'+' if self.parity > 0 else '-'})"
        return f"thermal({self.nbar:g})"

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "fock":
            out["n"] = self.n
        elif self.kind in ("coherent", "cat"):
            out["alpha"] = [self.alpha.real, self.alpha.imag]
            if self.kind == "cat":
                out["parity"] = self.parity
        elif self.kind == "squeezed_vacuum":
            out["r"] = self.r
            out["phi"] = self.phi
        else:
            out["nbar"] = self.nbar
        if self.cutoff is not None:
            out["cutoff"] = self.cutoff
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "StateSpec":
        try:
            kind = obj["kind"]
        except (KeyError, TypeError):
            raise InvalidParameter("state JSON needs a 'kind' field") from None
        if kind not in KINDS:
            raise InvalidParameter(f"unknown state kind {kind!r}")
        cutoff = obj.get("cutoff")
        if cutoff is not None:
            cutoff = int(cutoff)
        try:
            if kind == "fock":
                return cls.fock(int(obj["n"]), cutoff)
            if kind == "coherent":
                return cls.coherent(_parse_complex(obj["alpha"]), cutoff)
            if kind == "cat":
                return cls.cat(_parse_complex(obj["alpha"]), int(obj.get("parity", 1)), cutoff)
            if kind == "squeezed_vacuum":
                return cls.squeezed_vacuum(float(obj["r"]), float(obj.get("phi", 0.0)), cutoff)
            return cls.thermal(float(obj["nbar"]), cutoff)
        except KeyError as exc:
            raise InvalidParameter(f"state JSON for {kind!r} is missing {exc}") from None


def _fmt_complex(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real:g}"
    return f"{z.real:g}{z.imag:+g}j"


def _parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InvalidParameter("complex values are given as [re, im]")
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Density matrix in the truncated number basis (``dim`` levels).

    Construction checks shape, finiteness and Hermiticity; trace and
    positivity are reported by :meth:`violations` because reconstructed
    matrices are allowed to carry discretization error.
    """

    elements: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.array(self.elements, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidParameter("density matrix must be square and non-empty")
        if not np.all(np.isfinite(m)):
            raise InvalidParameter("density matrix has non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise InvalidParameter("density matrix is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "elements", m)

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.elements)[0])

    def violations(self, trace_tol: float = 1e-8, psd_tol: float = 1e-10) -> list[str]:
        out = []
        if abs(self.trace - 1.0) > trace_tol:
            out.append(f"trace {self.trace:.3e} differs from 1 by more than {trace_tol:g}")
        lam = self.min_eigenvalue
        if lam < -psd_tol:
            out.append(f"smallest eigenvalue {lam:.3e} below -{psd_tol:g}")
        return out

    def padded(self, dim: int) -> np.ndarray:
        """Elements embedded in a larger number space."""
        if dim < self.dim:
            raise ValueError("cannot pad to a smaller dimension")
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.dim, : self.dim] = self.elements
        return out

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.elements @ op))


@dataclass(frozen=True, eq=False)
class ClassicalDensity:
    """Gaussian probability density ``f(q, p)`` on phase space."""

    mean: np.ndarray
    cov: np.ndarray
    kind: str = "gaussian"

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(2)
        cov = np.array(self.cov, dtype=float).reshape(2, 2)
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidParameter("non-finite Gaussian parameters")
        if np.max(np.abs(cov - cov.T)) > 1e-12 * max(1.0, np.max(np.abs(cov))):
            raise InvalidParameter("covariance must be symmetric")
        if np.linalg.eigvalsh(cov)[0] <= 0:
            raise InvalidParameter("covariance must be positive definite")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def gaussian(cls, mean_q: float, mean_p: float, cov) -> "ClassicalDensity":
        return cls(np.array([mean_q, mean_p]), np.asarray(cov, dtype=float))

    def __call__(self, q, p):
        return eval_classical(self, q, p)

    def flowed(self, s: np.ndarray) -> "ClassicalDensity":
        """Density transported by the linear map ``z -> s z``."""
        s = np.asarray(s, dtype=float)
        return ClassicalDensity(s @ self.mean, s @ self.cov @ s.T)

    def to_json(self) -> dict:
        return {"kind": "gaussian", "mean": self.mean.tolist(), "cov": self.cov.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "ClassicalDensity":
        if obj.get("kind") != "gaussian":
            raise InvalidParameter("classical densities must have kind 'gaussian'")
        try:
            return cls(np.asarray(obj["mean"], float), np.asarray(obj["cov"], float))
        except (KeyError, ValueError) as exc:
            raise InvalidParameter(f"bad gaussian JSON: {exc}") from None


def eval_classical(density: ClassicalDensity, q, p):
    """Gaussian density ``f(q, p)``; broadcasts over ``q`` and ``p``."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    dq = q - density.mean[0]
    dp = p - density.mean[1]
    inv = np.linalg.inv(density.cov)
    quad = inv[0, 0] * dq * dq + 2.0 * inv[0, 1] * dq * dp + inv[1, 1] * dp * dp
    norm = 1.0 / (2.0 * np.pi * math.sqrt(np.linalg.det(density.cov)))
    out = norm * np.exp(-0.5 * quad)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------- amplitudes


def _coherent_amplitudes(alpha: complex, nmax: int) -> np.ndarray:
    n = np.arange(nmax)
    if alpha == 0:
        return (n == 0).astype(complex)
    logmag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * n * np.angle(alpha))


def _cat_amplitudes(alpha: complex, parity: int, nmax: int) -> np.ndarray:
    n = np.arange(nmax)
    c = _coherent_amplitudes(alpha, nmax) * (1.0 + parity * (-1.0) ** n)
    norm2 = 2.0 * (1.0 + parity * math.exp(-2.0 * abs(alpha) ** 2))
    return c / math.sqrt(norm2)


def _squeezed_amplitudes(r: float, phi: float, nmax: int) -> np.ndarray:
    c = np.zeros(nmax, dtype=complex)
    m = np.arange((nmax + 1) // 2)
    t = math.tanh(r)
    if t == 0.0:
        c[0] = 1.0
        return c
    logmag = m * math.log(t) + 0.5 * gammaln(2 * m + 1) - gammaln(m + 1) - m * math.log(2.0)
    c[0::2] = (
        np.exp(logmag - 0.5 * math.log(math.cosh(r)))
        * (-1.0) ** m
        * np.exp(1j * m * phi)
    )
    return c


def _pure_amplitudes(spec: StateSpec, nmax: int) -> np.ndarray:
    if spec.kind == "fock":
        c = np.zeros(nmax, dtype=complex)
        if spec.n < nmax:
            c[spec.n] = 1.0
        return c
    if spec.kind == "coherent":
        return _coherent_amplitudes(spec.alpha, nmax)
    if spec.kind == "cat":
        return _cat_amplitudes(spec.alpha, spec.parity, nmax)
    return _squeezed_amplitudes(spec.r, spec.phi, nmax)


def _thermal_populations(nbar: float, nmax: int) -> np.ndarray:
    n = np.arange(nmax)
    if nbar == 0:
        return (n == 0).astype(float)
    ratio = nbar / (1.0 + nbar)
    return np.exp(n * math.log(ratio)) / (1.0 + nbar)


def _validate_params(spec: StateSpec) -> None:
    vals = [spec.alpha.real, spec.alpha.imag, spec.r, spec.phi, spec.nbar]
    if not all(math.isfinite(v) for v in vals):
        raise InvalidParameter("state parameters must be finite")
    if spec.kind not in KINDS:
        raise InvalidParameter(f"unknown state kind {spec.kind!r}")
    if spec.kind == "fock" and spec.n < 0:
        raise InvalidParameter("Fock number must be non-negative")
    if spec.kind == "thermal" and spec.nbar < 0:
        raise InvalidParameter("thermal nbar must be non-negative")
    if spec.kind == "squeezed_vacuum" and spec.r < 0:
        raise InvalidParameter("squeeze parameter r must be non-negative")
    if spec.kind == "cat":
        if spec.parity not in (1, -1):
            raise InvalidParameter("cat parity must be +1 or -1")
        if spec.alpha == 0 and spec.parity == -1:
            raise InvalidParameter("odd cat state needs alpha != 0")
    if spec.cutoff is not None and spec.cutoff < 1:
        raise InvalidParameter("cutoff must be at least 1")


def tail_population(spec: StateSpec, cutoff: int) -> float:
    """Probability carried by number states ``n >= cutoff``."""
    _validate_params(spec)
    if spec.kind == "fock":
        return 0.0 if spec.n < cutoff else 1.0
    if spec.kind == "thermal":
        if spec.nbar == 0:
            return 0.0
        return (spec.nbar / (1.0 + spec.nbar)) ** cutoff
    if spec.kind == "coherent":
        return float(gammainc(cutoff, abs(spec.alpha) ** 2)) if spec.alpha != 0 else 0.0
    # sum the tail directly so small values keep their relative precision
    nmax = cutoff + 64
    while True:
        c = _pure_amplitudes(spec, nmax)
        pop = np.abs(c) ** 2
        if pop[-32:].sum() < 1e-30 * max(pop.sum(), 1e-300) or nmax > 20000:
            return float(pop[cutoff:].sum())
        nmax *= 2


def recommended_cutoff(spec: StateSpec) -> int:
    """Cutoff from the usual tail-bound rules, raised if needed until the
    tail population is below ``TAIL_LIMIT``."""
    _validate_params(spec)
    if spec.kind == "fock":
        return spec.n + 1
    if spec.kind in ("coherent", "cat"):
        a = abs(spec.alpha)
        n = math.ceil(a * a + 6 * a + 10)
    elif spec.kind == "squeezed_vacuum":
        n = math.ceil(10 * math.exp(2 * spec.r))
    else:
        if spec.nbar == 0:
            n = 1
        else:
            n = math.ceil(math.log(TAIL_LIMIT) / math.log(spec.nbar / (1 + spec.nbar))) + 3
    while tail_population(spec, n) >= TAIL_LIMIT:
        n += 2
    return n


def build_state(spec: StateSpec) -> FockDensityMatrix:
    """Density matrix of a catalog state at ``spec.cutoff`` levels."""
    _validate_params(spec)
    dim = spec.cutoff if spec.cutoff is not None else recommended_cutoff(spec)
    tail = tail_population(spec, dim)
    if tail >= TAIL_LIMIT:
        raise CutoffTooSmall(
            f"{spec.label}: population {tail:.2e} beyond cutoff {dim} (limit {TAIL_LIMIT:g})"
        )
    if spec.kind == "thermal":
        pops = _thermal_populations(spec.nbar, dim)
        rho = np.diag(pops / pops.sum()).astype(complex)
    else:
        c = _pure_amplitudes(spec, dim)
        c = c / np.linalg.norm(c)
        rho = np.outer(c, c.conj())
        rho = 0.5 * (rho + rho.conj().T)
    out = FockDensityMatrix(rho, label=spec.label)
    bad = out.violations()
    if bad:
        raise InvalidParameter(f"{spec.label}: " + "; ".join(bad))
    return out


def purity(rho: FockDensityMatrix) -> float:
    """``Tr rho^2``."""
    return float(np.sum(np.abs(rho.elements) ** 2))


def catalog(pure_only: bool = False) -> list[StateSpec]:
    """Standard set of states used by the checks and scripts."""
    states = [StateSpec.fock(n) for n in range(5)]
    states += [
        StateSpec.coherent(1 / math.sqrt(2)),
        StateSpec.coherent(1.0 + 1.0j),
        StateSpec.coherent(2.0),
        StateSpec.squeezed_vacuum(0.5),
        StateSpec.squeezed_vacuum(1.0, math.pi / 3),
        StateSpec.cat(1.0, 1),
        StateSpec.cat(1.5, 1),
        StateSpec.cat(1.5j, -1),
        StateSpec.thermal(0.5),
        StateSpec.thermal(1.0),
    ]
    if pure_only:
        states = [s for s in states if s.is_pure]
    return states


def quadrature_moments(rho: FockDensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and symmetrized covariance of ``(q, p)``."""
    from .fock import quadrature_ops

    dim = rho.dim + 2
    q, p = quadrature_ops(dim)
    r = rho.padded(dim)
    ev = lambda op: float(np.trace(r @ op).real)  # noqa: E731
    mq, mp = ev(q), ev(p)
    vqq = ev(q @ q) - mq * mq
    vpp = ev(p @ p) - mp * mp
    vqp = 0.5 * ev(q @ p + p @ q) - mq * mp
    return np.array([mq, mp]), np.array([[vqq, vqp], [vqp, vpp]])
