"""
Number-basis algebra: ladder and quadrature operators, and matrix elements
of the displacement operator.

Conventions (hbar = 1)::

    q = (a + a^dag) / sqrt(2),   p = (a - a^dag) / (i sqrt(2)),
    D(beta) = exp(beta a^dag - conj(beta) a).
"""

from __future__ import annotations

import math

import numpy as np


def annihilation(dim: int) -> np.ndarray:
    """Truncated annihilation operator ``a`` on ``dim`` number states."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def quadrature_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated position and momentum matrices.

    Products of these matrices are wrong in the last rows/columns; use
    :func:`quadrature_power` for powers.
    """
    a = annihilation(dim)
    ad = a.conj().T
    q = (a + ad) / np.sqrt(2.0)
    p = (a - ad) / (1j * np.sqrt(2.0))
    return q, p


def quadrature_power(dim: int, n: int, which: str = "q") -> np.ndarray:
    """Matrix of ``q**n`` or ``p**n`` restricted to the first ``dim`` states.

    The power is formed in a space of ``dim + n`` states and then cropped,
    which makes the cropped block exact.
    """
    if n < 0:
        raise ValueError("power must be non-negative")
    big = dim + n
    q, p = quadrature_ops(big)
    op = q if which == "q" else p
    out = np.linalg.matrix_power(op, n)
    return out[:dim, :dim]


def radial_terms(x, dim: int):
    """Iterate over the radial parts of displacement matrix elements.

    Yields ``(k, j, R)`` for ``k = 0..dim-1`` and ``j = 0..dim-1-k`` with::

        R = sqrt(j!/(j+k)!) x^(k/2) exp(-x/2) L_j^(k)(x),   x = |beta|^2

    so that ``<j+k|D(beta)|j> = R exp(i k arg beta)`` and
    ``<j|D(beta)|j+k> = (-1)^k R exp(-i k arg beta)``.

    The prefactor is carried in log form once per ``k`` and updated by a
    scalar ratio in ``j``; the Laguerre polynomial uses the three-term
    recurrence. Valid for ``x`` below roughly 1400 (``exp(-x/2)`` underflow).
    """
    x = np.asarray(x, dtype=float)
    logx = np.log(np.where(x > 0, x, 1.0))
    for k in range(dim):
        # sqrt(1/k!) x^(k/2) e^(-x/2)
        logbase = -0.5 * x + 0.5 * k * logx - 0.5 * math.lgamma(k + 1)
        base = np.exp(logbase)
        if k > 0:
            base = np.where(x > 0, base, 0.0)
        l_prev = np.zeros_like(x)
        l_cur = np.ones_like(x)
        scale = 1.0
        for j in range(dim - k):
            if j == 1:
                l_prev, l_cur = l_cur, 1.0 + k - x
            elif j > 1:
                l_prev, l_cur = l_cur, ((2 * j - 1 + k - x) * l_cur - (j - 1 + k) * l_prev) / j
            if j > 0:
                scale *= math.sqrt(j / (j + k))
            yield k, j, (scale * base) * l_cur


def displacement_matrix(beta: complex, dim: int) -> np.ndarray:
    """Exact matrix elements ``<m|D(beta)|n>`` for ``m, n < dim``."""
    beta = complex(beta)
    ph = np.angle(beta)
    out = np.zeros((dim, dim), dtype=complex)
    for k, j, r in radial_terms(abs(beta) ** 2, dim):
        r = float(r)
        out[j + k, j] = r * np.exp(1j * k * ph)
        if k:
            out[j, j + k] = (-1) ** k * r * np.exp(-1j * k * ph)
    return out


def parity(dim: int) -> np.ndarray:
    """Parity operator ``psi(x) -> psi(-x)``; diagonal ``(-1)^n`` in this basis."""
    return np.diag((-1.0) ** np.arange(dim))


def displacement_decay_radius(dim: int, threshold: float = 1e-12) -> float:
    """Smallest ``|beta|`` beyond which every ``|<m|D(beta)|n>|``, m, n < dim,
    stays below ``threshold``."""
    b = np.linspace(0.0, 2.0 * math.sqrt(dim) + 12.0, 2000)
    peak = np.zeros_like(b)
    for _, _, r in radial_terms(b**2, dim):
        np.maximum(peak, np.abs(r), out=peak)
    above = np.nonzero(peak >= threshold)[0]
    if above.size == 0:
        return 0.0
    return float(b[min(above[-1] + 1, b.size - 1)])
