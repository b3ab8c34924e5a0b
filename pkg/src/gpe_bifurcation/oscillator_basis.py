"""Eigenpairs of the 2D isotropic harmonic oscillator in polar form.

The operator is ``-(d^2/dr^2 + r^-1 d/dr - m^2 r^-2) + r^2`` acting on the
radial profile of ``v(r) e^{i m theta}``.  Eigenfunctions are normalized to
unit L2(R^2) norm including the angular factor, i.e.
``int_0^inf v(r)^2 r dr = 1 / (2 pi)``.
"""
from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_laguerre


class BasisIndex(namedtuple("BasisIndex", "m n")):
    """Angular wavenumber ``m`` (any integer) and radial quantum number ``n >= 0``."""

    __slots__ = ()

    def __new__(cls, m: int, n: int):
        if n < 0:
            raise ValueError(f"radial quantum number must be >= 0, got {n}")
        return super().__new__(cls, int(m), int(n))


def eigenvalue(index: BasisIndex | tuple[int, int]) -> float:
    m, n = index
    return float(2 * (abs(m) + 2 * n + 1))


def laguerre_table(n_max: int, alpha: float, x: np.ndarray) -> np.ndarray:
    """Generalized Laguerre polynomials L_0..L_{n_max} at ``x`` by recurrence.

    Returns an array of shape ``(n_max + 1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def _log_norm(m: int, n: int) -> float:
    a = abs(m)
    return 0.5 * (gammaln(n + 1) - gammaln(n + a + 1) - np.log(np.pi))


def radial_table(m: int, n_count: int, r: np.ndarray) -> np.ndarray:
    """Values of v_{m,0..n_count-1} at radii ``r``, shape ``(n_count,) + r.shape``."""
    r = np.asarray(r, dtype=float)
    a = abs(m)
    lag = laguerre_table(max(n_count - 1, 0), a, r * r)[:n_count]
    with np.errstate(divide="ignore"):
        # r**a * exp(-r^2/2) in log form; r = 0 handled below
        log_env = np.where(r > 0, a * np.log(np.where(r > 0, r, 1.0)), 0.0) - 0.5 * r * r
    env = np.exp(log_env)
    if a > 0:
        env = np.where(r > 0, env, 0.0)
    consts = np.exp([_log_norm(m, n) for n in range(n_count)])
    return consts.reshape((-1,) + (1,) * r.ndim) * lag * env


@dataclass(frozen=True)
class RadialEigenfunction:
    index: BasisIndex
    norm_const: float
    degree: int

    @property
    def eigenvalue(self) -> float:
        return eigenvalue(self.index)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return radial_table(self.index.m, self.index.n + 1, r)[-1]


def build_eigenfunction(index: BasisIndex | tuple[int, int]) -> RadialEigenfunction:
    m, n = index
    if n < 0:
        raise ValueError(f"radial quantum number must be >= 0, got {n}")
    idx = BasisIndex(m, n)
    return RadialEigenfunction(idx, float(np.exp(_log_norm(m, n))), n)


def apply_radial_operator(m: int, samples: np.ndarray, h: float, r0: float = 0.0) -> np.ndarray:
    """Second-order finite-difference ``(-Delta_m + r^2)`` on a uniform grid.

    ``samples[j]`` is the function at ``r0 + j*h``.  The result holds the
    interior nodes ``j = 1..len-2`` only (length ``len(samples) - 2``).
    Intended as an independent check of the closed-form eigenfunctions.
    """
    f = np.asarray(samples)
    if f.shape[0] < 8:
        raise ValueError("radial grid too coarse: need at least 8 points")
    r = r0 + h * np.arange(1, f.shape[0] - 1)
    if r[0] <= 0:
        raise ValueError("interior nodes must have r > 0")
    r = r.reshape((-1,) + (1,) * (f.ndim - 1))
    fi = f[1:-1]
    d2 = (f[2:] - 2.0 * fi + f[:-2]) / h**2
    d1 = (f[2:] - f[:-2]) / (2.0 * h)
    return -(d2 + d1 / r - (m * m) * fi / r**2) + r**2 * fi


@dataclass(frozen=True)
class QuadratureGrid:
    """Radial Gauss nodes (in r) with weights for ``int g(r) r dr`` and a
    uniform angular grid ``theta_j = 2 pi j / n_theta``."""

    r: np.ndarray
    weights: np.ndarray
    n_theta: int
    theta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_theta % 2:
            raise ValueError("n_theta must be even")
        if np.any(self.weights <= 0) or np.any(np.diff(self.r) <= 0):
            raise ValueError("weights must be positive and nodes increasing")
        object.__setattr__(self, "theta", 2 * np.pi * np.arange(self.n_theta) / self.n_theta)
        self.r.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def k_quad(self) -> int:
        return self.r.size

    @property
    def dtheta(self) -> float:
        return 2 * np.pi / self.n_theta

    def area_weights(self) -> np.ndarray:
        """Weights for ``int int g r dr dtheta`` on the (r, theta) tensor grid."""
        return np.outer(self.weights, np.full(self.n_theta, self.dtheta))


# Extra Gauss points beyond the quartic exactness count.  Quadratic products
# (e^{-r^2} weight) are not polynomial in t = 2 r^2 but converge spectrally;
# the padding needed grows with the polynomial degree.
QUAD_PADDING = 16


@lru_cache(maxsize=64)
def _laguerre_rule(k: int):
    t, w = roots_laguerre(k)
    if np.any(w <= 0):
        raise ValueError(f"Gauss-Laguerre weights underflow for {k} nodes")
    # fold e^{t} into the weights in log space; t dt/4 = r dr
    logw = np.log(w) + t - np.log(4.0)
    return np.sqrt(t / 2.0), np.exp(logw)


def radial_node_count(n_radial: int, m_max: int) -> int:
    # quartic products: polynomial in t of degree <= 2*m_max + 4*(n_radial-1) + 1
    return m_max + 2 * (n_radial - 1) + 1 + QUAD_PADDING + n_radial


def build_quadrature(n_radial: int, m_max: int, angular_multiple: int = 2) -> QuadratureGrid:
    """Quadrature for Galerkin integrals of modes with ``|m| <= m_max`` and
    ``n < n_radial``.

    Radial rule: Gauss-Laguerre in ``t = 2 r^2``, exact for quartic products.
    Angular rule: ``n_theta >= 6*m_max + 2`` points, rounded up to a multiple
    of ``angular_multiple`` so that rotations by ``2 pi / angular_multiple``
    are grid-aligned.
    """
    if n_radial < 1 or m_max < 0:
        raise ValueError("need n_radial >= 1 and m_max >= 0")
    r, w = _laguerre_rule(radial_node_count(n_radial, m_max))
    step = int(np.lcm(2, angular_multiple))
    n_theta = -(-(6 * m_max + 2) // step) * step
    return QuadratureGrid(r.copy(), w.copy(), n_theta)


def count_nodes(index: BasisIndex | tuple[int, int], samples: int = 20000) -> int:
    """Strict sign changes of v_{m,n} on (0, r_cut), r_cut = sqrt(2 lambda) + 6."""
    m, n = index
    r_cut = np.sqrt(2 * eigenvalue((m, n))) + 6
    r = np.linspace(0, r_cut, samples + 1)[1:-1]
    s = np.sign(radial_table(m, n + 1, r)[-1])
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def gram_matrix(m: int, n_count: int, grid: QuadratureGrid) -> np.ndarray:
    """L2(R^2) Gram matrix of ``v_{m,n} e^{i m theta}``, n < n_count."""
    V = radial_table(m, n_count, grid.r)
    return 2 * np.pi * (V * grid.weights) @ V.T


def spectrum_rows(m_max: int, n_max: int):
    """Rows (m, n, lambda, nodes, norm_error) for 0 <= m <= m_max, n <= n_max."""
    rows = []
    for m in range(m_max + 1):
        grid = build_quadrature(n_max + 1, m)
        norms = np.diag(gram_matrix(m, n_max + 1, grid))
        for n in range(n_max + 1):
            rows.append((m, n, int(eigenvalue((m, n))), count_nodes((m, n)), abs(norms[n] - 1.0)))
    return rows
