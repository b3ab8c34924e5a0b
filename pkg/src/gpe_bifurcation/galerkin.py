"""Symmetry-reduced Galerkin system for ``-Delta u + (r^2 - omega + |u|^2) u = 0``.

In a subspace with real coefficients ``c`` the residual is

    F_i(c, omega) = (lambda_i - omega) c_i + N_i(c),

where ``N_i`` is the projection of ``|u|^2 u`` onto the exponential mode
``e^{i m theta} v_{m,n}``.  With this scaling ``F`` is the gradient of the
energy ``1/2 <(L - omega) u, u> + 1/4 int |u|^4`` in the metric
``mode_norm_sq * I`` and the Jacobian is symmetric.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .symmetry import CoefficientVector, Kind, ModeTable, SubspaceSpec

log = logging.getLogger(__name__)


class NonConvergence(RuntimeError):
    pass


class SingularJacobian(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-11
    max_iter: int = 25
    max_halvings: int = 8
    cond_max: float = 1e14
    jacobian_fd_tol: float = 1e-6
    tail_tol: float = 1e-6


@dataclass
class NewtonResult:
    coeffs: np.ndarray
    omega: float
    iterations: int
    residual_norm: float


def _vec(c) -> np.ndarray:
    return c.values if isinstance(c, CoefficientVector) else np.asarray(c, dtype=float)


class GalerkinSystem:
    def __init__(self, spec: SubspaceSpec, config: SolverConfig | None = None, grid=None):
        self.spec = spec
        self.config = config or SolverConfig()
        self.grid = grid or spec.quadrature()
        self.table = ModeTable(spec, self.grid)
        self.lam = spec.eigenvalues()

    @cached_property
    def _radial_weighted(self) -> np.ndarray:
        # vortex: 2 pi w_k v_i(r_k)
        return 2 * np.pi * self.table.radial * self.grid.weights

    @cached_property
    def _modes_flat(self) -> np.ndarray:
        # multipole modes 2 cos(m theta) v(r) are real
        return np.ascontiguousarray(self.table.modes.real.reshape(self.spec.dim, -1))

    @cached_property
    def _area_flat(self) -> np.ndarray:
        return self.grid.area_weights().ravel()

    def field_samples(self, c) -> np.ndarray:
        """Vortex: real radial profile at r_k. Multipole: real field at (r_k, theta_j) flattened."""
        c = _vec(c)
        if self.spec.kind is Kind.VORTEX:
            return c @ self.table.radial
        return c @ self._modes_flat

    def linear_part(self, c, omega: float) -> np.ndarray:
        return (self.lam - omega) * _vec(c)

    def cubic_part(self, c) -> np.ndarray:
        u = self.field_samples(c)
        if self.spec.kind is Kind.VORTEX:
            return self._radial_weighted @ u**3
        return 0.5 * self._modes_flat @ (self._area_flat * u**3)

    def residual(self, c, omega: float) -> np.ndarray:
        return self.linear_part(c, omega) + self.cubic_part(c)

    def fixed_point_residual(self, c, omega: float) -> np.ndarray:
        """Residual preconditioned by the inverse oscillator ``K = L^{-1}``."""
        return self.residual(c, omega) / self.lam

    def jacobian(self, c, omega: float) -> np.ndarray:
        u = self.field_samples(c)
        if self.spec.kind is Kind.VORTEX:
            G = (self._radial_weighted * (3 * u**2)) @ self.table.radial.T
        else:
            G = 0.5 * (self._modes_flat * (self._area_flat * 3 * u**2)) @ self._modes_flat.T
        return np.diag(self.lam - omega) + G

    def omega_derivative(self, c) -> np.ndarray:
        return -_vec(c)

    def energy(self, c, omega: float) -> float:
        c = _vec(c)
        u = self.field_samples(c)
        quad = 0.5 * self.spec.mode_norm_sq * np.sum((self.lam - omega) * c**2)
        if self.spec.kind is Kind.VORTEX:
            quart = 0.25 * 2 * np.pi * np.sum(self.grid.weights * u**4)
        else:
            quart = 0.25 * np.sum(self._area_flat * u**4)
        return float(quad + quart)

    def tail_ratio(self, c) -> float:
        """Largest highest-n coefficient over all harmonics relative to max |c|."""
        c = np.abs(_vec(c)).reshape(len(self.spec.harmonics), self.spec.n_radial)
        top = c.max()
        return float(c[:, -1].max() / top) if top > 0 else 0.0

    def is_resolved(self, c) -> bool:
        return self.tail_ratio(c) <= self.config.tail_tol

    def residual_tolerance(self, c) -> float:
        return self.config.newton_tol * max(1.0, float(np.linalg.norm(_vec(c))))

    def _check_conditioning(self, J: np.ndarray):
        cond = np.linalg.cond(J)
        if not np.isfinite(cond) or cond > self.config.cond_max:
            raise SingularJacobian(f"Jacobian condition estimate {cond:.3e}")

    def newton_solve(self, c0, omega: float, pin: tuple | None = None) -> NewtonResult:
        """Newton's method at fixed ``omega``, or with ``pin = ((m, n), value)``
        fixing one coefficient and solving for ``omega`` instead.

        Undamped steps; on residual growth the step is halved up to
        ``max_halvings`` times.
        """
        cfg = self.config
        c = np.array(_vec(c0), dtype=float)
        pin_idx = None
        if pin is not None:
            (m, n), value = pin
            pin_idx = self.spec.index_of(m, n)
            c[pin_idx] = value

        def system(c, omega):
            F = self.residual(c, omega)
            return F if pin_idx is None else np.append(F, c[pin_idx] - pin[1])

        def full_jacobian(c, omega):
            J = self.jacobian(c, omega)
            if pin_idx is None:
                return J
            row = np.zeros(self.spec.dim + 1)
            row[pin_idx] = 1.0
            return np.vstack([np.column_stack([J, -c]), row])

        F = system(c, omega)
        norm = np.linalg.norm(F)
        for it in range(cfg.max_iter + 1):
            if norm <= self.residual_tolerance(c):
                if pin_idx is not None:
                    # omega is an unknown: it must be determined at the solution
                    self._check_conditioning(full_jacobian(c, omega))
                return NewtonResult(c, float(omega), it, float(norm))
            if it == cfg.max_iter:
                break
            J = full_jacobian(c, omega)
            self._check_conditioning(J)
            delta = np.linalg.solve(J, -F)
            step = 1.0
            for _ in range(cfg.max_halvings + 1):
                c_try = c + step * delta[: self.spec.dim]
                om_try = omega + step * delta[-1] if pin_idx is not None else omega
                F_try = system(c_try, om_try)
                n_try = np.linalg.norm(F_try)
                if n_try < norm or step < 2.0**-cfg.max_halvings:
                    break
                step *= 0.5
            c, omega, F, norm = c_try, om_try, F_try, n_try
            log.debug("newton it=%d |F|=%.3e step=%g", it, norm, step)
        raise NonConvergence(f"Newton did not converge in {cfg.max_iter} iterations (|F|={norm:.3e})")
