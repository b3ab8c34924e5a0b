"""Checks of computed states that do not go through the Galerkin quadrature.

* strong-form residual of ``-Delta u + (r^2 - omega + |u|^2) u`` with
  finite differences on a fine uniform radial grid;
* nodal rays of multipole states;
* Strang split-step evolution of ``i u_t = -Delta u + (x^2 + y^2) u + |u|^2 u``
  on a Cartesian grid, confirming ``u(t) = e^{-i omega t} u(0)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .continuation import BranchPoint
from .oscillator_basis import apply_radial_operator, radial_table
from .symmetry import Kind, SubspaceSpec


class NotApplicable(ValueError):
    pass


class BoundaryMassTooLarge(ValueError):
    pass


class InstabilityDetected(RuntimeError):
    pass


def radial_profiles(point: BranchPoint, r: np.ndarray) -> dict[int, np.ndarray]:
    """Radial profile ``phi_m(r) = sum_n c_{m,n} v_{m,n}(r)`` for each harmonic."""
    spec = point.spec
    c = point.coeffs.values.reshape(len(spec.harmonics), spec.n_radial)
    return {m: c[i] @ radial_table(m, spec.n_radial, r) for i, m in enumerate(spec.harmonics)}


def _angular(spec: SubspaceSpec, m: int, theta: np.ndarray) -> np.ndarray:
    if spec.kind is Kind.VORTEX:
        return np.exp(1j * m * theta)
    return 2.0 * np.cos(m * theta) + 0j


def evaluate_polar(point: BranchPoint, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Field at arbitrary matching-shape arrays of polar coordinates."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    spec = point.spec
    flat_r = r.ravel()
    out = np.zeros(flat_r.shape, dtype=complex)
    for m, phi in radial_profiles(point, flat_r).items():
        out += _angular(spec, m, theta.ravel()) * phi
    return out.reshape(r.shape)


def strong_residual(point: BranchPoint, factor: int = 2, r_max: float | None = None) -> float:
    """Discrete L2 norm of f(u, omega) on a uniform radial grid ``factor``
    times finer than the mean spacing of the Gauss nodes."""
    if factor < 2:
        raise ValueError("fine radial factor must be >= 2")
    spec = point.spec
    grid = spec.quadrature()
    r_max = r_max or float(grid.r[-1])
    n_r = grid.k_quad * factor
    h = r_max / n_r
    r_all = h * np.arange(n_r + 2)
    r = r_all[1:-1]
    profiles = radial_profiles(point, r_all)
    lin = {m: apply_radial_operator(m, phi, h) - point.omega * phi[1:-1] for m, phi in profiles.items()}
    n_theta = 6 * spec.m_max + 2
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    u = sum(np.outer(phi[1:-1], _angular(spec, m, theta)) for m, phi in profiles.items())
    f = sum(np.outer(lin[m], _angular(spec, m, theta)) for m in profiles) + np.abs(u) ** 2 * u
    area = (r * h)[:, None] * (2 * np.pi / n_theta)
    return float(np.sqrt(np.sum(area * np.abs(f) ** 2)))


def nodal_lines(point: BranchPoint, n_theta: int | None = None, n_r: int = 400, rel_tol: float = 1e-8):
    """Angles of rays along which ``|u| < rel_tol * max|u|``.

    Only radii where the field is not already negligible (max over theta at
    least 1e-3 of the global max) are considered part of a ray.
    """
    spec = point.spec
    if spec.kind is not Kind.MULTIPOLE:
        raise NotApplicable("vortex states vanish only at the origin")
    n_theta = n_theta or 720 * spec.m0
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    r_max = np.sqrt(2 * max(point.omega, 1.0)) + 4
    r = np.linspace(0, r_max, n_r + 1)[1:]
    u = np.abs(sum(np.outer(phi, _angular(spec, m, theta)) for m, phi in radial_profiles(point, r).items()))
    top = u.max()
    if top == 0:
        return []
    rows = u.max(axis=1) >= 1e-3 * top
    on_ray = np.all(u[rows] < rel_tol * top, axis=0)
    return theta[on_ray].tolist()


@dataclass(frozen=True)
class CartesianField:
    values: np.ndarray
    half_width: float

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dx(self) -> float:
        return 2 * self.half_width / self.n

    @property
    def x(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n)

    def mass(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.dx**2)

    def boundary_ratio(self) -> float:
        a = np.abs(self.values)
        top = a.max()
        if top == 0:
            return 0.0
        frame = max(a[0].max(), a[-1].max(), a[:, 0].max(), a[:, -1].max())
        return float(frame / top)


MIN_HALF_WIDTH = 7.0


def default_half_width(omega: float) -> float:
    """``sqrt(2 omega) + 4``, but never below 7: at L = 6 the ground state
    ``e^{-r^2/2}`` is still 1.5e-8 of its peak on the frame."""
    return float(max(np.sqrt(2 * max(omega, 0.0)) + 4, MIN_HALF_WIDTH))


def to_cartesian(point: BranchPoint, n: int = 256, half_width: float | None = None) -> CartesianField:
    """Evaluate the spectral expansion on the periodic grid ``x_j = -L + j 2L/n``."""
    L = default_half_width(point.omega) if half_width is None else half_width
    x = -L + 2 * L / n * np.arange(n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    values = evaluate_polar(point, np.hypot(X, Y), np.arctan2(Y, X))
    out = CartesianField(values, L)
    if out.boundary_ratio() >= 1e-8:
        raise BoundaryMassTooLarge(f"|u| on the boundary frame is {out.boundary_ratio():.2e} of max; enlarge L")
    return out


@dataclass
class EvolutionReport:
    times: np.ndarray
    mass: np.ndarray
    energy: np.ndarray
    periodicity: np.ndarray = field(default=None)

    @property
    def mass_drift(self) -> float:
        if self.mass[0] == 0:
            return 0.0
        return float(np.max(np.abs(self.mass - self.mass[0])) / self.mass[0])

    @property
    def energy_drift(self) -> float:
        if self.energy[0] == 0:
            return 0.0
        return float(np.max(np.abs(self.energy - self.energy[0])) / abs(self.energy[0]))

    def to_csv(self, path):
        per = self.periodicity if self.periodicity is not None else np.full_like(self.times, np.nan)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            fh.write("# t,mass,energy,periodicity\n")
            for row in zip(self.times, self.mass, self.energy, per):
                w.writerow([f"{v:.17g}" for v in row])


def _wavenumbers_sq(n: int, dx: float) -> np.ndarray:
    k = 2 * np.pi * fft.fftfreq(n, d=dx)
    return k[:, None] ** 2 + k[None, :] ** 2


def field_energy(u: np.ndarray, k2: np.ndarray, V: np.ndarray, dx: float) -> float:
    """``int |grad u|^2 + V |u|^2 + |u|^4 / 2``; gradient term spectrally."""
    uh = fft.fft2(u)
    kinetic = np.sum(k2 * np.abs(uh) ** 2) / u.size
    rho = np.abs(u) ** 2
    return float((kinetic + np.sum(V * rho + 0.5 * rho**2)) * dx**2)


def evolve(
    field0: CartesianField, T: float, dt: float = 1e-3, omega: float | None = None, sample_every: float = 0.1
) -> tuple[EvolutionReport, CartesianField]:
    """Strang splitting: half step of the pointwise potential + nonlinear
    flow (exact, |u| is conserved), full kinetic step in Fourier space, half
    potential step.  Adjacent half steps are merged."""
    if dt > 1e-3 or dt <= 0:
        raise ValueError("need 0 < dt <= 1e-3")
    if T > 50 or T < 0:
        raise ValueError("need 0 <= T <= 50")
    n_steps = int(round(T / dt))
    stride = max(1, int(round(sample_every / dt)))
    x = field0.x
    V = x[:, None] ** 2 + x[None, :] ** 2
    k2 = _wavenumbers_sq(field0.n, field0.dx)
    kinetic = np.exp(-1j * k2 * dt)
    u0 = field0.values.astype(complex)
    norm0 = np.sqrt(np.sum(np.abs(u0) ** 2))

    def half(u):
        return u * np.exp(-0.5j * dt * (V + np.abs(u) ** 2))

    times, mass, energy, per = [], [], [], []

    def record(t, u_sync):
        times.append(t)
        mass.append(float(np.sum(np.abs(u_sync) ** 2) * field0.dx**2))
        energy.append(field_energy(u_sync, k2, V, field0.dx))
        if omega is not None:
            per.append(float(np.sqrt(np.sum(np.abs(np.exp(1j * omega * t) * u_sync - u0) ** 2)) / norm0) if norm0 else 0.0)

    u = u0.copy()
    record(0.0, u)
    u = half(u)
    for step in range(1, n_steps + 1):
        u = fft.ifft2(kinetic * fft.fft2(u))
        if step % stride == 0 or step == n_steps:
            u_sync = half(u)
            record(step * dt, u_sync)
            if mass[0] and abs(mass[-1] - mass[0]) / mass[0] > 1e-4:
                raise InstabilityDetected(f"mass drift {abs(mass[-1] - mass[0]) / mass[0]:.2e} at t={step * dt:g}")
            u = half(u_sync) if step < n_steps else u_sync
        else:
            u = u * np.exp(-1j * dt * (V + np.abs(u) ** 2))
    if n_steps == 0:
        u = u0
    report = EvolutionReport(np.array(times), np.array(mass), np.array(energy), np.array(per) if omega is not None else None)
    return report, CartesianField(u, field0.half_width)


def periodicity_error(point: BranchPoint, T: float = 5.0, dt: float = 1e-3, n: int = 256) -> tuple[float, EvolutionReport]:
    """``||e^{i omega T} u(T) - u(0)|| / ||u(0)||`` from the Cartesian evolution."""
    if not np.any(point.coeffs.values):
        return 0.0, EvolutionReport(np.array([0.0]), np.zeros(1), np.zeros(1), np.zeros(1))
    f0 = to_cartesian(point, n)
    report, _ = evolve(f0, T, dt, omega=point.omega)
    return float(report.periodicity[-1]), report
