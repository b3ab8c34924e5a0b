"""Symmetry-reduced subspaces for vortex and multipole solutions.

Two fixed-point spaces of the O(2) x O(2) action
``u(r, theta) -> e^{i phi} u(r, theta + psi)``, ``u(r, -theta)``, ``conj(u)``:

* vortex:    ``u = e^{i m0 theta} sum_n c_n v_{m0,n}(r)``, real ``c_n``;
* multipole: ``u = sum_{m odd multiple of m0} sum_n c_{m,n} (e^{i m theta} + e^{-i m theta}) v_{m,n}(r)``,
  real ``c_{m,n}``, so the field is real, even in theta and flips sign under
  a rotation by ``pi / m0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .oscillator_basis import BasisIndex, QuadratureGrid, build_quadrature, eigenvalue, radial_table


class Kind(str, Enum):
    VORTEX = "vortex"
    MULTIPOLE = "multipole"


@dataclass(frozen=True)
class SubspaceSpec:
    kind: Kind
    m0: int
    n_radial: int = 12
    m_harmonics: int = 4

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.n_radial < 1:
            raise ValueError("n_radial must be >= 1")
        if self.kind is Kind.VORTEX and self.m0 < 0:
            raise ValueError("vortex degree m0 must be >= 0")
        if self.kind is Kind.MULTIPOLE:
            if self.m0 < 1:
                raise ValueError("multipole subspace requires m0 >= 1")
            if self.m_harmonics < 1:
                raise ValueError("m_harmonics must be >= 1")

    @property
    def harmonics(self) -> list[int]:
        if self.kind is Kind.VORTEX:
            return [self.m0]
        return [(2 * k + 1) * self.m0 for k in range(self.m_harmonics)]

    @property
    def m_max(self) -> int:
        return self.harmonics[-1]

    @property
    def dim(self) -> int:
        return len(self.harmonics) * self.n_radial

    @property
    def mode_norm_sq(self) -> float:
        """Squared L2 norm of one mode function (1 for vortex, 2 for multipole)."""
        return 1.0 if self.kind is Kind.VORTEX else 2.0

    def index_of(self, m: int, n: int) -> int:
        return mode_set(self).index(BasisIndex(m, n))

    def eigenvalues(self) -> np.ndarray:
        return np.array([eigenvalue(i) for i in mode_set(self)])

    def quadrature(self) -> QuadratureGrid:
        # rotations by pi/m0 must land on grid nodes
        return build_quadrature(self.n_radial, self.m_max, angular_multiple=2 * max(self.m0, 1))


def mode_set(spec: SubspaceSpec) -> list[BasisIndex]:
    return [BasisIndex(m, n) for m in spec.harmonics for n in range(spec.n_radial)]


def check_simplicity(m0: int, n0: int) -> list[BasisIndex]:
    """Modes of the multipole space sharing the eigenvalue of (m0, n0).

    An empty list means the eigenvalue is simple, which happens iff n0 < m0.
    """
    if m0 < 1 or n0 < 0:
        raise ValueError("need m0 >= 1 and n0 >= 0")
    clashes = []
    target = m0 + 2 * n0
    l = 3
    while l * m0 <= target:
        rest = target - l * m0
        if rest % 2 == 0:
            clashes.append(BasisIndex(l * m0, rest // 2))
        l += 2
    return clashes


@dataclass(frozen=True)
class CoefficientVector:
    spec: SubspaceSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.spec.dim,):
            raise ValueError(f"expected {self.spec.dim} coefficients, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    def __getitem__(self, index) -> float:
        m, n = index
        return float(self.values[self.spec.index_of(m, n)])

    def as_dict(self) -> dict[BasisIndex, float]:
        return dict(zip(mode_set(self.spec), self.values.tolist()))

    @classmethod
    def zeros(cls, spec: SubspaceSpec) -> "CoefficientVector":
        return cls(spec, np.zeros(spec.dim))


@dataclass(frozen=True)
class FieldGrid:
    """Complex samples ``values[k, j] = u(grid.r[k], grid.theta[j])``."""

    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.k_quad, self.grid.n_theta):
            raise ValueError("field shape does not match the grid")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field has non-finite samples")
        object.__setattr__(self, "values", vals)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.grid.area_weights() * np.abs(self.values) ** 2)))


class ModeTable:
    """Mode functions of a subspace sampled on a quadrature grid."""

    def __init__(self, spec: SubspaceSpec, grid: QuadratureGrid):
        if grid.n_theta < 6 * spec.m_max + 2:
            raise ValueError("angular grid too coarse for this subspace")
        self.spec = spec
        self.grid = grid

    @cached_property
    def radial(self) -> np.ndarray:
        """(dim, K) radial profiles v_{m,n}(r_k) in mode_set order."""
        return np.concatenate([radial_table(m, self.spec.n_radial, self.grid.r) for m in self.spec.harmonics])

    @cached_property
    def angular(self) -> np.ndarray:
        """(dim, N_theta) angular factors of each mode."""
        th = self.grid.theta
        rows = []
        for m in self.spec.harmonics:
            if self.spec.kind is Kind.VORTEX:
                a = np.exp(1j * m * th)
            else:
                a = 2.0 * np.cos(m * th) + 0j
            rows.extend([a] * self.spec.n_radial)
        return np.array(rows)

    @cached_property
    def modes(self) -> np.ndarray:
        """(dim, K, N_theta) complex mode functions."""
        return self.radial[:, :, None] * self.angular[:, None, :]


def _values(coeffs) -> np.ndarray:
    return coeffs.values if isinstance(coeffs, CoefficientVector) else np.asarray(coeffs, dtype=float)


def synthesize(coeffs: CoefficientVector, grid: QuadratureGrid | None = None) -> FieldGrid:
    spec = coeffs.spec
    grid = grid or spec.quadrature()
    table = ModeTable(spec, grid)
    return FieldGrid(grid, np.tensordot(coeffs.values, table.modes, axes=1))


def analyze(field: FieldGrid, spec: SubspaceSpec) -> tuple[CoefficientVector, float]:
    """Project a field onto the subspace; returns coefficients and the norm
    of the orthogonal remainder."""
    table = ModeTable(spec, field.grid)
    W = field.grid.area_weights()
    inner = np.einsum("kj,ikj->i", W * field.values, np.conj(table.modes))
    coeffs = CoefficientVector(spec, inner.real / spec.mode_norm_sq)
    recon = np.tensordot(coeffs.values, table.modes, axes=1)
    remainder = float(np.sqrt(np.sum(W * np.abs(field.values - recon) ** 2)))
    return coeffs, remainder


@dataclass(frozen=True)
class GroupElement:
    """``rotation`` psi, ``phase`` phi, reflection theta -> -theta, conjugation."""

    rotation: float = 0.0
    phase: float = 0.0
    reflect: bool = False
    conjugate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rotation", float(self.rotation) % (2 * np.pi))
        object.__setattr__(self, "phase", float(self.phase) % (2 * np.pi))


def apply_group(g: GroupElement, field: FieldGrid) -> FieldGrid:
    """Apply phase, rotation, reflection, conjugation (in that order)."""
    n_theta = field.grid.n_theta
    steps = g.rotation / field.grid.dtheta
    shift = int(round(steps))
    if abs(steps - shift) > 1e-9:
        raise ValueError(f"rotation {g.rotation} is not aligned with the angular grid")
    u = np.exp(1j * g.phase) * field.values
    # u(theta + psi): column j takes column j + shift
    u = np.roll(u, -shift, axis=1)
    if g.reflect:
        u = u[:, (-np.arange(n_theta)) % n_theta]
    if g.conjugate:
        u = np.conj(u)
    return FieldGrid(field.grid, u)


def generating_set(spec: SubspaceSpec, grid: QuadratureGrid) -> list[GroupElement]:
    """Generators of the isotropy group of the subspace (rotations restricted
    to grid angles for the vortex)."""
    m0 = spec.m0
    if spec.kind is Kind.VORTEX:
        gens = [GroupElement(rotation=psi, phase=-m0 * psi) for psi in grid.theta]
        return gens + [GroupElement(reflect=True, conjugate=True)]
    return [
        GroupElement(reflect=True),
        GroupElement(conjugate=True),
        GroupElement(rotation=np.pi / m0, phase=np.pi),
    ]
