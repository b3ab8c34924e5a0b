"""Branches of stationary states bifurcating from the trivial solution.

A branch starts at ``omega* = 2 (m0 + 2 n0 + 1)`` with the bifurcating mode
``(m0, n0)`` as amplitude parameter ``a``, and is traced with secant-tangent
pseudo-arclength continuation in ``(c, omega)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .galerkin import GalerkinSystem, NonConvergence, SingularJacobian, SolverConfig
from .oscillator_basis import BasisIndex, eigenvalue
from .symmetry import CoefficientVector, Kind, SubspaceSpec, check_simplicity

log = logging.getLogger(__name__)


class ResonantCase(ValueError):
    def __init__(self, m0: int, n0: int, clashes: list[BasisIndex]):
        self.clashes = clashes
        modes = ", ".join(f"({c.m},{c.n})" for c in clashes)
        super().__init__(
            f"eigenvalue {eigenvalue((m0, n0)):g} of ({m0},{n0}) is not simple in the "
            f"multipole space; clashing modes: {modes}"
        )


class InsufficientRange(ValueError):
    pass


class Termination(str, Enum):
    REACHED_OMEGA_MAX = "ReachedOmegaMax"
    REACHED_NORM_MAX = "ReachedNormMax"
    RETURNED_NEAR_BIFURCATION = "ReturnedNearBifurcation"
    STEP_FAILURE = "StepFailure"
    # not part of the global alternative: the point budget ran out
    MAX_POINTS = "MaxPoints"


@dataclass(frozen=True)
class ContinuationConfig:
    a0: float = 1e-2
    step: float = 5e-3
    step_min: float = 1e-5
    step_max: float = 0.1
    grow: float = 2.0
    shrink: float = 0.5
    fast_iterations: int = 3
    omega_max: float = 40.0
    norm_max: float = 10.0
    max_points: int = 2000
    corrector_max_iter: int = 10

    def __post_init__(self):
        for name in ("step", "step_min", "step_max", "grow", "omega_max", "norm_max", "max_points"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if not self.step_min <= self.step <= self.step_max:
            raise ValueError("need step_min <= step <= step_max")


@dataclass(frozen=True)
class BranchPoint:
    omega: float
    coeffs: CoefficientVector
    amplitude: float
    residual_norm: float
    arclength: float

    @property
    def spec(self) -> SubspaceSpec:
        return self.coeffs.spec

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs.values))


@dataclass
class Branch:
    m0: int
    n0: int
    spec: SubspaceSpec
    points: list[BranchPoint] = field(default_factory=list)
    termination: Termination | None = None

    @property
    def kind(self) -> Kind:
        return self.spec.kind

    @property
    def omega_star(self) -> float:
        return eigenvalue((self.m0, self.n0))

    @property
    def omegas(self) -> np.ndarray:
        return np.array([p.omega for p in self.points])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([p.amplitude for p in self.points])

    @property
    def coefficient_matrix(self) -> np.ndarray:
        return np.array([p.coeffs.values for p in self.points])

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.coefficient_matrix, axis=1)


def bifurcation_point(m0: int, n0: int, kind: Kind | str = Kind.VORTEX) -> float:
    if Kind(kind) is Kind.MULTIPOLE:
        clashes = check_simplicity(m0, n0)
        if clashes:
            raise ResonantCase(m0, n0, clashes)
    return eigenvalue((m0, n0))


def onset_coefficient(system: GalerkinSystem, n0: int) -> float:
    """Single-mode perturbation estimate ``(omega - omega*) / a^2``.

    Projects the cubic term of ``a * mode(m0, n0)`` back onto that mode.
    """
    e = np.zeros(system.spec.dim)
    e[system.spec.index_of(system.spec.m0, n0)] = 1.0
    return float(system.cubic_part(e) @ e)


def seed_branch(
    system: GalerkinSystem, n0: int, config: ContinuationConfig | None = None, a0: float | None = None
) -> BranchPoint:
    """Newton-corrected first point with the (m0, n0) coefficient pinned to ``a0``."""
    config = config or ContinuationConfig()
    a0 = config.a0 if a0 is None else a0
    spec = system.spec
    if a0 == 0:
        raise ValueError("seed amplitude must be nonzero; a zero pin gives the trivial solution")
    if n0 >= spec.n_radial:
        raise ValueError(f"n0={n0} outside the radial truncation {spec.n_radial}")
    omega_star = bifurcation_point(spec.m0, n0, spec.kind)
    idx = spec.index_of(spec.m0, n0)
    c0 = np.zeros(spec.dim)
    c0[idx] = a0
    guess = omega_star + onset_coefficient(system, n0) * a0**2
    res = system.newton_solve(c0, guess, pin=((spec.m0, n0), a0))
    coeffs = CoefficientVector(spec, res.coeffs)
    resid = float(np.linalg.norm(system.residual(res.coeffs, res.omega)))
    return BranchPoint(res.omega, coeffs, float(res.coeffs[idx]), resid, 0.0)


def _bordered(system: GalerkinSystem, c, omega, row) -> np.ndarray:
    J = system.jacobian(c, omega)
    return np.vstack([np.column_stack([J, system.omega_derivative(c)]), row])


def _initial_tangent(system: GalerkinSystem, point: BranchPoint, idx: int) -> np.ndarray:
    row = np.zeros(system.spec.dim + 1)
    row[idx] = 1.0
    rhs = np.zeros(system.spec.dim + 1)
    rhs[-1] = np.sign(point.amplitude)
    t = np.linalg.solve(_bordered(system, point.coeffs.values, point.omega, row), rhs)
    return t / np.linalg.norm(t)


def _correct(system: GalerkinSystem, x_pred: np.ndarray, tangent: np.ndarray, max_iter: int):
    """Newton on {F(c, omega) = 0, tangent . (x - x_pred) = 0}."""
    dim = system.spec.dim
    x = x_pred.copy()
    for it in range(max_iter + 1):
        c, omega = x[:dim], x[dim]
        F = system.residual(c, omega)
        G = np.append(F, tangent @ (x - x_pred))
        if np.linalg.norm(G) <= system.residual_tolerance(c):
            return x, it
        if it == max_iter or not np.all(np.isfinite(G)):
            break
        A = _bordered(system, c, omega, tangent)
        system._check_conditioning(A)
        x = x - np.linalg.solve(A, G)
    raise NonConvergence("corrector failed")


def continue_branch(
    system: GalerkinSystem, seed: BranchPoint, n0: int, config: ContinuationConfig | None = None
) -> Branch:
    config = config or ContinuationConfig()
    spec = system.spec
    dim = spec.dim
    idx = spec.index_of(spec.m0, n0)
    omega_star = eigenvalue((spec.m0, n0))
    other_eigs = np.unique(spec.eigenvalues())
    other_eigs = other_eigs[other_eigs != omega_star]

    branch = Branch(spec.m0, n0, spec, [seed])
    x = np.append(seed.coeffs.values, seed.omega)
    tangent = _initial_tangent(system, seed, idx)
    ds = config.step
    s = 0.0
    while True:
        if len(branch.points) >= config.max_points:
            branch.termination = Termination.MAX_POINTS
            break
        try:
            y, iters = _correct(system, x + ds * tangent, tangent, config.corrector_max_iter)
        except (NonConvergence, SingularJacobian, np.linalg.LinAlgError) as exc:
            ds *= config.shrink
            log.debug("step rejected (%s); ds -> %g", exc, ds)
            if ds < config.step_min:
                branch.termination = Termination.STEP_FAILURE
                break
            continue
        dist = float(np.linalg.norm(y - x))
        if dist == 0.0:
            branch.termination = Termination.STEP_FAILURE
            break
        s += dist
        tangent = (y - x) / dist
        x = y
        c, omega = y[:dim], float(y[dim])
        resid = float(np.linalg.norm(system.residual(c, omega)))
        branch.points.append(BranchPoint(omega, CoefficientVector(spec, c.copy()), float(c[idx]), resid, s))
        if iters <= config.fast_iterations:
            ds = min(ds * config.grow, config.step_max)

        norm = float(np.linalg.norm(c))
        if omega >= config.omega_max:
            branch.termination = Termination.REACHED_OMEGA_MAX
            break
        if norm >= config.norm_max:
            branch.termination = Termination.REACHED_NORM_MAX
            break
        if norm < 1e-6 and other_eigs.size and np.min(np.abs(omega - other_eigs)) < 1e-2:
            branch.termination = Termination.RETURNED_NEAR_BIFURCATION
            break
    log.info(
        "%s(%d,%d): %d points, %s", spec.kind.value, spec.m0, n0, len(branch.points), branch.termination.value
    )
    return branch


def trace_branch(
    spec: SubspaceSpec,
    n0: int,
    config: ContinuationConfig | None = None,
    solver: SolverConfig | None = None,
    a0: float | None = None,
) -> Branch:
    system = GalerkinSystem(spec, solver)
    seed = seed_branch(system, n0, config, a0=a0)
    return continue_branch(system, seed, n0, config)


@dataclass(frozen=True)
class ModeFit:
    mode: BasisIndex
    slope: float
    rms: float


def fit_local_expansion(branch: Branch, k: int | None = None, min_points: int = 6) -> list[ModeFit]:
    """Least-squares exponents of ``|c_{m,n}|`` against ``a`` near onset.

    Uses the first ``k`` points; by default the smallest ``k >= min_points``
    whose amplitudes span a decade.  Modes that vanish identically are skipped.
    """
    from .symmetry import mode_set

    a = np.abs(branch.amplitudes)
    if k is None:
        span = np.nonzero(a >= 10 * a[0])[0]
        if span.size == 0:
            raise InsufficientRange("branch amplitudes never span a decade")
        k = max(min_points, int(span[0]) + 1)
    if k < min_points or k > len(a) or a[:k].max() < 10 * a[:k].min():
        raise InsufficientRange(f"need >= {min_points} points spanning a decade of amplitude")
    la = np.log(a[:k])
    C = np.abs(branch.coefficient_matrix[:k])
    fits = []
    for i, mode in enumerate(mode_set(branch.spec)):
        if np.any(C[:, i] == 0):
            continue
        coef, res, *_ = np.polyfit(la, np.log(C[:, i]), 1, full=True)
        rms = float(np.sqrt(res[0] / k)) if res.size else 0.0
        fits.append(ModeFit(mode, float(coef[0]), rms))
    return fits
