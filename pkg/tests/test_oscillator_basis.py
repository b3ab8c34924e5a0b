import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal
from scipy.special import eval_genlaguerre

from gpe_bifurcation.oscillator_basis import (
    BasisIndex,
    apply_radial_operator,
    build_eigenfunction,
    build_quadrature,
    count_nodes,
    eigenvalue,
    gram_matrix,
    laguerre_table,
    radial_table,
    spectrum_rows,
)


def fd_eigensolve(m, h, R, k):
    """Lowest k eigenpairs of -(1/r)(r v')' + m^2/r^2 v + r^2 v by a
    conservative second-order scheme on the cell-centred grid (j - 1/2) h."""
    J = int(round(R / h))
    r = (np.arange(1, J + 1) - 0.5) * h
    r_half = np.arange(0, J + 1) * h  # r_{j-1/2}, j = 1..J+1
    diag = (r_half[1:] + r_half[:-1]) / (r * h**2) + m * m / r**2 + r**2
    off = -r_half[1:-1] / h**2 / np.sqrt(r[:-1] * r[1:])
    lam, w = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))
    v = w / np.sqrt(r)[:, None]
    v /= np.sqrt(2 * np.pi * np.sum(v**2 * r[:, None] * h, axis=0))
    return lam, r, v


@pytest.mark.parametrize("index, expected", [((0, 0), 2.0), ((1, 0), 4.0), ((-3, 2), 16.0)])
def test_eigenvalue_examples(index, expected):
    assert eigenvalue(BasisIndex(*index)) == expected


def test_basis_index_rejects_negative_n():
    with pytest.raises(ValueError):
        BasisIndex(0, -1)
    with pytest.raises(ValueError):
        build_eigenfunction((2, -1))


def test_ground_state_closed_form():
    v = build_eigenfunction((0, 0))
    r = np.linspace(0, 5, 11)
    np.testing.assert_allclose(v(r), np.exp(-r**2 / 2) / np.sqrt(np.pi), rtol=1e-14)
    assert v(0.0) == pytest.approx(0.5641895835477563, rel=1e-15)


def test_vortex_mode_vanishes_at_origin():
    for m in (1, -1, 3):
        assert build_eigenfunction((m, 0))(0.0) == 0.0
        assert build_eigenfunction((m, 2))(0.0) == 0.0


@pytest.mark.parametrize("m", range(-6, 7))
@pytest.mark.parametrize("n", range(7))
def test_normalization_against_adaptive_quadrature(m, n):
    v = build_eigenfunction((m, n))
    val, _ = quad(lambda r: v(r) ** 2 * r, 0, np.inf, limit=200, epsabs=1e-15, epsrel=1e-13)
    assert val == pytest.approx(1 / (2 * np.pi), rel=1e-12, abs=1e-13)


@pytest.mark.parametrize("m", [0, 1, 2, 5])
def test_closed_form_matches_fd_eigensolve(m):
    lam_ref = np.array([eigenvalue((m, n)) for n in range(4)])
    errs = []
    for h in (0.02, 0.01):
        lam, r, v = fd_eigensolve(m, h, 12.0, 4)
        errs.append(np.abs(lam - lam_ref))
        closed = radial_table(m, 4, r).T
        signs = np.sign(np.sum(closed * v, axis=0))
        assert np.max(np.abs(v * signs - closed)) < 5e-3 * np.max(np.abs(closed))
    assert np.all(errs[1] < 2e-3 * lam_ref)
    order = np.log2(errs[0] / errs[1])
    assert np.all((order > 1.8) & (order < 2.2))


@given(n=st.integers(0, 30), alpha=st.integers(0, 12), x=st.floats(0, 60))
def test_laguerre_recurrence_matches_scipy(n, alpha, x):
    ours = laguerre_table(n, alpha, np.array([x]))[n, 0]
    ref = eval_genlaguerre(n, alpha, x)
    assert ours == pytest.approx(ref, rel=1e-9, abs=1e-9 * max(1.0, abs(ref)))


def _fd_relative_error(m, n, h):
    lam = eigenvalue((m, n))
    R = np.sqrt(2 * lam) + 6
    r = np.arange(0, R + h / 2, h)
    f = radial_table(m, n + 1, r)[-1]
    out = apply_radial_operator(m, f, h)
    ri, fi = r[1:-1], f[1:-1]
    return np.linalg.norm((out - lam * fi) * np.sqrt(ri)) / np.linalg.norm(lam * fi * np.sqrt(ri))


def test_radial_operator_examples():
    assert _fd_relative_error(0, 0, 1e-3) < 1e-6
    assert _fd_relative_error(1, 1, 1e-3) < 2e-6
    np.testing.assert_array_equal(apply_radial_operator(2, np.zeros(20), 0.1), np.zeros(18))


def test_radial_operator_second_order():
    e = [_fd_relative_error(3, 2, h) for h in (4e-3, 2e-3, 1e-3)]
    assert np.log2(e[0] / e[1]) == pytest.approx(2.0, abs=0.1)
    assert np.log2(e[1] / e[2]) == pytest.approx(2.0, abs=0.1)


def test_radial_operator_rejects_coarse_grid():
    with pytest.raises(ValueError):
        apply_radial_operator(0, np.ones(7), 0.1)


def test_quadrature_orthonormality_small():
    grid = build_quadrature(6, 0)
    np.testing.assert_allclose(gram_matrix(0, 6, grid), np.eye(6), atol=1e-12)


def test_quadrature_quartic_integral_matches_adaptive():
    grid = build_quadrature(1, 0)
    v = build_eigenfunction((0, 0))
    ours = np.sum(grid.weights * v(grid.r) ** 4)
    ref, _ = quad(lambda r: v(r) ** 4 * r, 0, np.inf, epsabs=1e-15, epsrel=1e-12)
    assert ours == pytest.approx(ref, rel=1e-10)
    assert ours == pytest.approx(1 / (4 * np.pi**2), rel=1e-13)


@pytest.mark.parametrize("n_radial, m_max", [(1, 0), (4, 3), (12, 7), (12, 14)])
def test_quadrature_grid_invariants(n_radial, m_max):
    grid = build_quadrature(n_radial, m_max)
    assert np.all(grid.weights > 0)
    assert np.all(np.diff(grid.r) > 0)
    assert grid.n_theta % 2 == 0 and grid.n_theta >= 6 * m_max + 2


def test_quadrature_exact_for_mixed_quartic_products():
    # v_{1,2} v_{3,1} v_{1,0} v_{5,0}: radial degree sum 10, in t = 2r^2 a polynomial
    grid = build_quadrature(3, 5)
    f = lambda r: (build_eigenfunction((1, 2))(r) * build_eigenfunction((3, 1))(r)
                   * build_eigenfunction((1, 0))(r) * build_eigenfunction((5, 0))(r))
    ref, _ = quad(lambda r: f(r) * r, 0, np.inf, epsabs=1e-17, epsrel=1e-13, limit=200)
    assert np.sum(grid.weights * f(grid.r)) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("index, nodes", [((0, 0), 0), ((2, 3), 3), ((5, 1), 1), ((0, 2), 2)])
def test_count_nodes_examples(index, nodes):
    assert count_nodes(index) == nodes


@settings(max_examples=40)
@given(m=st.integers(-6, 6), n=st.integers(0, 6))
def test_node_count_equals_n(m, n):
    assert count_nodes((m, n)) == n


def test_spectrum_rows():
    rows = {(m, n): rest for m, n, *rest in spectrum_rows(3, 3)}
    assert rows[(0, 0)][:2] == [2, 0]
    assert rows[(1, 1)][:2] == [8, 1]
    assert max(r[2] for r in rows.values()) <= 1e-12
