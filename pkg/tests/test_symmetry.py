import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gpe_bifurcation.oscillator_basis import BasisIndex, build_quadrature, eigenvalue, radial_table
from gpe_bifurcation.symmetry import (
    CoefficientVector,
    FieldGrid,
    GroupElement,
    Kind,
    SubspaceSpec,
    analyze,
    apply_group,
    check_simplicity,
    generating_set,
    mode_set,
    synthesize,
)

coeff_values = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


def test_mode_set_examples():
    assert mode_set(SubspaceSpec("vortex", 2, n_radial=3)) == [(2, 0), (2, 1), (2, 2)]
    assert mode_set(SubspaceSpec("multipole", 1, n_radial=2, m_harmonics=2)) == [
        BasisIndex(1, 0), BasisIndex(1, 1), BasisIndex(3, 0), BasisIndex(3, 1)
    ]
    assert mode_set(SubspaceSpec("multipole", 2, n_radial=1, m_harmonics=1)) == [BasisIndex(2, 0)]


def test_spec_validation():
    with pytest.raises(ValueError):
        SubspaceSpec("multipole", 0)
    assert SubspaceSpec("vortex", 0).dim == 12
    assert SubspaceSpec("multipole", 1).dim == 48


@pytest.mark.parametrize(
    "m0, n0, clashes", [(1, 0, []), (1, 1, [BasisIndex(3, 0)]), (3, 2, []), (2, 2, [BasisIndex(6, 0)])]
)
def test_check_simplicity_examples(m0, n0, clashes):
    assert check_simplicity(m0, n0) == clashes


@pytest.mark.parametrize("m0, n0", list(itertools.product(range(1, 6), range(6))))
def test_check_simplicity_brute_force(m0, n0):
    spec = SubspaceSpec("multipole", m0, n_radial=n0 + 1, m_harmonics=n0 + 2)
    target = eigenvalue((m0, n0))
    brute = [i for i in mode_set(spec) if eigenvalue(i) == target and i != BasisIndex(m0, n0)]
    assert check_simplicity(m0, n0) == brute
    assert (not brute) == (n0 < m0)


def test_synthesize_zero():
    spec = SubspaceSpec("multipole", 1, n_radial=3, m_harmonics=2)
    field = synthesize(CoefficientVector.zeros(spec))
    assert np.all(field.values == 0)


def test_synthesize_single_vortex_mode():
    spec = SubspaceSpec("vortex", 1, n_radial=4)
    c = np.zeros(4)
    c[0] = 1.0
    field = synthesize(CoefficientVector(spec, c))
    g = field.grid
    expected = radial_table(1, 1, g.r)[0][:, None] * np.exp(1j * g.theta)[None, :]
    np.testing.assert_allclose(field.values, expected, atol=1e-15)


def test_synthesize_dipole_mode():
    spec = SubspaceSpec("multipole", 1, n_radial=2, m_harmonics=2)
    a = 0.3
    c = np.zeros(spec.dim)
    c[0] = a
    field = synthesize(CoefficientVector(spec, c))
    g = field.grid
    expected = 2 * a * np.cos(g.theta)[None, :] * radial_table(1, 1, g.r)[0][:, None]
    np.testing.assert_allclose(field.values, expected, atol=1e-15)
    assert np.all(field.values.imag == 0)
    half = g.n_theta // 2
    np.testing.assert_allclose(np.roll(field.values, -half, axis=1), -field.values, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(
    kind=st.sampled_from([Kind.VORTEX, Kind.MULTIPOLE]),
    m0=st.integers(1, 3),
    data=st.data(),
)
def test_analyze_inverts_synthesize(kind, m0, data):
    spec = SubspaceSpec(kind, m0, n_radial=5, m_harmonics=3)
    c = data.draw(arrays(float, spec.dim, elements=coeff_values))
    coeffs, remainder = analyze(synthesize(CoefficientVector(spec, c)), spec)
    np.testing.assert_allclose(coeffs.values, c, atol=1e-12)
    assert remainder < 1e-12


def test_analyze_orthogonal_mode():
    grid = build_quadrature(4, 5)
    values = radial_table(5, 1, grid.r)[0][:, None] * np.exp(5j * grid.theta)[None, :]
    field = FieldGrid(grid, values)
    coeffs, remainder = analyze(field, SubspaceSpec("vortex", 1, n_radial=4))
    np.testing.assert_allclose(coeffs.values, 0, atol=1e-14)
    assert remainder == pytest.approx(field.norm(), rel=1e-12)
    assert field.norm() == pytest.approx(1.0, rel=1e-12)


def test_analyze_projection_remainder_is_orthogonal(rng):
    spec = SubspaceSpec("multipole", 1, n_radial=4, m_harmonics=2)
    grid = spec.quadrature()
    # a field with out-of-subspace content (even harmonics, imaginary part)
    raw = rng.normal(size=(grid.k_quad, 1)) * np.exp(-grid.r**2)[:, None] * (
        np.cos(grid.theta) + 0.3 * np.sin(2 * grid.theta) + 0.2j * np.cos(3 * grid.theta)
    )
    field = FieldGrid(grid, raw)
    coeffs, remainder = analyze(field, spec)
    rest = field.values - synthesize(coeffs, grid).values
    again, _ = analyze(FieldGrid(grid, rest), spec)
    np.testing.assert_allclose(again.values, 0, atol=1e-12)
    assert remainder > 0


def test_apply_group_identity_and_alignment():
    spec = SubspaceSpec("vortex", 2, n_radial=3)
    field = synthesize(CoefficientVector(spec, np.array([0.3, -0.1, 0.05])))
    np.testing.assert_array_equal(apply_group(GroupElement(), field).values, field.values)
    with pytest.raises(ValueError):
        apply_group(GroupElement(rotation=0.1234), field)


def test_vortex_rotation_phase_invariance():
    spec = SubspaceSpec("vortex", 2, n_radial=3)
    field = synthesize(CoefficientVector(spec, np.array([0.3, -0.1, 0.05])))
    psi = 3 * field.grid.dtheta
    moved = apply_group(GroupElement(rotation=psi, phase=-2 * psi), field)
    np.testing.assert_allclose(moved.values, field.values, atol=1e-12)


def test_multipole_half_turn_negates():
    spec = SubspaceSpec("multipole", 2, n_radial=3, m_harmonics=2)
    field = synthesize(CoefficientVector(spec, np.linspace(-0.2, 0.3, spec.dim)))
    moved = apply_group(GroupElement(rotation=np.pi / 2), field)
    np.testing.assert_allclose(moved.values, -field.values, atol=1e-12)


def test_group_action_composition_order():
    # conjugation after phase: conj(e^{i phi} u) = e^{-i phi} conj(u)
    spec = SubspaceSpec("vortex", 1, n_radial=2)
    field = synthesize(CoefficientVector(spec, np.array([0.5, 0.1])))
    g = apply_group(GroupElement(phase=0.7, conjugate=True), field)
    np.testing.assert_allclose(g.values, np.exp(-0.7j) * np.conj(field.values), atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(kind=st.sampled_from([Kind.VORTEX, Kind.MULTIPOLE]), m0=st.integers(1, 3), data=st.data())
def test_fixed_point_property(kind, m0, data):
    spec = SubspaceSpec(kind, m0, n_radial=4, m_harmonics=3)
    c = data.draw(arrays(float, spec.dim, elements=coeff_values))
    field = synthesize(CoefficientVector(spec, c))
    for g in generating_set(spec, field.grid):
        assert np.max(np.abs(apply_group(g, field).values - field.values)) <= 1e-12


def test_vortex_zero_allowed():
    spec = SubspaceSpec("vortex", 0, n_radial=3)
    field = synthesize(CoefficientVector(spec, np.array([1.0, 0.2, 0.0])))
    assert np.allclose(field.values.imag, 0)
