import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdirac import dirac as dr
from cdirac import subspace as ss
from cdirac.errors import (
    InadmissibleProfile,
    InvalidStructure,
    NotLagrangian,
    NotSkew,
)


def canonical_omega(m):
    om = np.zeros((m, m))
    for j in range(0, m - m % 2, 2):
        om[j, j + 1], om[j + 1, j] = 1.0, -1.0
    return om


def jump_frame(y):
    f = y
    s1 = [1, 0, 0, 0, 1j, 0]
    s2 = [0, np.exp(y), 1j * f, -1j * np.exp(y), 0, 0]
    s3 = [0, 0, 0, 0, f, 1j * np.exp(y)]
    return np.array([s1, s2, s3]).T


def test_symplectic_is_type_zero_gc():
    L = dr.from_presymplectic(canonical_omega(4))
    assert dr.invariants(L).triple == (0, 0, 0)


def test_degenerate_presymplectic_real_index_is_kernel_dimension():
    om = np.zeros((3, 3))
    om[0, 1], om[1, 0] = 1.0, -1.0
    rec = dr.invariants(dr.from_presymplectic(om))
    assert rec.triple == (1, 0, 0)
    assert rec.rank_delta0 == 1


def test_complex_structure_has_maximal_type():
    J = np.zeros((4, 4))
    J[1, 0], J[0, 1], J[3, 2], J[2, 3] = 1, -1, 1, -1
    assert dr.invariants(dr.from_complex_structure(J)).triple == (0, 0, 2)


def test_complex_structure_rejects_non_square_root():
    with pytest.raises(InvalidStructure):
        dr.from_complex_structure(np.eye(2))


def test_cr_structure_has_equal_index_and_order():
    t10 = ss.span([np.array([1, -1j, 0]) / np.sqrt(2)], 3)
    assert dr.invariants(dr.from_cr(t10)).triple == (1, 1, 1)


def test_cr_rejects_real_directions():
    with pytest.raises(InvalidStructure):
        dr.from_cr(ss.span([np.array([1.0, 0, 0])], 3))


def test_transverse_cr_invariants():
    # R = <e3>, S = <e1, e2, e3>, T10 = <e1 - i e2> on R^4
    E = ss.span([np.array([0, 0, 1, 0]), np.array([1, -1j, 0, 0])], 4)
    rec = dr.invariants(dr.from_transverse_cr(E))
    assert rec.triple == (2, 1, 1)
    assert rec.rank_delta == 1


def test_complexified_poisson_graph():
    pi = np.zeros((3, 3))
    pi[0, 1], pi[1, 0] = 1.0, -1.0
    assert dr.invariants(dr.from_poisson(pi)).triple == (3, 1, 0)


def test_complexified_presymplectic_graph():
    om = np.zeros((3, 3))
    om[0, 1], om[1, 0] = 1.0, -1.0
    L = dr.complexify_real_dirac(dr.presymplectic_graph(om))
    # E = V, so the order is 0 and every point is real
    assert dr.invariants(L).triple == (3, 0, 0)


def test_from_frame_rejects_non_isotropic():
    frame = np.vstack([np.eye(2), np.eye(2)])  # d/dx + dx is not isotropic
    with pytest.raises(NotLagrangian):
        dr.DiracPoint.from_frame(frame)


def test_from_frame_rejects_wrong_rank():
    with pytest.raises(NotLagrangian):
        dr.DiracPoint.from_frame(np.eye(4)[:, :1])


def test_make_dirac_rejects_non_skew():
    with pytest.raises(NotSkew):
        dr.make_dirac(ss.full(2), np.eye(2))


def test_graph_data_roundtrip():
    rng = np.random.default_rng(3)
    E = ss.column_span(rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
    eps = np.array([[0, 1 + 2j], [-1 - 2j, 0]])
    L = dr.make_dirac(E, eps)
    assert L.E == E
    coeff = E.basis.conj().T @ L.E.basis
    assert np.allclose(coeff.T @ eps @ coeff, L.eps)
    assert L.eps_residual < 1e-12


def test_jump_field_point_invariants():
    for y, triple, rank_delta in [(0.0, (1, 1, 0), 2), (1.0, (1, 0, 1), 1), (-0.5, (1, 0, 1), 1)]:
        L = dr.DiracPoint.from_frame(jump_frame(y))
        rec = dr.invariants(L)
        assert rec.triple == triple
        assert rec.rank_delta == rank_delta
        assert rec.violations() == []


def test_jump_field_k_generator():
    y = 0.7
    K = dr.k_space(dr.DiracPoint.from_frame(jump_frame(y)))
    expected = ss.real_span([np.array([y, 0, 0, 0, 0, np.exp(y)])], 6)
    assert ss.gap(K, expected) < 1e-10


def test_real_b_transform_preserves_invariants():
    rng = np.random.default_rng(0)
    for cell in [(0, 0, 1), (2, 1, 0), (1, 1, 1)]:
        m = 4 if cell[0] % 2 == 0 else 3
        L = dr.random_lagrangian(m, 5, cell)
        B = dr.random_skew(m, rng)
        assert dr.invariants(dr.b_transform(L, B)).triple == cell


def test_imaginary_b_transform_can_change_real_index():
    # e^{iω} (V*) is still V*, but e^{iω} of (V ⊕ 0)_C = L_{iω}
    m = 2
    L = dr.complexify_real_dirac(dr.presymplectic_graph(np.zeros((m, m))))
    assert dr.invariants(L).r == 2
    assert dr.invariants(dr.b_transform(L, 1j * canonical_omega(m))).r == 0


def test_diffeomorphism_preserves_invariants():
    rng = np.random.default_rng(1)
    L = dr.random_lagrangian(5, 2, (1, 0, 1))
    g = dr.random_gl(5, rng)
    assert dr.invariants(dr.transform(L, g)).triple == (1, 0, 1)


def test_product_is_additive_example():
    t10 = ss.span([np.array([1, -1j, 0]) / np.sqrt(2)], 3)
    L = dr.product(dr.from_cr(t10), dr.from_presymplectic(canonical_omega(2)))
    assert dr.invariants(L).triple == (1, 1, 1)


def test_backward_image_of_symplectic_on_hyperplane():
    L = dr.from_presymplectic(canonical_omega(4))
    phi = np.eye(4)[:, :3]
    img = dr.backward_image(L, phi)
    assert dr.invariants(img).triple == (1, 0, 0)
    assert dr.is_transversal(L, phi)


def test_forward_image_of_product_projection():
    # push L_{iω} × V*_C forward along the projection R^2 × R → R^2
    L = dr.product(dr.from_presymplectic(canonical_omega(2)), dr.from_cr(ss.zero(1)))
    proj = np.eye(3)[:2]
    img = dr.forward_image(L, proj)
    assert ss.gap(img.space, dr.from_presymplectic(canonical_omega(2)).space) < 1e-12


def test_backward_real_matches_complex_on_real_structures():
    om = canonical_omega(4)
    phi = np.eye(4)[:, [0, 1, 3]]
    real = dr.backward_image_real(dr.presymplectic_graph(om), phi)
    cplx = dr.backward_image(dr.complexify_real_dirac(dr.presymplectic_graph(om)), phi)
    assert ss.gap(ss.complexify(real), cplx.space) < 1e-12


def test_admissibility_messages():
    assert dr.admissibility_error(3, 1, 1, 0) is None
    assert "order ≤ real index" in dr.admissibility_error(3, 1, 2, 0)
    assert "parity" in dr.admissibility_error(3, 0, 0, 1)
    assert "type" in dr.admissibility_error(4, 0, 0, 3)


def test_admissible_cell_count():
    # m = 2: (0,0,0), (0,0,1), (2,0,0), (2,1,0), (2,2,0)
    assert dr.admissible_cells(2) == [(0, 0, 0), (0, 0, 1), (2, 0, 0), (2, 1, 0), (2, 2, 0)]


def test_cell_model_reproduces_every_cell():
    for m in range(1, 7):
        for cell in dr.admissible_cells(m):
            L, delta_dim = dr.cell_model(m, *cell)
            rec = dr.invariants(L)
            assert rec.triple == cell
            assert rec.rank_delta == delta_dim


def test_cell_model_rejects_inadmissible():
    with pytest.raises(InadmissibleProfile):
        dr.cell_model(3, 0, 0, 1)


def test_random_lagrangian_is_deterministic():
    a = dr.random_lagrangian(5, 42, (1, 0, 1))
    b = dr.random_lagrangian(5, 42, (1, 0, 1))
    assert np.array_equal(a.basis, b.basis)


def test_gc_operator_squares_to_minus_one():
    L = dr.random_lagrangian(4, 7, (0, 0, 1))
    J = dr.gc_operator(L)
    assert np.allclose(J @ J, -np.eye(8), atol=1e-9)


def test_gc_operator_requires_zero_real_index():
    with pytest.raises(InvalidStructure):
        dr.gc_operator(dr.random_lagrangian(3, 1, (1, 1, 1)))


def test_reduced_structure_is_generalized_complex():
    for cell in [(2, 1, 1), (3, 1, 0), (2, 0, 1)]:
        L = dr.random_lagrangian(6 if cell[0] % 2 == 0 else 5, 11, cell)
        red = dr.reduced_gc(L)
        assert red.dim_v == L.dim_v - cell[0]
        assert dr.invariants(red).triple == (0, 0, cell[2])


def test_point_space_is_unit_for_product():
    L = dr.random_lagrangian(3, 4, (1, 1, 1))
    assert ss.gap(dr.product(dr.point_space(), L).space, L.space) < 1e-12


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**31))
def test_identities_hold_on_random_structures(m, seed):
    L = dr.random_lagrangian(m, seed)
    assert dr.invariants(L).violations() == []


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**31))
def test_conjugate_has_same_invariants(m, seed):
    L = dr.random_lagrangian(m, seed)
    assert dr.invariants(L.conjugate()).triple == dr.invariants(L).triple


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31))
def test_product_additivity(m1, m2, seed):
    a = dr.random_lagrangian(m1, seed)
    b = dr.random_lagrangian(m2, seed + 1)
    ra, rb = dr.invariants(a), dr.invariants(b)
    rc = dr.invariants(dr.product(a, b))
    assert rc.triple == tuple(x + y for x, y in zip(ra.triple, rb.triple))
