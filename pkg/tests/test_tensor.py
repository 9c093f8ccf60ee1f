import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavdot.errors import DomainError, InvalidDimensionError
from cavdot.tensor import (
    DensityMatrix,
    QOperator,
    SubsystemLayout,
    add_scaled,
    adjoint,
    annihilation,
    embed,
    hermitian_eigenvalues,
    multiply,
    single_site_layout,
    trace,
)


def random_qop(rng, layout):
    n = layout.total_dim
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return QOperator(layout, m)


class TestLayout:
    def test_total_dim_is_product(self):
        lay = SubsystemLayout.standard(24, 4)
        assert lay.total_dim == 2 * 2 * 24 * 4 * 4 == 1536

    def test_rejects_small_levels(self):
        with pytest.raises(InvalidDimensionError):
            SubsystemLayout(dims=(2, 1), sites=("a", "b"))

    def test_site_lookup(self):
        lay = SubsystemLayout.standard(3, 2)
        assert lay.site_index("plasmon") == 2
        assert lay.site_index(4) == 4
        with pytest.raises(InvalidDimensionError):
            lay.site_index("nope")


class TestAnnihilation:
    def test_two_level_lowering(self):
        a = annihilation(2).toarray()
        assert np.array_equal(a, np.array([[0, 1], [0, 0]], dtype=complex))

    def test_three_level_ladder(self):
        a = annihilation(3).toarray()
        expected = np.zeros((3, 3), dtype=complex)
        expected[0, 1] = 1.0
        expected[1, 2] = np.sqrt(2.0)
        assert np.allclose(a, expected, atol=0)

    def test_number_operator(self):
        a = annihilation(4)
        n = multiply(adjoint(a), a).toarray()
        assert np.allclose(n, np.diag([0.0, 1.0, 2.0, 3.0]), atol=1e-15)

    def test_rejects_single_level(self):
        with pytest.raises(InvalidDimensionError):
            annihilation(1)

    def test_commutator_on_truncated_ladder(self):
        # [b, b_dag] = I except the (n-1, n-1) corner
        n = 5
        b = annihilation(n)
        comm = (multiply(b, adjoint(b)).toarray()
                - multiply(adjoint(b), b).toarray())
        expected = np.eye(n, dtype=complex)
        expected[n - 1, n - 1] = -(n - 1.0)
        assert np.allclose(comm, expected, atol=1e-14)


class TestEmbed:
    def test_sigma_on_first_site(self):
        lay = SubsystemLayout(dims=(2, 2), sites=("a", "b"))
        s = annihilation(2)
        full = embed(s, "a", lay).toarray()
        expected = np.kron(s.toarray(), np.eye(2))
        assert np.array_equal(full, expected)

    def test_identity_embeds_to_identity(self):
        lay = SubsystemLayout(dims=(2, 2, 3), sites=("a", "b", "c"))
        ident = QOperator(single_site_layout(2), np.eye(2, dtype=complex))
        for site in ("a", "b"):
            assert np.array_equal(embed(ident, site, lay).toarray(), np.eye(12))

    def test_number_eigenstate(self):
        lay = SubsystemLayout(dims=(2, 2, 3), sites=("a", "b", "c"))
        a3 = annihilation(3)
        n3 = multiply(adjoint(a3), a3)
        full = embed(n3, "c", lay)
        ket = np.zeros(12)
        ket[2] = 1.0  # |0, 0, 2>
        assert np.allclose(full.toarray() @ ket, 2.0 * ket, atol=0)

    def test_dimension_mismatch(self):
        lay = SubsystemLayout(dims=(2, 3), sites=("a", "b"))
        with pytest.raises(InvalidDimensionError):
            embed(annihilation(2), "b", lay)

    def test_embeds_on_distinct_sites_commute_exactly(self):
        rng = np.random.default_rng(7)
        lay = SubsystemLayout(dims=(2, 3, 2), sites=("a", "b", "c"))
        for s1, s2 in (("a", "b"), ("a", "c"), ("b", "c")):
            op1 = random_qop(rng, single_site_layout(lay.dims[lay.site_index(s1)]))
            op2 = random_qop(rng, single_site_layout(lay.dims[lay.site_index(s2)]))
            e1 = embed(op1, s1, lay)
            e2 = embed(op2, s2, lay)
            left = multiply(e1, e2).toarray()
            right = multiply(e2, e1).toarray()
            assert np.array_equal(left, right)


class TestAlgebra:
    def test_adjoint_of_lowering(self):
        ad = adjoint(annihilation(2)).toarray()
        assert np.array_equal(ad, np.array([[0, 0], [1, 0]], dtype=complex))

    def test_trace_identity(self):
        lay = SubsystemLayout(dims=(3, 2), sites=("a", "b"))
        ident = QOperator(lay, np.eye(6, dtype=complex))
        assert trace(ident) == 6.0

    def test_sigma_dag_sigma(self):
        s = annihilation(2)
        assert np.allclose(multiply(adjoint(s), s).toarray(), np.diag([0.0, 1.0]), atol=0)

    def test_dimension_mismatch_rejected(self):
        a = annihilation(2)
        b = annihilation(3)
        with pytest.raises(InvalidDimensionError):
            multiply(a, b)
        with pytest.raises(InvalidDimensionError):
            add_scaled(a, 1.0, b)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_trace_cyclic(self, seed):
        rng = np.random.default_rng(seed)
        lay = SubsystemLayout(dims=(4, 2), sites=("a", "b"))
        a = random_qop(rng, lay)
        b = random_qop(rng, lay)
        tab = trace(multiply(a, b))
        tba = trace(multiply(b, a))
        assert abs(tab - tba) < 1e-12 * max(1.0, abs(tab))

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_adjoint_involution_exact(self, seed):
        rng = np.random.default_rng(seed)
        lay = SubsystemLayout(dims=(2, 3), sites=("a", "b"))
        a = random_qop(rng, lay)
        assert np.array_equal(adjoint(adjoint(a)).toarray(), a.toarray())


class TestHermitianEigenvalues:
    def test_diagonal(self):
        lay = single_site_layout(3)
        op = QOperator(lay, np.diag([3.0, 1.0, 2.0]).astype(complex))
        assert np.allclose(hermitian_eigenvalues(op), [3.0, 2.0, 1.0], atol=1e-12)

    def test_pauli_x(self):
        lay = single_site_layout(2)
        op = QOperator(lay, np.array([[0, 1], [1, 0]], dtype=complex))
        assert np.allclose(hermitian_eigenvalues(op), [1.0, -1.0], atol=1e-12)

    def test_bell_projector(self):
        psi = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
        lay = SubsystemLayout(dims=(2, 2), sites=("a", "b"))
        op = QOperator(lay, np.outer(psi, psi).astype(complex))
        assert np.allclose(hermitian_eigenvalues(op), [1.0, 0.0, 0.0, 0.0], atol=1e-12)

    def test_rejects_non_hermitian(self):
        lay = single_site_layout(2)
        op = QOperator(lay, np.array([[0, 1], [0, 0]], dtype=complex))
        with pytest.raises(DomainError):
            hermitian_eigenvalues(op)


class TestDensityMatrix:
    def test_normalizes_trace(self):
        lay = single_site_layout(2)
        dm = DensityMatrix(QOperator(lay, np.diag([2.0, 2.0]).astype(complex)))
        assert abs(np.trace(dm.matrix()) - 1.0) < 1e-12

    def test_rejects_non_hermitian(self):
        lay = single_site_layout(2)
        with pytest.raises(DomainError):
            DensityMatrix(QOperator(lay, np.array([[1, 1], [0, 0]], dtype=complex)))

    def test_ground_state(self):
        lay = SubsystemLayout.standard(3, 2)
        dm = DensityMatrix.ground_state(lay)
        m = dm.matrix()
        assert m[0, 0] == 1.0 and np.count_nonzero(m) == 1
