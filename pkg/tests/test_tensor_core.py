import math

import numpy as np
import pytest

from rankgauge import (
    Bipartition,
    HermitianOp,
    PureState,
    UsageError,
    basis_state,
    canonical_bipartitions,
    haar_random_state,
    hermitian_eig,
    inner_product,
    kron_chain,
    reshape_bipartite,
    schmidt_coefficients,
    schmidt_rank,
    svd_complex,
    trace_norm,
    unitary_from_hamiltonian,
)


def ket(d, i):
    amp = np.zeros(d, dtype=complex)
    amp[i] = 1.0
    return PureState((d,), amp)


def random_hermitian(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2.0


class TestPureState:
    def test_normalized_flag(self):
        s = PureState((2,), [1.0, 0.0])
        assert s.normalized
        t = PureState((2,), [1.0, 1.0])
        assert not t.normalized
        assert t.normalize().normalized

    def test_rejects_bad_dims(self):
        with pytest.raises(UsageError):
            PureState((1,), [1.0])
        with pytest.raises(UsageError):
            PureState((), [])
        with pytest.raises(UsageError):
            PureState((2, 2), [1.0, 0.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(UsageError):
            PureState((2,), [np.nan, 0.0])
        with pytest.raises(UsageError):
            PureState((2,), [np.inf, 0.0])

    def test_amplitudes_immutable(self):
        s = PureState((2,), [1.0, 0.0])
        with pytest.raises(ValueError):
            s.amp[0] = 2.0


class TestKronChain:
    def test_basis_product(self):
        out = kron_chain([ket(2, 0), ket(2, 0)])
        assert out.dims == (2, 2)
        np.testing.assert_allclose(out.amp, [1, 0, 0, 0])

    def test_uniform_product(self):
        plus = PureState((2,), np.array([1.0, 1.0]) / np.sqrt(2))
        out = kron_chain([plus, plus])
        np.testing.assert_allclose(out.amp, [0.5, 0.5, 0.5, 0.5], atol=1e-15)

    def test_norm_multiplicative(self, rng):
        for _ in range(20):
            factors = [haar_random_state((d,), rng) for d in (2, 3)]
            assert abs(kron_chain(factors).norm() - 1.0) < 1e-12

    def test_party_one_slowest(self):
        out = kron_chain([ket(2, 1), ket(3, 0)])
        assert out.amp[np.ravel_multi_index((1, 0), (2, 3))] == 1.0

    def test_errors(self):
        with pytest.raises(UsageError):
            kron_chain([])
        with pytest.raises(UsageError):
            kron_chain([basis_state((2, 2), (0, 0))])


class TestInnerProduct:
    def test_orthogonal(self):
        assert inner_product(ket(2, 0), ket(2, 1)) == 0.0

    def test_self_overlap(self, rng):
        s = haar_random_state((2, 3), rng)
        assert abs(inner_product(s, s) - 1.0) < 1e-12

    def test_conjugate_symmetry(self, rng):
        for _ in range(10):
            a = haar_random_state((2, 2), rng)
            b = haar_random_state((2, 2), rng)
            assert abs(inner_product(a, b) - np.conj(inner_product(b, a))) < 1e-14

    def test_dims_mismatch(self):
        with pytest.raises(UsageError):
            inner_product(ket(2, 0), ket(3, 0))


class TestBipartition:
    def test_validation(self):
        with pytest.raises(UsageError):
            Bipartition((1, 2), (2, 3))
        with pytest.raises(UsageError):
            Bipartition((), (1, 2))
        cut = Bipartition.of([2], 3)
        assert cut.left == (2,) and cut.right == (1, 3)

    def test_canonical_enumeration(self):
        for n in (2, 3, 4):
            cuts = canonical_bipartitions(n)
            assert len(cuts) == 2 ** (n - 1) - 1
            assert all(c.left[0] == 1 for c in cuts)
            assert len(set(cuts)) == len(cuts)


class TestReshapeBipartite:
    def test_bell(self):
        bell = PureState((2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
        m = reshape_bipartite(bell, Bipartition.of([1], 2))
        np.testing.assert_allclose(m, np.eye(2) / np.sqrt(2))

    def test_ghz3(self):
        amp = np.zeros(8)
        amp[[0, 7]] = 1 / np.sqrt(2)
        ghz = PureState((2, 2, 2), amp)
        m = reshape_bipartite(ghz, Bipartition.of([1], 3))
        assert m.shape == (2, 4)
        expected = np.zeros((2, 4))
        expected[0, 0] = expected[1, 3] = 1 / np.sqrt(2)
        np.testing.assert_allclose(m, expected)

    def test_frobenius_preserved(self, rng):
        s = haar_random_state((2, 3, 2), rng)
        for cut in canonical_bipartitions(3):
            m = reshape_bipartite(s, cut)
            assert abs(np.linalg.norm(m) - s.norm()) < 1e-13

    def test_invalid_cut(self):
        s = basis_state((2, 2), (0, 0))
        with pytest.raises(UsageError):
            reshape_bipartite(s, Bipartition.of([1], 3))


class TestSchmidt:
    def test_bell(self):
        bell = PureState((2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
        lam = schmidt_coefficients(bell, Bipartition.of([1], 2))
        np.testing.assert_allclose(lam, [1 / np.sqrt(2)] * 2)
        assert schmidt_rank(bell, Bipartition.of([1], 2)) == 2

    def test_product(self):
        s = basis_state((2, 2), (0, 0))
        lam = schmidt_coefficients(s, Bipartition.of([1], 2))
        np.testing.assert_allclose(lam, [1.0, 0.0], atol=1e-15)
        assert schmidt_rank(s, Bipartition.of([1], 2)) == 1

    def test_against_reduced_density_matrix(self, rng):
        # independent oracle: squared coefficients are the eigenvalues of
        # rho_A = M M^dag
        s = haar_random_state((3, 4), rng)
        cut = Bipartition.of([1], 2)
        lam = schmidt_coefficients(s, cut)
        m = reshape_bipartite(s, cut)
        ev = np.sort(np.linalg.eigvalsh(m @ m.conj().T))[::-1]
        np.testing.assert_allclose(lam**2, ev, atol=1e-12)

    def test_squares_sum_to_one(self, rng):
        for dims in [(2, 2), (2, 3, 2), (3, 3, 3)]:
            s = haar_random_state(dims, rng)
            for cut in canonical_bipartitions(len(dims)):
                lam = schmidt_coefficients(s, cut)
                assert abs(np.sum(lam**2) - 1.0) < 1e-10

    def test_requires_normalized(self):
        s = PureState((2, 2), [1.0, 0, 0, 1.0])
        with pytest.raises(UsageError):
            schmidt_coefficients(s, Bipartition.of([1], 2))


class TestSvd:
    def test_identity(self):
        _, s, _ = svd_complex(np.eye(2))
        np.testing.assert_allclose(s, [1.0, 1.0])

    def test_diag(self):
        _, s, _ = svd_complex(np.diag([3.0, 0.0]))
        np.testing.assert_allclose(s, [3.0, 0.0])

    def test_reconstruction_random(self, rng):
        m = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
        u, s, vh = svd_complex(m)
        smat = np.zeros((4, 6))
        np.fill_diagonal(smat, s)
        assert np.linalg.norm(m - u @ smat @ vh) < 1e-10
        assert np.linalg.norm(u @ u.conj().T - np.eye(4)) < 1e-10
        assert np.linalg.norm(vh @ vh.conj().T - np.eye(6)) < 1e-10
        assert np.all(np.diff(s) <= 0)

    def test_large_dim(self, rng):
        m = rng.standard_normal((120, 200)) + 1j * rng.standard_normal((120, 200))
        u, s, vh = svd_complex(m)
        smat = np.zeros((120, 200))
        np.fill_diagonal(smat, s)
        assert np.linalg.norm(m - u @ smat @ vh) / np.linalg.norm(m) < 1e-12


class TestHermitianEig:
    def test_pauli_z(self):
        w, _ = hermitian_eig(np.diag([1.0, -1.0]))
        np.testing.assert_allclose(w, [1.0, -1.0])

    def test_zero(self):
        w, _ = hermitian_eig(np.zeros((3, 3)))
        np.testing.assert_allclose(w, 0.0)

    def test_reconstruction(self, rng):
        for dim in (8, 200):
            h = random_hermitian(dim, rng)
            w, v = hermitian_eig(h)
            assert np.all(np.diff(w) <= 1e-12)
            assert np.linalg.norm((v * w) @ v.conj().T - h) < 1e-10 * max(1, dim / 8)
            assert np.linalg.norm(v @ v.conj().T - np.eye(dim)) < 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(UsageError):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_hermitian_op_stores_exact_hermitian_part(self, rng):
        h = random_hermitian(5, rng) + 1e-9 * rng.standard_normal((5, 5))
        op = HermitianOp(h)
        assert np.max(np.abs(op.matrix - op.matrix.conj().T)) < 1e-15


class TestUnitaryFromHamiltonian:
    def test_zero(self):
        np.testing.assert_allclose(unitary_from_hamiltonian(np.zeros((3, 3))), np.eye(3))

    def test_scalar_phase(self):
        u = unitary_from_hamiltonian(np.diag([np.pi, 0.0]))
        np.testing.assert_allclose(u, np.diag([-1.0 + 0j, 1.0 + 0j]), atol=1e-14)

    def test_unitarity(self, rng):
        h = random_hermitian(9, rng)
        u = unitary_from_hamiltonian(h)
        assert np.linalg.norm(u @ u.conj().T - np.eye(9)) < 1e-10

    def test_group_property(self, rng):
        h = random_hermitian(6, rng) * 0.1
        u1 = unitary_from_hamiltonian(h)
        u3 = unitary_from_hamiltonian(3.0 * h)
        assert np.max(np.abs(u1 @ u1 @ u1 - u3)) < 1e-8


class TestTraceNorm:
    def test_pauli_z(self):
        assert trace_norm(np.diag([1.0, -1.0])) == pytest.approx(2.0)

    def test_zero(self):
        assert trace_norm(np.zeros((4, 4))) == 0.0

    def test_against_eigvalsh(self, rng):
        h = random_hermitian(7, rng)
        assert trace_norm(h) == pytest.approx(np.sum(np.abs(np.linalg.eigvalsh(h))), abs=1e-12)
