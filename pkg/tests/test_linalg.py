import numpy as np
import pytest

from isopair.bcl import wandering_projections
from isopair.linalg import (
    Subspace,
    hermitian_eig,
    numerical_rank,
    orthonormal_columns,
    random_unitary,
    subspace_intersection,
)

from conftest import two_finite_triple


def random_hermitian(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (z + z.conj().T) / 2


class TestHermitianEig:
    def test_identity(self):
        values, _ = hermitian_eig(np.eye(2))
        assert np.allclose(values, [1.0, 1.0])

    def test_diagonal_input(self):
        values, vectors = hermitian_eig(np.diag([1.0, 0.5, -0.5]))
        assert np.allclose(values, [1.0, 0.5, -0.5])
        # descending order with matching eigenvectors
        recon = vectors @ np.diag(values) @ vectors.conj().T
        assert np.allclose(recon, np.diag([1.0, 0.5, -0.5]))

    def test_reconstruction_random(self, rng):
        a = random_hermitian(8, rng)
        values, vectors = hermitian_eig(a)
        recon = vectors @ np.diag(values) @ vectors.conj().T
        assert np.linalg.norm(a - recon) <= 1e-10 * np.linalg.norm(a)
        assert np.allclose(vectors.conj().T @ vectors, np.eye(8), atol=1e-12)

    def test_phase_normalization(self, rng):
        a = random_hermitian(6, rng)
        _, vectors = hermitian_eig(a)
        for j in range(6):
            v = vectors[:, j]
            pivot = v[int(np.argmax(np.abs(v)))]
            assert abs(pivot.imag) < 1e-12 and pivot.real >= 0

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            hermitian_eig(np.ones((2, 3)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_eigenvalues_invariant_under_conjugation(self, rng):
        a = random_hermitian(7, rng)
        w = random_unitary(7, rng)
        base, _ = hermitian_eig(a)
        conj, _ = hermitian_eig(w @ a @ w.conj().T)
        assert np.max(np.abs(base - conj)) < 1e-8


class TestNumericalRank:
    def test_zero_matrix(self):
        assert numerical_rank(np.zeros((4, 4))) == 0

    def test_outer_product(self, rng):
        v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        w = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        assert numerical_rank(np.outer(v, w.conj())) == 1

    def test_two_finite_defect(self):
        ops = wandering_projections(two_finite_triple(1.0))
        assert numerical_rank(ops.defect) == 2

    def test_custom_tolerance(self):
        a = np.diag([1.0, 1e-6])
        assert numerical_rank(a) == 2
        assert numerical_rank(a, tol=1e-3) == 1


class TestSubspace:
    def test_projector_is_projection(self, rng):
        cols = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
        s = Subspace.from_columns(cols)
        q = s.projector()
        assert np.linalg.norm(q @ q - q) <= 1e-10
        assert np.linalg.norm(q - q.conj().T) <= 1e-10

    def test_rejects_non_orthonormal_basis(self):
        with pytest.raises(ValueError):
            Subspace(2, np.array([[1.0], [1.0]]))

    def test_zero_subspace(self):
        s = Subspace.zero(4)
        assert s.dim == 0
        assert np.linalg.norm(s.projector()) == 0.0


class TestSubspaceIntersection:
    def test_identical_lines(self):
        e1 = np.eye(3)[:, :1]
        s = Subspace(3, e1)
        inter = subspace_intersection(s, s)
        assert inter.dim == 1
        assert abs(abs(np.vdot(inter.basis[:, 0], e1[:, 0])) - 1) < 1e-12

    def test_orthogonal_lines(self):
        s1 = Subspace(3, np.eye(3)[:, :1])
        s2 = Subspace(3, np.eye(3)[:, 1:2])
        assert subspace_intersection(s1, s2).dim == 0

    def test_constructed_shared_vector(self, rng):
        # two 3-dim subspaces of C^6 sharing exactly one constructed vector
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        v /= np.linalg.norm(v)
        extra = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
        s1 = Subspace.from_columns(np.column_stack([v, extra[:, :2]]))
        s2 = Subspace.from_columns(np.column_stack([v, extra[:, 2:]]))
        inter = subspace_intersection(s1, s2)
        assert inter.dim == 1
        angle_cos = abs(np.vdot(inter.basis[:, 0], v))
        assert abs(angle_cos - 1.0) < 1e-8

    def test_symmetry_in_arguments(self, rng):
        a = Subspace.from_columns(rng.standard_normal((5, 2))
                                  + 1j * rng.standard_normal((5, 2)))
        b = Subspace.from_columns(rng.standard_normal((5, 3))
                                  + 1j * rng.standard_normal((5, 3)))
        left = subspace_intersection(a, b)
        right = subspace_intersection(b, a)
        assert left.dim == right.dim
        assert np.linalg.norm(left.projector() - right.projector()) < 1e-8

    def test_ambient_mismatch(self):
        with pytest.raises(ValueError):
            subspace_intersection(Subspace.zero(3), Subspace.zero(4))


def test_orthonormal_columns_rank_cut(rng):
    base = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
    dependent = np.column_stack([base, base @ rng.standard_normal((2, 3))])
    q = orthonormal_columns(dependent)
    assert q.shape == (6, 2)
    assert np.allclose(q.conj().T @ q, np.eye(2), atol=1e-12)


def test_random_unitary_is_unitary_and_seeded():
    rng_a = np.random.default_rng(11)
    rng_b = np.random.default_rng(11)
    u = random_unitary(9, rng_a)
    assert np.linalg.norm(u.conj().T @ u - np.eye(9)) < 1e-12
    assert np.array_equal(u, random_unitary(9, rng_b))
