import numpy as np
import pytest

from isopair.bcl import BCLTriple, random_triple, wandering_projections
from isopair.spectral import (
    DiffProjCanonicalForm,
    build_difference_projections,
    check_rank_formula,
    cluster_values,
    eigen_symmetry_check,
    spectral_profile,
)

from conftest import random_canonical_form, random_projection, two_finite_triple


def test_cluster_values_chains_adjacent():
    clusters = cluster_values([1.0, 1.0 + 5e-9, 0.5, -0.2], tol=1e-8)
    assert [len(ix) for _, ix in clusters] == [2, 1, 1]
    assert clusters[0][0] == pytest.approx(1.0, abs=1e-8)


class TestSpectralProfile:
    def test_three_point_spectrum(self):
        profile = spectral_profile(np.diag([1.0, 0.5, -0.5]))
        assert profile.dim_plus1 == 1
        assert profile.dim_minus1 == 0
        assert len(profile.interior_pairs) == 1
        pair = profile.interior_pairs[0]
        assert pair.value == pytest.approx(0.5)
        assert (pair.mult_pos, pair.mult_neg) == (1, 1)
        assert profile.dim_kplus == 1
        assert profile.symmetric

    def test_zero_matrix(self):
        profile = spectral_profile(np.zeros((4, 4)))
        assert profile.kernel_dim == 4
        assert profile.dim_plus1 == profile.dim_minus1 == 0
        assert not profile.interior_pairs

    def test_dimension_bookkeeping(self):
        profile = spectral_profile(np.diag([1.0, 1.0, 0.3, -0.3, 0.0, -1.0]))
        assert profile.counted_dim() == 6
        assert profile.dim_plus1 == 2 and profile.dim_minus1 == 1

    def test_unpaired_interior_flags(self):
        profile = spectral_profile(np.diag([0.4, 0.0]))
        assert not profile.symmetric

    def test_rejects_expansion(self):
        with pytest.raises(ValueError, match="contraction"):
            spectral_profile(np.diag([2.0, 0.0]))

    def test_random_defects_never_asymmetric(self):
        # eigenvalue symmetry of differences of projections, at scale
        for seed in range(300):
            dim = 2 + seed % 11
            ops = wandering_projections(random_triple(dim, (seed % dim) + 0, seed))
            assert spectral_profile(ops.defect).symmetric


class TestRankFormula:
    def test_doubly_commuting_trivial(self, rng):
        p = random_projection(4, 2, rng)
        report = check_rank_formula(BCLTriple(4, np.eye(4), p))
        assert report.rank_defect == report.rank_cross == 0
        assert report.dim_plus1 == report.dim_kplus == 0
        assert report.both_identities_hold

    def test_two_finite_numbers(self):
        report = check_rank_formula(two_finite_triple(np.exp(0.9j)))
        assert (report.rank_defect, report.rank_cross) == (2, 1)
        assert (report.dim_plus1, report.dim_minus1) == (1, 1)
        assert report.dim_kplus == 0
        assert report.both_identities_hold

    def test_random_triples(self):
        for seed in range(60):
            dim = 2 + seed % 9
            report = check_rank_formula(random_triple(dim, seed % (dim + 1), seed))
            assert report.both_identities_hold


class TestDifferenceProjections:
    def test_no_generic_part(self):
        form = DiffProjCanonicalForm(
            kernel_dim=1, dim_plus1=1, dim_minus1=0,
            diag=np.zeros((0, 0)), kernel_proj=np.zeros((1, 1)),
            commuting_unitary=np.zeros((0, 0)),
        )
        a, p, q = build_difference_projections(form)
        assert np.allclose(a, np.diag([0.0, 1.0]))
        assert np.allclose(p, np.diag([0.0, 1.0]))
        assert np.allclose(q, np.zeros((2, 2)))

    def test_half_contraction_block(self):
        # 1-dim generic part with D = 0.5 pins the 2x2 blocks exactly
        form = DiffProjCanonicalForm(
            kernel_dim=0, dim_plus1=0, dim_minus1=0,
            diag=np.diag([0.5]).astype(complex),
            kernel_proj=np.zeros((0, 0)),
            commuting_unitary=np.eye(1, dtype=complex),
        )
        a, p, q = build_difference_projections(form)
        root = np.sqrt(0.75)
        assert np.allclose(p, 0.5 * np.array([[1.5, root], [root, 0.5]]))
        assert np.allclose(q, 0.5 * np.array([[0.5, root], [root, 1.5]]))
        assert np.allclose(a, np.diag([0.5, -0.5]))

    @pytest.mark.parametrize("seed", range(25))
    def test_random_forms_contract(self, seed):
        form = random_canonical_form(seed)
        a, p, q = build_difference_projections(form)
        for m in (p, q):
            assert np.linalg.norm(m @ m - m) <= 1e-10
            assert np.linalg.norm(m - m.conj().T) <= 1e-10
        assert np.linalg.norm(a - (p - q)) <= 1e-10
        k = form.generic_dim
        if k:
            generic_p = p[-2 * k:, -2 * k:]
            generic_q = q[-2 * k:, -2 * k:]
            assert np.linalg.matrix_rank(generic_p, tol=1e-10) == k
            assert np.linalg.matrix_rank(generic_q, tol=1e-10) == k

    def test_rejects_noncommuting_unitary(self):
        diag = np.diag([0.3, 0.7]).astype(complex)
        swap = np.array([[0, 1], [1, 0]], dtype=complex)
        with pytest.raises(ValueError, match="commute"):
            DiffProjCanonicalForm(0, 0, 0, diag, np.zeros((0, 0)), swap)

    def test_rejects_non_strict_contraction(self):
        with pytest.raises(ValueError, match="strictly inside"):
            DiffProjCanonicalForm(0, 0, 0, np.diag([1.0]).astype(complex),
                                  np.zeros((0, 0)), np.eye(1, dtype=complex))


class TestEigenSymmetry:
    def test_constructed_pair_at_point_three(self):
        form = DiffProjCanonicalForm(
            kernel_dim=0, dim_plus1=0, dim_minus1=0,
            diag=np.diag([0.3]).astype(complex),
            kernel_proj=np.zeros((0, 0)),
            commuting_unitary=np.eye(1, dtype=complex),
        )
        a, p, q = build_difference_projections(form)
        report = eigen_symmetry_check(a, p, q)
        assert report.ok
        assert report.pairs == ((pytest.approx(0.3), 1, 1),)

    def test_no_interior_is_vacuous(self):
        a = np.diag([1.0, -1.0])
        p = np.diag([1.0, 0.0])
        q = np.diag([0.0, 1.0])
        report = eigen_symmetry_check(a, p, q)
        assert report.ok and report.interior_count == 0

    def test_random_projection_pairs(self, rng):
        for _ in range(200):
            p = random_projection(10, int(rng.integers(0, 11)), rng)
            q = random_projection(10, int(rng.integers(0, 11)), rng)
            assert eigen_symmetry_check(p - q, p, q).ok

    def test_rejects_non_difference(self):
        p = np.diag([1.0, 0.0])
        with pytest.raises(ValueError):
            eigen_symmetry_check(np.diag([0.5, 0.0]), p, p)


def test_reconstruction_property():
    # A equals P - Q for every valid canonical form
    for seed in range(40):
        form = random_canonical_form(seed, max_generic=6)
        a, p, q = build_difference_projections(form)
        assert np.linalg.norm(a - (p - q)) <= 1e-10
