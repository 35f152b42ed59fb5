import numpy as np
import pytest

from isopair.bcl import BCLTriple, random_triple
from isopair.classify import check_compact_normal
from isopair.linalg import random_unitary
from isopair.spectral import DiffProjCanonicalForm


def find_non_normal_triple() -> BCLTriple:
    """Seeded search for a triple whose cross-commutator is not normal."""
    for seed in range(200):
        triple = random_triple(5, 2, seed)
        report = check_compact_normal(triple)
        if not report.ok and report.normality_residual > 1e-2:
            return triple
    raise AssertionError("no non-normal triple found in the seed range")


def two_finite_triple(alpha: complex) -> BCLTriple:
    """The 2x2 triple whose defect is diag(1, -1) and cross eigenvalue conj(alpha)."""
    u = np.array([[0.0, 1.0], [alpha, 0.0]], dtype=complex)
    p = np.diag([1.0, 0.0]).astype(complex)
    return BCLTriple(2, u, p)


def random_projection(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    cols = random_unitary(dim, rng)[:, :rank]
    return cols @ cols.conj().T


def random_canonical_form(seed: int, max_generic: int = 8) -> DiffProjCanonicalForm:
    """Random difference-of-projections parameters with dim K <= max_generic.

    The diagonal gets a few repeated entries so the commuting unitary can mix
    inside eigenblocks instead of being forced diagonal.
    """
    rng = np.random.default_rng(seed)
    kernel_dim = int(rng.integers(0, 4))
    dim_plus1 = int(rng.integers(0, 3))
    dim_minus1 = int(rng.integers(0, 3))
    generic = int(rng.integers(0, max_generic + 1))

    distinct = rng.uniform(0.05, 0.95, size=max(1, generic))
    entries = []
    while len(entries) < generic:
        value = float(rng.choice(distinct))
        repeat = int(rng.integers(1, 3))
        entries.extend([value] * min(repeat, generic - len(entries)))
    entries.sort()
    diag = np.diag(np.array(entries[:generic], dtype=complex))

    # Block-Haar unitary per repeated diagonal value commutes with diag.
    uc = np.zeros((generic, generic), dtype=complex)
    start = 0
    while start < generic:
        stop = start
        while stop < generic and abs(entries[stop] - entries[start]) < 1e-14:
            stop += 1
        uc[start:stop, start:stop] = random_unitary(stop - start, rng)
        start = stop

    kernel_rank = int(rng.integers(0, kernel_dim + 1)) if kernel_dim else 0
    kernel_proj = random_projection(kernel_dim, kernel_rank, rng) if kernel_dim \
        else np.zeros((0, 0), dtype=complex)

    return DiffProjCanonicalForm(
        kernel_dim=kernel_dim,
        dim_plus1=dim_plus1,
        dim_minus1=dim_minus1,
        diag=diag,
        kernel_proj=kernel_proj,
        commuting_unitary=uc,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
