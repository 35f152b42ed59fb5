"""Spectral analysis of defect operators.

Defect operators of isometric pairs are Hermitian contractions that arise as
differences of two orthogonal projections.  Their spectrum therefore splits
into the eigenvalue-1 and eigenvalue-(-1) parts, a kernel, and interior
eigenvalues that come in symmetric ``+lambda / -lambda`` pairs of equal
multiplicity.  This module extracts that profile, checks the two rank
identities tying the defect rank to the cross-commutator rank, and builds
the canonical difference-of-two-projections model from its parameters.
"""

from dataclasses import dataclass

import numpy as np

from .bcl import BCLTriple, wandering_projections
from .linalg import Subspace, as_complex, hermitian_eig, numerical_rank


def cluster_values(values, tol: float) -> list[tuple[float, list[int]]]:
    """Group real values into clusters whose sorted neighbours differ <= tol.

    Returns ``(mean, indices)`` per cluster, ordered by descending mean.
    Indices refer to positions in the input sequence.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    order = np.argsort(values)[::-1]
    clusters: list[list[int]] = [[int(order[0])]]
    for idx in order[1:]:
        idx = int(idx)
        if abs(values[idx] - values[clusters[-1][-1]]) <= tol:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return [(float(np.mean(values[c])), c) for c in clusters]


@dataclass(frozen=True)
class InteriorPair:
    """One symmetric interior eigenvalue cluster ``+value / -value``.

    ``mult_pos`` or ``mult_neg`` is zero when the matching side is missing;
    the owning profile then flags the asymmetry.
    """

    value: float
    mult_pos: int
    mult_neg: int
    basis_pos: Subspace
    basis_neg: Subspace


@dataclass(frozen=True)
class SpectralProfile:
    """Eigen-data of a Hermitian contraction, split by spectral region."""

    ambient_dim: int
    dim_plus1: int
    dim_minus1: int
    basis_plus1: Subspace
    basis_minus1: Subspace
    interior_pairs: tuple[InteriorPair, ...]
    dim_kplus: int
    kernel_dim: int
    symmetric: bool

    def counted_dim(self) -> int:
        interior = sum(p.mult_pos + p.mult_neg for p in self.interior_pairs)
        return self.dim_plus1 + self.dim_minus1 + interior + self.kernel_dim


def spectral_profile(defect, cluster_tol: float = 1e-8) -> SpectralProfile:
    """Cluster the spectrum of a Hermitian contraction at ``{-1, 0, +1}`` and pairs.

    Eigenvalues within ``cluster_tol`` of +1, -1 or 0 land in the
    corresponding cluster; the rest are interior and are greedily paired,
    largest first, with a negated cluster within ``cluster_tol``.  An
    unpaired interior cluster (or a multiplicity mismatch) clears the
    ``symmetric`` flag instead of raising: genuine defect operators never
    trip it, so a set flag is diagnostic data.
    """
    defect = as_complex(defect)
    values, vectors = hermitian_eig(defect)
    n = defect.shape[0]
    if values.size and float(np.max(np.abs(values))) > 1.0 + 1e-8:
        raise ValueError("operator norm exceeds 1 beyond tolerance; not a contraction")

    plus_mask = values >= 1.0 - cluster_tol
    minus_mask = values <= -1.0 + cluster_tol
    kernel_mask = np.abs(values) <= cluster_tol
    interior_mask = ~(plus_mask | minus_mask | kernel_mask)

    basis_plus = Subspace(n, vectors[:, plus_mask])
    basis_minus = Subspace(n, vectors[:, minus_mask])

    interior_idx = np.flatnonzero(interior_mask)
    pos_idx = [int(i) for i in interior_idx if values[i] > 0]
    neg_idx = [int(i) for i in interior_idx if values[i] < 0]

    pos_clusters = [
        (mean, [pos_idx[j] for j in local])
        for mean, local in cluster_values([values[i] for i in pos_idx], cluster_tol)
    ]
    neg_clusters = [
        (mean, [neg_idx[j] for j in local])
        for mean, local in cluster_values([values[i] for i in neg_idx], cluster_tol)
    ]

    pairs: list[InteriorPair] = []
    symmetric = True
    used = [False] * len(neg_clusters)
    for mean, members in pos_clusters:
        match = None
        for j, (neg_mean, _) in enumerate(neg_clusters):
            if not used[j] and abs(mean + neg_mean) <= cluster_tol:
                match = j
                break
        if match is None:
            symmetric = False
            pairs.append(InteriorPair(mean, len(members), 0,
                                      Subspace(n, vectors[:, members]),
                                      Subspace.zero(n)))
            continue
        used[match] = True
        neg_members = neg_clusters[match][1]
        if len(neg_members) != len(members):
            symmetric = False
        pairs.append(InteriorPair(mean, len(members), len(neg_members),
                                  Subspace(n, vectors[:, members]),
                                  Subspace(n, vectors[:, neg_members])))
    for j, (neg_mean, neg_members) in enumerate(neg_clusters):
        if used[j]:
            continue
        symmetric = False
        pairs.append(InteriorPair(-neg_mean, 0, len(neg_members),
                                  Subspace.zero(n),
                                  Subspace(n, vectors[:, neg_members])))

    return SpectralProfile(
        ambient_dim=n,
        dim_plus1=basis_plus.dim,
        dim_minus1=basis_minus.dim,
        basis_plus1=basis_plus,
        basis_minus1=basis_minus,
        interior_pairs=tuple(pairs),
        dim_kplus=sum(p.mult_pos for p in pairs),
        kernel_dim=int(np.count_nonzero(kernel_mask)),
        symmetric=symmetric,
    )


@dataclass(frozen=True)
class RankFormulaReport:
    """Both rank identities for one pair, with the numbers behind them.

    ``sum_identity``:        rankC == rankX + dimE1 + dimK+
    ``difference_identity``: rankC == 2 rankX + dimE1 - dimE-1
    """

    rank_defect: int
    rank_cross: int
    dim_plus1: int
    dim_minus1: int
    dim_kplus: int
    sum_identity_ok: bool
    difference_identity_ok: bool

    @property
    def both_identities_hold(self) -> bool:
        return self.sum_identity_ok and self.difference_identity_ok


def check_rank_formula(
    triple: BCLTriple,
    rank_tol: float | None = None,
    cluster_tol: float = 1e-8,
) -> RankFormulaReport:
    """Evaluate both rank identities for a triple; failures are reported, never hidden."""
    ops = wandering_projections(triple)
    rank_defect = numerical_rank(ops.defect, rank_tol)
    rank_cross = numerical_rank(ops.cross, rank_tol)
    profile = spectral_profile(ops.defect, cluster_tol)
    return RankFormulaReport(
        rank_defect=rank_defect,
        rank_cross=rank_cross,
        dim_plus1=profile.dim_plus1,
        dim_minus1=profile.dim_minus1,
        dim_kplus=profile.dim_kplus,
        sum_identity_ok=(
            rank_defect == rank_cross + profile.dim_plus1 + profile.dim_kplus
        ),
        difference_identity_ok=(
            rank_defect
            == 2 * rank_cross + profile.dim_plus1 - profile.dim_minus1
        ),
    )


@dataclass(frozen=True)
class DiffProjCanonicalForm:
    """Parameters of the canonical difference-of-two-projections model.

    The model acts on ``kernel + plus1 + minus1 + K + K`` where ``K`` is the
    generic part: ``diag`` is a strictly positive diagonal contraction on K,
    ``kernel_proj`` is an arbitrary projection on the kernel block, and
    ``commuting_unitary`` is a unitary on K that commutes with ``diag``.
    """

    kernel_dim: int
    dim_plus1: int
    dim_minus1: int
    diag: np.ndarray
    kernel_proj: np.ndarray
    commuting_unitary: np.ndarray

    def __post_init__(self):
        diag = as_complex(self.diag)
        kernel_proj = as_complex(self.kernel_proj)
        unitary = as_complex(self.commuting_unitary)
        k = diag.shape[0]
        if diag.shape != (k, k) or np.linalg.norm(diag - np.diag(np.diagonal(diag))) > 1e-12:
            raise ValueError("diag must be a square diagonal matrix")
        d = np.diagonal(diag).real
        if np.linalg.norm(np.diagonal(diag).imag) > 1e-10:
            raise ValueError("diag must be real")
        if k and (np.min(d) <= 1e-10 or np.max(d) >= 1.0 - 1e-10):
            raise ValueError("diag entries must lie strictly inside (0, 1)")
        if kernel_proj.shape != (self.kernel_dim, self.kernel_dim):
            raise ValueError("kernel projection has the wrong shape")
        if np.linalg.norm(kernel_proj @ kernel_proj - kernel_proj) > 1e-10 or \
                np.linalg.norm(kernel_proj - kernel_proj.conj().T) > 1e-10:
            raise ValueError("kernel_proj is not an orthogonal projection")
        if unitary.shape != (k, k):
            raise ValueError("commuting_unitary has the wrong shape")
        if k and np.linalg.norm(unitary.conj().T @ unitary - np.eye(k)) > 1e-10:
            raise ValueError("commuting_unitary is not unitary")
        if np.linalg.norm(unitary @ diag - diag @ unitary) > 1e-10:
            raise ValueError("commuting_unitary does not commute with diag")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "kernel_proj", kernel_proj)
        object.__setattr__(self, "commuting_unitary", unitary)

    @property
    def generic_dim(self) -> int:
        return self.diag.shape[0]

    @property
    def total_dim(self) -> int:
        return self.kernel_dim + self.dim_plus1 + self.dim_minus1 + 2 * self.generic_dim


def _block_diag(*blocks: np.ndarray) -> np.ndarray:
    total = sum(b.shape[0] for b in blocks)
    out = np.zeros((total, total), dtype=np.complex128)
    at = 0
    for b in blocks:
        k = b.shape[0]
        out[at:at + k, at:at + k] = b
        at += k
    return out


def build_difference_projections(
    form: DiffProjCanonicalForm,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Canonical ``(A, P, Q)`` with ``A = P - Q`` from the form's parameters.

    ``A`` is the block-diagonal contraction ``0 + I + (-I) + D + (-D)``.  The
    two projections agree on the kernel block, split the +1/-1 blocks, and
    mix the doubled generic block::

        P_generic = 1/2 [[I + D,  Uc sqrt(I - D^2)], [sqrt(I - D^2) Uc^H,  I - D]]
        Q_generic = 1/2 [[I - D,  Uc sqrt(I - D^2)], [sqrt(I - D^2) Uc^H,  I + D]]

    Both generic blocks have rank exactly ``dim K``.
    """
    k = form.generic_dim
    d = form.diag
    uc = form.commuting_unitary
    eye_k = np.eye(k)
    root = np.diag(np.sqrt(1.0 - np.diagonal(d).real ** 2)).astype(np.complex128)

    a = _block_diag(
        np.zeros((form.kernel_dim, form.kernel_dim), dtype=np.complex128),
        np.eye(form.dim_plus1, dtype=np.complex128),
        -np.eye(form.dim_minus1, dtype=np.complex128),
        d,
        -d,
    )

    off = uc @ root
    p_generic = 0.5 * np.block([[eye_k + d, off], [off.conj().T, eye_k - d]])
    q_generic = 0.5 * np.block([[eye_k - d, off], [off.conj().T, eye_k + d]])

    p = _block_diag(
        form.kernel_proj,
        np.eye(form.dim_plus1, dtype=np.complex128),
        np.zeros((form.dim_minus1, form.dim_minus1), dtype=np.complex128),
        p_generic,
    )
    q = _block_diag(
        form.kernel_proj,
        np.zeros((form.dim_plus1, form.dim_plus1), dtype=np.complex128),
        np.eye(form.dim_minus1, dtype=np.complex128),
        q_generic,
    )
    return a, p, q


@dataclass(frozen=True)
class SymmetryReport:
    """Interior eigenvalue symmetry of a difference of two projections."""

    ok: bool
    pairs: tuple[tuple[float, int, int], ...]
    interior_count: int


def eigen_symmetry_check(a, p, q, tol: float = 1e-8) -> SymmetryReport:
    """Verify the ``+lambda / -lambda`` multiplicity symmetry of ``a = p - q``.

    Raises ``ValueError`` when the inputs fail the difference-of-projections
    precondition (``p``/``q`` not projections, ``a != p - q``, or ``a`` not a
    Hermitian contraction); the symmetry outcome itself is returned, not
    raised, since it is the quantity under test.
    """
    a, p, q = as_complex(a), as_complex(p), as_complex(q)
    for name, m in (("p", p), ("q", q)):
        if np.linalg.norm(m @ m - m) > tol or np.linalg.norm(m - m.conj().T) > tol:
            raise ValueError(f"{name} is not an orthogonal projection within tol")
    if np.linalg.norm(a - (p - q)) > tol:
        raise ValueError("a is not the difference of the given projections within tol")
    profile = spectral_profile(a, cluster_tol=tol)
    pairs = tuple((pr.value, pr.mult_pos, pr.mult_neg) for pr in profile.interior_pairs)
    interior = sum(pr.mult_pos + pr.mult_neg for pr in profile.interior_pairs)
    return SymmetryReport(ok=profile.symmetric, pairs=pairs, interior_count=interior)
