"""Classification pipeline for pairs with compact normal cross-commutator.

Given either a finite model triple or a truncated structured pair, the
pipeline checks normality of the cross-commutator, extracts the defect
operator's eigenvalue-1 space, diagonalizes the cross-commutator compressed
to it (the *fundamental sequence*), splits the input into irreducible
blocks of defect rank 1, 2 or 3, computes the eigenvalue data of the
residual commuting part, and decides unitary equivalence of two inputs by
comparing the resulting invariants as multisets.
"""

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .bcl import BCLTriple, wandering_projections
from .linalg import Subspace, hermitian_eig, orthonormal_columns, subspace_intersection
from .models import StructuredPair, defect_and_cross_on_interior, validate_pair

#: Band around 0 and 1 used to sort fundamental-sequence entries into kinds;
#: truncation noise inside the band never flips a block kind.
BAND_TOL = 1e-6

ONE_FINITE = "one_finite"
TWO_FINITE = "two_finite"
THREE_FINITE = "three_finite"

PairInput = BCLTriple | StructuredPair


def _working_defect_cross(obj: PairInput) -> tuple[np.ndarray, np.ndarray]:
    """Defect and cross-commutator on the working space of either input kind.

    For a triple the working space is the wandering space itself; for a
    structured pair it is the interior compression.
    """
    if isinstance(obj, BCLTriple):
        ops = wandering_projections(obj)
        return ops.defect, ops.cross
    if isinstance(obj, StructuredPair):
        return defect_and_cross_on_interior(obj)
    raise TypeError(f"unsupported input type {type(obj).__name__}")


@dataclass(frozen=True)
class NormalityReport:
    """Outcome of the compact-normal membership check."""

    ok: bool
    cross_norm: float
    normality_residual: float
    normality_bound: float
    structure_residuals: dict[str, float]


def check_compact_normal(obj: PairInput, tol: float = 1e-8) -> NormalityReport:
    """Test whether the input lies in the compact-normal class.

    Normality is checked as ``norm(X X^H - X^H X) <= tol * norm(X)^2``
    (compactness is automatic at finite dimension).  Structured pairs are
    additionally required to be isometric and commuting on their interior
    window at the same tolerance.
    """
    _, cross = _working_defect_cross(obj)
    xnorm = float(np.linalg.norm(cross))
    residual = float(np.linalg.norm(cross @ cross.conj().T - cross.conj().T @ cross))
    bound = tol * xnorm * xnorm
    # a cross-commutator at round-off scale is the zero operator, which is
    # normal; the relative bound would otherwise reject its own noise
    ok = True if xnorm <= 1e-12 else residual <= bound

    structure: dict[str, float] = {}
    if isinstance(obj, StructuredPair):
        structure = validate_pair(obj, tol).residuals
        ok = ok and all(r <= tol for r in structure.values())
    return NormalityReport(ok, xnorm, residual, bound, structure)


def _pair_membership_residual(pair: StructuredPair, vectors: np.ndarray) -> float:
    """Largest distance of the lifted vectors from both wandering subspaces."""
    if vectors.shape[1] == 0:
        return 0.0
    v1 = sp.csr_matrix(pair.v1)
    v2 = sp.csr_matrix(pair.v2)
    idx = np.asarray(pair.interior, dtype=int)
    worst = 0.0
    for j in range(vectors.shape[1]):
        full = np.zeros(pair.dim, dtype=np.complex128)
        full[idx] = vectors[:, j]
        in_w1 = full - v1 @ (v1.getH() @ full)
        in_w2 = full - v2 @ (v2.getH() @ full)
        worst = max(worst,
                    float(np.linalg.norm(in_w1 - full)),
                    float(np.linalg.norm(in_w2 - full)))
    return worst


def _pair_wandering_ranges(pair: StructuredPair) -> tuple[Subspace, Subspace]:
    """Interior compressions of the two kernel projections, as subspaces.

    The compressed operators are only quasi-projections (boundary-cut
    directions acquire eigenvalues strictly inside (0, 1)); the range is
    read off as the eigenvectors with majority membership.
    """
    v1 = sp.csr_matrix(pair.v1)
    v2 = sp.csr_matrix(pair.v2)
    eye = sp.identity(pair.dim, dtype=np.complex128, format="csr")
    idx = np.asarray(pair.interior, dtype=int)
    out = []
    for v in (v1, v2):
        quasi = (eye - v @ v.getH())[idx, :][:, idx].toarray()
        values, vectors = hermitian_eig(quasi)
        out.append(Subspace(len(idx), vectors[:, values > 0.5]))
    return out[0], out[1]


def _e1_core(obj: PairInput, tol: float) -> tuple[Subspace, np.ndarray, dict[str, float]]:
    defect, cross = _working_defect_cross(obj)
    values, vectors = hermitian_eig(defect)
    eig_basis = Subspace(defect.shape[0], vectors[:, values >= 1.0 - tol])
    residuals: dict[str, float] = {}

    if isinstance(obj, BCLTriple):
        ops = wandering_projections(obj)
        s1 = Subspace.from_columns(ops.proj_w1)
        s2 = Subspace.from_columns(ops.proj_w2)
        basis = subspace_intersection(s1, s2, tol)
        gap = float(np.linalg.norm(basis.projector() - eig_basis.projector()))
        residuals["e1_consistency"] = gap
        if basis.dim != eig_basis.dim or gap > max(tol, 1e-8):
            raise ValueError(
                "wandering-subspace intersection disagrees with the defect's "
                f"eigenvalue-1 space (gap {gap:.3e})"
            )
    else:
        basis = eig_basis
        membership = _pair_membership_residual(obj, basis.basis)
        residuals["e1_membership"] = membership
        if membership > max(tol, 1e-8):
            raise ValueError(
                "eigenvalue-1 vectors leave the wandering subspaces "
                f"(residual {membership:.3e}); inconsistent pair"
            )
        if obj.interior_dim <= 800:
            s1, s2 = _pair_wandering_ranges(obj)
            inter = subspace_intersection(s1, s2, max(tol, 1e-8))
            residuals["e1_consistency"] = float(abs(inter.dim - basis.dim))
            if inter.dim != basis.dim:
                raise ValueError(
                    "wandering-subspace intersection has dimension "
                    f"{inter.dim}, defect eigenvalue-1 space has {basis.dim}"
                )

    compressed = basis.basis.conj().T @ cross @ basis.basis
    contract = float(np.linalg.norm(
        cross - basis.projector() @ cross @ basis.projector()
    ))
    residuals["cross_confined"] = contract
    if contract > max(tol, 1e-8):
        raise ValueError(
            f"cross-commutator is not confined to the eigenvalue-1 space "
            f"(residual {contract:.3e})"
        )
    return basis, compressed, residuals


def e1_data(obj: PairInput, tol: float = 1e-8) -> tuple[Subspace, np.ndarray]:
    """Eigenvalue-1 space of the defect and the cross-commutator compressed to it.

    The space is computed twice, as the intersection of the two wandering
    subspaces and as the defect's eigenvalue-1 eigenspace; a mismatch beyond
    ``tol`` raises, since it signals an input outside the modeled class.
    """
    basis, compressed, _ = _e1_core(obj, tol)
    return basis, compressed


@dataclass(frozen=True)
class BlockDescriptor:
    """One irreducible block recovered from the fundamental sequence.

    ``alpha`` is the block's fundamental-sequence entry: 0 for the doubly
    commuting block, unimodular for the twisted-shift block, and of modulus
    strictly between 0 and 1 for the rank-3 invariant-subspace block (then
    ``interior_eigenvalue`` is ``|alpha|`` and ``twist`` its phase).
    ``f_vector`` is the unit eigenvalue-1 eigenvector generating the block,
    in working-space coordinates.
    """

    kind: str
    alpha: complex
    f_vector: np.ndarray
    interior_eigenvalue: float | None = None
    twist: complex | None = None


@dataclass(frozen=True)
class ShiftUnitaryInvariant:
    """Spectra of the residual commuting unitary, split by the projection."""

    eigs_on_p: tuple[complex, ...]
    eigs_on_pperp: tuple[complex, ...]

    @property
    def empty(self) -> bool:
        return not self.eigs_on_p and not self.eigs_on_pperp


@dataclass(frozen=True)
class ClassificationResult:
    """Complete invariant data of one input."""

    k: int
    blocks: tuple[BlockDescriptor, ...]
    shift_unitary: ShiftUnitaryInvariant | None
    residuals: dict[str, float]

    @property
    def fundamental_sequence(self) -> tuple[complex, ...]:
        return tuple(b.alpha for b in self.blocks)


def _phase_normalize_columns(matrix: np.ndarray) -> np.ndarray:
    out = matrix.copy()
    for j in range(out.shape[1]):
        v = out[:, j]
        k = int(np.argmax(np.abs(v)))
        pivot = v[k]
        if abs(pivot) > 0:
            out[:, j] = v * (pivot.conjugate() / abs(pivot))
    return out


def _canonical_angle(alpha: complex) -> float:
    if abs(alpha) == 0:
        return 0.0
    angle = float(np.angle(alpha)) % (2.0 * np.pi)
    # snap the wrap-around so arguments a hair below 2*pi sort like 0
    return 0.0 if angle > 2.0 * np.pi - 1e-9 else angle


def fundamental_sequence(obj: PairInput, tol: float = 1e-8,
                         band_tol: float = BAND_TOL) -> ClassificationResult:
    """Diagonalize the cross-commutator on the eigenvalue-1 space.

    Eigenvalues (zeros included) form the fundamental sequence; each
    eigenpair becomes a :class:`BlockDescriptor` whose kind is decided by
    the modulus band.  Blocks are ordered deterministically by descending
    modulus, then ascending argument, then lexicographically by the
    phase-normalized eigenvector.  The shift-unitary part is left unfilled;
    see :func:`classify` for the complete invariant.
    """
    basis, compressed, residuals = _e1_core(obj, tol)
    k = basis.dim
    if k == 0:
        return ClassificationResult(0, (), None, residuals)

    xnorm = float(np.linalg.norm(compressed))
    normality = float(np.linalg.norm(
        compressed @ compressed.conj().T - compressed.conj().T @ compressed
    ))
    residuals["e1_cross_normality"] = normality
    if xnorm > 0 and normality > tol * max(1.0, xnorm * xnorm):
        raise ValueError(
            f"cross-commutator on the eigenvalue-1 space is not normal "
            f"(residual {normality:.3e})"
        )

    t, z = sla.schur(compressed, output="complex")
    offdiag = float(np.linalg.norm(t - np.diag(np.diagonal(t))))
    residuals["schur_offdiagonal"] = offdiag
    alphas = np.diagonal(t).copy()
    vectors = _phase_normalize_columns(np.ascontiguousarray(z))

    def sort_key(j: int):
        # moduli and angles are quantized so float fuzz cannot reorder
        # numerically equal entries across runs or scrambles
        a = alphas[j]
        lex = tuple((round(float(c.real), 12), round(float(c.imag), 12))
                    for c in vectors[:, j])
        return (-round(abs(a), 9), round(_canonical_angle(a), 9), lex)

    order = sorted(range(k), key=sort_key)

    blocks = []
    for j in order:
        alpha = complex(alphas[j])
        f_vec = basis.basis @ vectors[:, j]
        mod = abs(alpha)
        if mod <= band_tol:
            blocks.append(BlockDescriptor(ONE_FINITE, 0j, f_vec))
        elif mod >= 1.0 - band_tol:
            blocks.append(BlockDescriptor(TWO_FINITE, alpha / mod, f_vec))
        else:
            blocks.append(BlockDescriptor(
                THREE_FINITE, alpha, f_vec,
                interior_eigenvalue=mod, twist=alpha / mod,
            ))
    return ClassificationResult(k, tuple(blocks), None, residuals)


def _orbit_closure(unitary: np.ndarray, seeds: np.ndarray,
                   tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the smallest U- and U*-invariant span of ``seeds``."""
    n = unitary.shape[0]
    if seeds.size == 0 or seeds.shape[1] == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    basis = orthonormal_columns(seeds, tol)
    while True:
        extended = np.hstack([basis, unitary @ basis, unitary.conj().T @ basis])
        refreshed = orthonormal_columns(extended, tol)
        if refreshed.shape[1] == basis.shape[1]:
            return refreshed
        basis = refreshed


def _unitary_eigs(matrix: np.ndarray) -> tuple[complex, ...]:
    if matrix.shape[0] == 0:
        return ()
    values = np.linalg.eigvals(matrix)
    ordered = sorted((complex(v) for v in values),
                     key=lambda v: (_canonical_angle(v), v.real, v.imag))
    return tuple(ordered)


def _shift_unitary_from_wandering(unitary: np.ndarray, projection: np.ndarray,
                                  defect: np.ndarray, tol: float) -> ShiftUnitaryInvariant:
    values, vectors = hermitian_eig(defect)
    seeds = vectors[:, np.abs(values) > tol]
    orbit = _orbit_closure(unitary, seeds)
    n = unitary.shape[0]
    complement = orthonormal_columns(np.eye(n) - orbit @ orbit.conj().T)
    if complement.shape[1] == 0:
        return ShiftUnitaryInvariant((), ())

    u_n = complement.conj().T @ unitary @ complement
    p_n = complement.conj().T @ projection @ complement
    commute = float(np.linalg.norm(p_n - u_n @ p_n @ u_n.conj().T))
    if commute > tol:
        raise ValueError(
            f"projection does not commute with the unitary on the residual "
            f"block (residual {commute:.3e})"
        )
    # the residual block must also reduce the projection itself, otherwise
    # the 0/1 eigenvalue split below is meaningless
    idem = float(np.linalg.norm(p_n @ p_n - p_n))
    if idem > max(tol, 1e-8):
        raise ValueError(
            f"residual block does not reduce the projection "
            f"(idempotency residual {idem:.3e})"
        )
    pvals, pvecs = hermitian_eig(p_n)
    on_p = pvecs[:, pvals > 0.5]
    off_p = pvecs[:, pvals <= 0.5]
    return ShiftUnitaryInvariant(
        eigs_on_p=_unitary_eigs(on_p.conj().T @ u_n @ on_p),
        eigs_on_pperp=_unitary_eigs(off_p.conj().T @ u_n @ off_p),
    )


def _forward_orbit_fills(pair: StructuredPair, seeds: np.ndarray,
                         tol: float = 1e-8) -> bool:
    """Does the forward orbit of the seeds under both operators span the interior?"""
    target = pair.interior_dim
    if seeds.shape[1] == 0:
        return target == 0
    idx = np.asarray(pair.interior, dtype=int)
    ops = [np.ascontiguousarray(op[np.ix_(idx, idx)]) for op in (pair.v1, pair.v2)]
    basis = np.zeros((target, 0), dtype=np.complex128)
    queue = [seeds[:, j].copy() for j in range(seeds.shape[1])]
    while queue:
        vec = queue.pop()
        for _ in range(2):
            vec = vec - basis @ (basis.conj().T @ vec)
        norm = float(np.linalg.norm(vec))
        if norm <= tol:
            continue
        vec /= norm
        basis = np.hstack([basis, vec.reshape(-1, 1)])
        if basis.shape[1] == target:
            return True
        queue.extend(op @ vec for op in ops)
    return basis.shape[1] == target


def _pair_wandering_model(pair: StructuredPair) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense wandering-space data (basis, unitary, projection) of a pair.

    The wandering space of the product isometry is extracted from the
    interior compression of ``I - V V^H``; the model unitary acts as the
    second operator on the first kernel and as the first operator's adjoint
    on the complement.
    """
    if pair.interior_dim > 1200:
        raise ValueError(
            "wandering-space extraction needs a dense eigendecomposition; "
            f"interior dimension {pair.interior_dim} is too large"
        )
    v1 = sp.csr_matrix(pair.v1)
    v2 = sp.csr_matrix(pair.v2)
    prod = v1 @ v2
    eye = sp.identity(pair.dim, dtype=np.complex128, format="csr")
    idx = np.asarray(pair.interior, dtype=int)

    wander = (eye - prod @ prod.getH())[idx, :][:, idx].toarray()
    values, vectors = hermitian_eig(wander)
    basis = vectors[:, values > 0.5]

    proj_w1 = (eye - v1 @ v1.getH()).toarray()[np.ix_(idx, idx)]
    u_full = (v2 @ (eye - v1 @ v1.getH()) + v1.getH() @ (v1 @ v1.getH()))
    u_int = u_full.toarray()[np.ix_(idx, idx)]

    u_w = basis.conj().T @ u_int @ basis
    p_w = basis.conj().T @ proj_w1 @ basis
    return basis, u_w, p_w


def shift_unitary_invariant(obj: PairInput, tol: float = 1e-8) -> ShiftUnitaryInvariant:
    """Eigenvalue multisets of the residual commuting part.

    The residual is the orthogonal complement, inside the wandering space,
    of the smallest invariant subspace containing the defect's nonzero
    eigenvectors under the model unitary and its adjoint.  There the
    projection commutes with the unitary, and its range/kernel split the
    unitary's spectrum into the two returned multisets.
    """
    if isinstance(obj, BCLTriple):
        ops = wandering_projections(obj)
        return _shift_unitary_from_wandering(
            obj.unitary, obj.projection, ops.defect, tol
        )

    defect, _ = _working_defect_cross(obj)
    values, vectors = hermitian_eig(defect)
    e1 = vectors[:, values >= 1.0 - tol]
    if _forward_orbit_fills(obj, e1):
        return ShiftUnitaryInvariant((), ())

    basis, u_w, p_w = _pair_wandering_model(obj)
    seeds_raw = vectors[:, np.abs(values) > tol]
    seeds = basis.conj().T @ seeds_raw
    defect_w = basis.conj().T @ defect @ basis
    return _shift_unitary_from_wandering(u_w, p_w, defect_w, tol)


def classify(obj: PairInput, tol: float = 1e-8,
             band_tol: float = BAND_TOL) -> ClassificationResult:
    """Full invariant: fundamental sequence plus shift-unitary data.

    Raises ``ValueError`` when the input fails the compact-normal check; the
    classification theorems only cover that class.
    """
    report = check_compact_normal(obj, tol)
    if not report.ok:
        raise ValueError(
            f"input is not compact normal: cross-commutator normality "
            f"residual {report.normality_residual:.3e} exceeds "
            f"{report.normality_bound:.3e}"
        )
    result = fundamental_sequence(obj, tol, band_tol)
    shift = shift_unitary_invariant(obj, tol)
    residuals = dict(result.residuals)
    residuals["cross_normality"] = report.normality_residual
    return replace(result, shift_unitary=shift, residuals=residuals)


def _greedy_match(left: tuple[complex, ...], right: tuple[complex, ...],
                  tol: float) -> list[int] | None:
    """Greedy matching of two complex multisets; None when no matching fits."""
    if len(left) != len(right):
        return None
    used = [False] * len(right)
    matching: list[int] = []
    for a in left:
        best, best_gap = -1, float("inf")
        for j, b in enumerate(right):
            if used[j]:
                continue
            gap = abs(a - b)
            if gap < best_gap:
                best, best_gap = j, gap
        if best < 0 or best_gap > tol:
            return None
        used[best] = True
        matching.append(best)
    return matching


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of the unitary-equivalence decision."""

    equivalent: bool
    matching: tuple[int, ...] | None
    report: dict[str, object]


def decide_equivalence(a: PairInput, b: PairInput,
                       tol: float = 1e-6) -> EquivalenceVerdict:
    """Decide joint unitary equivalence by comparing complete invariants.

    Two inputs are equivalent exactly when their eigenvalue-1 dimensions
    agree, their fundamental sequences match as multisets within ``tol``
    (the witnessing permutation is returned), and their shift-unitary
    eigenvalue multisets match within ``tol``.
    """
    for name, obj in (("first", a), ("second", b)):
        report = check_compact_normal(obj)
        if not report.ok:
            raise ValueError(f"{name} input is not compact normal")
    ca = classify(a)
    cb = classify(b)
    report: dict[str, object] = {"k": (ca.k, cb.k)}
    if ca.k != cb.k:
        report["reason"] = "eigenvalue-1 dimensions differ"
        return EquivalenceVerdict(False, None, report)

    matching = _greedy_match(ca.fundamental_sequence, cb.fundamental_sequence, tol)
    if matching is None:
        report["reason"] = "fundamental sequences differ as multisets"
        return EquivalenceVerdict(False, None, report)

    sa, sb = ca.shift_unitary, cb.shift_unitary
    for label, xs, ys in (("shift_unitary_on_p", sa.eigs_on_p, sb.eigs_on_p),
                          ("shift_unitary_off_p", sa.eigs_on_pperp, sb.eigs_on_pperp)):
        if _greedy_match(xs, ys, tol) is None:
            report["reason"] = f"{label} spectra differ as multisets"
            return EquivalenceVerdict(False, None, report)

    report["reason"] = "all invariants match"
    return EquivalenceVerdict(True, tuple(matching), report)
