"""Finite-dimensional Hilbert space primitives.

State vectors over explicit tensor factorizations, Hermitian operators,
and subspaces represented by orthonormal basis matrices, together with
the projector arithmetic (span, intersection, orthogonal complement,
projection weights) that the property-lattice constructions are built
on.  Everything is dense complex128 and immutable after construction.

Composite indices are row-major: for factor dimensions (d1, d2) the
basis vector |i>|j> sits at flat index i*d2 + j.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES as _TOL
from .errors import ValidationError

__all__ = [
    "PureState",
    "HermitianOperator",
    "Subspace",
    "tensor",
    "partial_trace",
    "eigenspaces",
    "span",
    "meet",
    "ortho_complement",
    "subspace_equal",
    "project_state",
    "embed_factor",
]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _as_complex_matrix(values, name: str) -> np.ndarray:
    mat = np.array(values, dtype=np.complex128, copy=True)
    if mat.ndim != 2:
        raise ValidationError(f"{name} must be a 2-d array, got shape {mat.shape}")
    return mat


class PureState:
    """A normalized state vector over a declared tensor factorization.

    Parameters
    ----------
    dims:
        Positive factor dimensions, between one and three factors.
    amplitudes:
        Complex amplitudes in row-major composite order; the squared
        amplitudes must sum to 1 within ``norm_tol``.
    """

    __slots__ = ("_dims", "_amplitudes")

    def __init__(self, dims: Sequence[int], amplitudes, *, norm_tol: float | None = None):
        tol = _TOL.norm_tol if norm_tol is None else norm_tol
        dims = tuple(int(d) for d in dims)
        if not 1 <= len(dims) <= 3:
            raise ValidationError(f"expected 1 to 3 factors, got {len(dims)}")
        if any(d < 1 for d in dims):
            raise ValidationError(f"factor dimensions must be positive, got {dims}")
        amps = np.array(amplitudes, dtype=np.complex128, copy=True).reshape(-1)
        total = math.prod(dims)
        if amps.size != total:
            raise ValidationError(
                f"amplitude count {amps.size} does not match factor dimensions {dims} "
                f"(expected {total})")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > tol:
            raise ValidationError(
                f"state is not normalized: measured norm {math.sqrt(norm_sq):.17g} "
                f"(squared-norm defect {abs(norm_sq - 1.0):.3e} exceeds {tol:.3e})")
        self._dims = dims
        self._amplitudes = _frozen(amps)

    @property
    def dims(self) -> tuple[int, ...]:
        return self._dims

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amplitudes

    @property
    def dim(self) -> int:
        """Total dimension of the composite space."""
        return self._amplitudes.size

    @property
    def num_factors(self) -> int:
        return len(self._dims)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes of a two-factor state as a (d1, d2) matrix."""
        if len(self._dims) != 2:
            raise ValidationError(
                f"as_matrix needs exactly 2 factors, state has {len(self._dims)}")
        return self._amplitudes.reshape(self._dims)

    def overlap(self, other: "PureState") -> complex:
        if other.dim != self.dim:
            raise ValidationError("overlap requires states of equal total dimension")
        return complex(np.vdot(self._amplitudes, other._amplitudes))

    @classmethod
    def basis_state(cls, dims: Sequence[int], index: int) -> "PureState":
        dims = tuple(int(d) for d in dims)
        amps = np.zeros(math.prod(dims), dtype=np.complex128)
        amps[index] = 1.0
        return cls(dims, amps)

    def __repr__(self) -> str:
        return f"PureState(dims={self._dims}, dim={self.dim})"


class HermitianOperator:
    """A Hermitian matrix on a space of the named dimension."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix, *, herm_tol: float | None = None):
        tol = _TOL.herm_tol if herm_tol is None else herm_tol
        mat = _as_complex_matrix(matrix, "operator matrix")
        if mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"operator matrix must be square, got {mat.shape}")
        defect = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
        if defect > tol:
            raise ValidationError(
                f"matrix is not Hermitian: max deviation from adjoint {defect:.3e} "
                f"exceeds {tol:.3e}")
        self._matrix = _frozen(mat)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def projector(cls, subspace: "Subspace") -> "HermitianOperator":
        return cls(subspace.projector())

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


class Subspace:
    """A linear subspace stored as a matrix of orthonormal basis columns.

    The zero subspace (rank 0) is a first-class value: its basis is an
    (ambient_dim, 0) matrix.
    """

    __slots__ = ("_basis",)

    def __init__(self, basis, *, ambient_dim: int | None = None,
                 ortho_tol: float | None = None):
        tol = _TOL.ortho_tol if ortho_tol is None else ortho_tol
        mat = np.array(basis, dtype=np.complex128, copy=True)
        if mat.ndim == 1:
            mat = mat.reshape(-1, 1)
        if mat.ndim != 2:
            raise ValidationError(f"basis must be a matrix, got shape {mat.shape}")
        if ambient_dim is not None and mat.shape[0] != ambient_dim:
            raise ValidationError(
                f"basis lives in dimension {mat.shape[0]}, expected {ambient_dim}")
        n, r = mat.shape
        if r > n:
            raise ValidationError(f"rank {r} exceeds ambient dimension {n}")
        if r:
            gram = mat.conj().T @ mat
            defect = float(np.max(np.abs(gram - np.eye(r))))
            if defect > tol:
                raise ValidationError(
                    f"basis columns are not orthonormal: Gram defect {defect:.3e} "
                    f"exceeds {tol:.3e}")
        self._basis = _frozen(mat)

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def ambient_dim(self) -> int:
        return self._basis.shape[0]

    @property
    def rank(self) -> int:
        return self._basis.shape[1]

    def projector(self) -> np.ndarray:
        b = self._basis
        return b @ b.conj().T

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0), dtype=np.complex128))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=np.complex128))

    @classmethod
    def from_vectors(cls, vectors, ambient_dim: int | None = None,
                     rank_tol: float | None = None) -> "Subspace":
        """Orthonormalize a set of spanning vectors (columns) into a subspace.

        Vectors may be linearly dependent or unnormalized; directions whose
        singular value falls below ``rank_tol`` times the largest are
        discarded.
        """
        tol = _TOL.rank_tol if rank_tol is None else rank_tol
        mat = np.array(vectors, dtype=np.complex128, copy=True)
        if mat.ndim == 1:
            mat = mat.reshape(-1, 1)
        if ambient_dim is not None and mat.shape[0] != ambient_dim:
            raise ValidationError(
                f"vectors live in dimension {mat.shape[0]}, expected {ambient_dim}")
        if mat.shape[1] == 0:
            return cls.zero(mat.shape[0])
        u, s, _ = np.linalg.svd(mat, full_matrices=False)
        if s.size == 0 or s[0] <= 0.0:
            return cls.zero(mat.shape[0])
        keep = s > tol * s[0]
        return cls(u[:, keep])

    @classmethod
    def from_projector(cls, projector: np.ndarray, cutoff: float = 0.5) -> "Subspace":
        """Extract the range of an (approximate) orthogonal projector."""
        mat = _as_complex_matrix(projector, "projector")
        vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
        return cls(vecs[:, vals > cutoff])

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, rank={self.rank})"


def tensor(a: PureState, b: PureState) -> PureState:
    """Tensor product of two states; the factor lists concatenate."""
    dims = a.dims + b.dims
    if len(dims) > 3:
        raise ValidationError(
            f"tensor product would have {len(dims)} factors, at most 3 supported")
    amps = np.kron(a.amplitudes, b.amplitudes)
    amps = amps / np.linalg.norm(amps)
    return PureState(dims, amps)


def partial_trace(state: PureState, keep: int) -> HermitianOperator:
    """Reduced density operator of ``state`` on the factor ``keep``.

    All other factors are traced out.  The result is Hermitian, positive
    semidefinite, and has unit trace up to roundoff.
    """
    dims = state.dims
    if len(dims) < 2:
        raise ValidationError("partial_trace needs a state with at least 2 factors")
    if not 0 <= keep < len(dims):
        raise ValidationError(f"keep index {keep} out of range for {len(dims)} factors")
    tensor_form = state.amplitudes.reshape(dims)
    moved = np.moveaxis(tensor_form, keep, 0)
    flat = moved.reshape(dims[keep], -1)
    rho = flat @ flat.conj().T
    rho = (rho + rho.conj().T) / 2.0
    return HermitianOperator(rho)


def eigenspaces(op: HermitianOperator, cluster_tol: float | None = None,
                *, rank_tol: float | None = None) -> list[tuple[float, Subspace]]:
    """Eigenspaces of a Hermitian operator with degeneracy clustering.

    Eigenvalues are sorted in descending order and grouped into one
    cluster per (approximately) degenerate level: a new cluster starts
    where the relative gap between adjacent eigenvalues reaches
    ``cluster_tol``.  Eigenvalues whose magnitude is below ``rank_tol``
    times the spectral scale are treated as exactly zero and form a
    single cluster.  Returns (eigenvalue, eigenspace) pairs whose
    subspaces are mutually orthogonal and sum to the whole space.
    """
    ctol = _TOL.cluster_tol if cluster_tol is None else cluster_tol
    rtol = _TOL.rank_tol if rank_tol is None else rank_tol
    vals, vecs = np.linalg.eigh(op.matrix)
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    n = vals.size
    scale = float(np.max(np.abs(vals))) if n else 0.0
    if scale == 0.0:
        return [(0.0, Subspace(vecs))]
    is_zero = np.abs(vals) < rtol * scale
    boundaries = [0]
    for i in range(1, n):
        if is_zero[i] != is_zero[i - 1]:
            boundaries.append(i)
            continue
        if is_zero[i]:
            continue
        gap = vals[i - 1] - vals[i]
        denom = max(abs(vals[i - 1]), abs(vals[i]))
        if gap / denom >= ctol:
            boundaries.append(i)
    boundaries.append(n)
    out: list[tuple[float, Subspace]] = []
    for lo, hi in zip(boundaries[:-1], boundaries[1:]):
        value = 0.0 if is_zero[lo] else float(np.mean(vals[lo:hi]))
        out.append((value, Subspace(vecs[:, lo:hi])))
    return out


def span(a: Subspace, b: Subspace, *, rank_tol: float | None = None) -> Subspace:
    """Smallest subspace containing both arguments (lattice join)."""
    if a.ambient_dim != b.ambient_dim:
        raise ValidationError("span requires subspaces of the same ambient dimension")
    stacked = np.hstack([a.basis, b.basis])
    return Subspace.from_vectors(stacked, rank_tol=rank_tol)


def ortho_complement(a: Subspace) -> Subspace:
    """Orthogonal complement within the ambient space."""
    n, r = a.basis.shape
    if r == 0:
        return Subspace.full(n)
    if r == n:
        return Subspace.zero(n)
    u, _, _ = np.linalg.svd(a.basis, full_matrices=True)
    return Subspace(u[:, r:])


def meet(a: Subspace, b: Subspace, *, rank_tol: float | None = None) -> Subspace:
    """Largest subspace contained in both arguments (lattice meet).

    Computed through the complement of the join of the complements, so
    the De Morgan identity holds by construction.
    """
    return ortho_complement(span(ortho_complement(a), ortho_complement(b),
                                 rank_tol=rank_tol))


def subspace_equal(a: Subspace, b: Subspace,
                   tol: float | None = None) -> bool:
    """Whether two subspaces coincide, measured on their projectors."""
    if a.ambient_dim != b.ambient_dim:
        return False
    t = _TOL.subspace_eq_tol if tol is None else tol
    return float(np.linalg.norm(a.projector() - b.projector())) < t


def project_state(state: PureState, s: Subspace) -> tuple[np.ndarray, float]:
    """Project a state onto a subspace.

    Returns the unnormalized component vector P|psi> and its squared
    norm (the projection weight).
    """
    if s.ambient_dim != state.dim:
        raise ValidationError(
            f"subspace ambient dimension {s.ambient_dim} does not match state "
            f"dimension {state.dim}")
    if s.rank == 0:
        return np.zeros(state.dim, dtype=np.complex128), 0.0
    coords = s.basis.conj().T @ state.amplitudes
    component = s.basis @ coords
    weight = float(np.real(np.vdot(component, component)))
    return component, weight


def embed_factor(op: HermitianOperator, dims: Sequence[int], factor: int) -> HermitianOperator:
    """Extend an operator on one tensor factor by the identity on the rest."""
    dims = tuple(int(d) for d in dims)
    if not 0 <= factor < len(dims):
        raise ValidationError(f"factor index {factor} out of range for {len(dims)} factors")
    if op.dim != dims[factor]:
        raise ValidationError(
            f"operator dimension {op.dim} does not match factor {factor} "
            f"dimension {dims[factor]}")
    out = np.array([[1.0 + 0.0j]])
    for k, d in enumerate(dims):
        block = op.matrix if k == factor else np.eye(d, dtype=np.complex128)
        out = np.kron(out, block)
    return HermitianOperator(out)
