"""Branch structure of system-environment states with imperfect records.

Environment states built from per-qubit rotations have overlaps that
factor into cosines, so the quality of the record is tunable from
perfect (orthogonal) to useless (parallel).  The cross-term report
quantifies how far branch probabilities are from additive for a given
observable, and the three-way decomposition test classifies whether a
tripartite state determines its branches uniquely.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES as _TOL
from .errors import ValidationError
from .hilbert import HermitianOperator, PureState
from .schmidt import decompose

__all__ = [
    "DecoherenceModel",
    "Branch",
    "CrossTermReport",
    "generate_decohered_state",
    "predicted_overlap",
    "cross_term_report",
    "TriorthogonalResult",
    "triorthogonal_check",
]


@dataclass(frozen=True, eq=False)
class Branch:
    """One product branch c * |system> (x) |environment| of a two-factor state."""

    coefficient: complex
    system_vector: np.ndarray
    env_vector: np.ndarray

    def __post_init__(self):
        sys_vec = np.array(self.system_vector, dtype=np.complex128).reshape(-1)
        env_vec = np.array(self.env_vector, dtype=np.complex128).reshape(-1)
        for name, vec in (("system", sys_vec), ("environment", env_vec)):
            norm = float(np.linalg.norm(vec))
            if abs(norm - 1.0) > 1e-8:
                raise ValidationError(
                    f"branch {name} vector must be unit length, got norm {norm:.17g}")
        sys_vec.setflags(write=False)
        env_vec.setflags(write=False)
        object.__setattr__(self, "coefficient", complex(self.coefficient))
        object.__setattr__(self, "system_vector", sys_vec)
        object.__setattr__(self, "env_vector", env_vec)


@dataclass(frozen=True, eq=False)
class DecoherenceModel:
    """Recipe for a correlated system-environment state.

    system_dim           number of branches (one basis state each)
    env_qubits           number of environment qubits
    branch_coefficients  complex amplitudes c_k, normalized
    env_rotation_angles  one rotation angle per environment qubit
    """

    system_dim: int
    env_qubits: int
    branch_coefficients: np.ndarray
    env_rotation_angles: np.ndarray

    def __post_init__(self):
        if self.system_dim < 2:
            raise ValidationError("system dimension must be at least 2")
        if self.env_qubits < 0:
            raise ValidationError("environment qubit count must be nonnegative")
        coeffs = np.array(self.branch_coefficients, dtype=np.complex128).reshape(-1)
        if coeffs.size != self.system_dim:
            raise ValidationError(
                f"expected {self.system_dim} branch coefficients, got {coeffs.size}")
        norm_sq = float(np.sum(np.abs(coeffs) ** 2))
        if abs(norm_sq - 1.0) > _TOL.norm_tol:
            raise ValidationError(
                f"branch coefficients are not normalized: measured norm "
                f"{math.sqrt(norm_sq):.17g}")
        angles = np.array(self.env_rotation_angles, dtype=float).reshape(-1)
        if angles.size != self.env_qubits:
            raise ValidationError(
                f"expected {self.env_qubits} rotation angles, got {angles.size}")
        coeffs.setflags(write=False)
        angles.setflags(write=False)
        object.__setattr__(self, "branch_coefficients", coeffs)
        object.__setattr__(self, "env_rotation_angles", angles)

    @property
    def env_dim(self) -> int:
        return 2 ** self.env_qubits

    def environment_state(self, k: int) -> np.ndarray:
        """Environment record for branch k: each qubit rotated by k times its angle."""
        if not 0 <= k < self.system_dim:
            raise ValidationError(f"branch index {k} out of range")
        vec = np.array([1.0 + 0.0j])
        for theta in self.env_rotation_angles:
            qubit = np.array([math.cos(k * theta), math.sin(k * theta)],
                             dtype=np.complex128)
            vec = np.kron(vec, qubit)
        return vec

    def branches(self) -> list[Branch]:
        out = []
        for k in range(self.system_dim):
            system = np.zeros(self.system_dim, dtype=np.complex128)
            system[k] = 1.0
            out.append(Branch(coefficient=complex(self.branch_coefficients[k]),
                              system_vector=system,
                              env_vector=self.environment_state(k)))
        return out


def generate_decohered_state(model: DecoherenceModel) -> PureState:
    """Build sum_k c_k |k> (x) |E_k> as a two-factor state.

    The environment records |E_k> are products of rotated qubits and are
    generally not orthogonal: <E_j|E_k> is a product of cosines of the
    angle differences.
    """
    mat = np.zeros((model.system_dim, model.env_dim), dtype=np.complex128)
    for k in range(model.system_dim):
        mat[k, :] = model.branch_coefficients[k] * model.environment_state(k)
    return PureState((model.system_dim, model.env_dim), mat.reshape(-1))


def predicted_overlap(model: DecoherenceModel, j: int, k: int) -> float:
    """Closed-form record overlap <E_j|E_k> = prod_q cos((k - j) theta_q)."""
    for idx in (j, k):
        if not 0 <= idx < model.system_dim:
            raise ValidationError(f"branch index {idx} out of range")
    out = 1.0
    for theta in model.env_rotation_angles:
        out *= math.cos((k - j) * theta)
    return out


@dataclass(frozen=True, eq=False)
class CrossTermReport:
    """Interference bookkeeping for one state, observable, and branch list.

    overlaps          Gram matrix of the environment records
    cross_magnitude   |<A (x) I> - sum_k |c_k|^2 <A>_k| for the observable
    additivity_defect the same quantity maximized over branch projectors
    """

    overlaps: np.ndarray
    cross_magnitude: float
    additivity_defect: float

    def __post_init__(self):
        gram = np.array(self.overlaps, dtype=np.complex128)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
            raise ValidationError("overlaps must be a square matrix")
        if float(np.max(np.abs(gram - gram.conj().T))) > 1e-8:
            raise ValidationError("overlap matrix must be Hermitian")
        if float(np.max(np.abs(np.diagonal(gram) - 1.0))) > 1e-8:
            raise ValidationError("unit branch vectors must have unit self-overlap")
        gram.setflags(write=False)
        object.__setattr__(self, "overlaps", gram)
        object.__setattr__(self, "cross_magnitude", float(self.cross_magnitude))
        object.__setattr__(self, "additivity_defect", float(self.additivity_defect))


def cross_term_report(state: PureState, observable: HermitianOperator,
                      branches: Sequence[Branch],
                      *, recon_tol: float | None = None) -> CrossTermReport:
    """Measure how far the branch list is from carrying additive statistics.

    The branches are taken as given, never inferred from the state; they
    must reassemble the state within ``recon_tol``.  The cross magnitude
    compares the full expectation of observable (x) identity against the
    weighted single-branch expectations; the additivity defect does the
    same with each branch's own projector and keeps the worst case.
    """
    tol = _TOL.recon_tol if recon_tol is None else recon_tol
    if state.num_factors != 2:
        raise ValidationError("cross_term_report needs a two-factor state")
    d_sys, d_env = state.dims
    if observable.dim != d_sys:
        raise ValidationError(
            f"observable dimension {observable.dim} does not match factor 1 "
            f"dimension {d_sys}")
    if not branches:
        raise ValidationError("at least one branch is required")
    for b in branches:
        if b.system_vector.size != d_sys or b.env_vector.size != d_env:
            raise ValidationError("branch vectors do not match the factor dimensions")

    rebuilt = np.zeros((d_sys, d_env), dtype=np.complex128)
    for b in branches:
        rebuilt += b.coefficient * np.outer(b.system_vector, b.env_vector)
    defect = float(np.linalg.norm(rebuilt.reshape(-1) - state.amplitudes))
    if defect > tol:
        raise ValidationError(
            f"branches do not reconstruct the state: error {defect:.3e} exceeds "
            f"{tol:.3e}")

    m = len(branches)
    overlaps = np.empty((m, m), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            overlaps[i, j] = np.vdot(branches[i].env_vector, branches[j].env_vector)

    mat = state.as_matrix()
    a = observable.matrix
    full_expectation = float(np.real(np.vdot(mat, a @ mat)))
    weights = np.array([abs(b.coefficient) ** 2 for b in branches])
    branch_expectations = np.array(
        [float(np.real(np.vdot(b.system_vector, a @ b.system_vector)))
         for b in branches])
    cross_magnitude = abs(full_expectation - float(weights @ branch_expectations))

    additivity_defect = 0.0
    for k, branch in enumerate(branches):
        direction = branch.system_vector
        projected = np.outer(direction, direction.conj())
        full_prob = float(np.real(np.vdot(mat, projected @ mat)))
        branch_probs = np.array(
            [abs(np.vdot(direction, b.system_vector)) ** 2 for b in branches])
        additivity_defect = max(additivity_defect,
                                abs(full_prob - float(weights @ branch_probs)))

    return CrossTermReport(overlaps=overlaps, cross_magnitude=cross_magnitude,
                           additivity_defect=additivity_defect)


class TriorthogonalResult(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"


def triorthogonal_check(state: PureState, *, cluster_tol: float | None = None,
                        rank_tol: float | None = None,
                        ortho_tol: float | None = None) -> TriorthogonalResult:
    """Classify whether a three-factor state splits over orthonormal triples.

    Decomposes factor 1 against the rest.  With a non-degenerate
    spectrum the state splits iff every partner vector is itself a
    product across factors 2 and 3 with orthonormal families on each;
    a degenerate spectrum leaves the split ambiguous, so the check
    reports INDETERMINATE rather than picking a decomposition.
    """
    rtol = _TOL.rank_tol if rank_tol is None else rank_tol
    otol = _TOL.ortho_tol if ortho_tol is None else ortho_tol
    if state.num_factors != 3:
        raise ValidationError(
            f"triorthogonal_check needs a three-factor state, got {state.num_factors}")
    d1, d2, d3 = state.dims
    flattened = PureState((d1, d2 * d3), state.amplitudes)
    sd = decompose(flattened, cluster_tol, rank_tol=rtol)
    if sd.is_degenerate:
        return TriorthogonalResult.INDETERMINATE

    partner_factors = []
    for cluster in sd.clusters:
        partner = cluster.right_basis.basis[:, 0].reshape(d2, d3)
        u, s, vh = np.linalg.svd(partner, full_matrices=False)
        if s.size > 1 and s[1] > rtol * s[0]:
            return TriorthogonalResult.FAILS
        partner_factors.append((u[:, 0], vh[0, :]))

    mid = np.column_stack([f[0] for f in partner_factors])
    last = np.column_stack([f[1] for f in partner_factors])
    for family in (mid, last):
        gram = family.conj().T @ family
        if float(np.max(np.abs(gram - np.eye(gram.shape[0])))) > max(otol, 1e-9):
            return TriorthogonalResult.FAILS
    return TriorthogonalResult.HOLDS
