"""Entanglement-assisted invariance of equal-weight superpositions.

A unitary confined to a degenerate cluster on factor 1 can be undone by
a compensating unitary on factor 2: the compensator's matrix elements
are the complex conjugates of the original's, dressed with the term
phases.  States with a flat coefficient spectrum are left invariant by
such pairs, which pins equal weights to equal probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES as _TOL
from .errors import ValidationError
from .hilbert import PureState, Subspace, subspace_equal
from .lattice import modal_lattice
from .measure import born_measure
from .schmidt import decompose

__all__ = [
    "EnvariancePair",
    "compensator",
    "degenerate_cluster_state",
    "invariance_defect",
    "envariance_probability_check",
    "random_unitary",
    "TrialReport",
    "run_envariance_trials",
    "INVARIANCE_CONTRACT",
    "UNITARITY_CONTRACT",
]

# numerical guarantees for any valid pair
INVARIANCE_CONTRACT = 1e-10
UNITARITY_CONTRACT = 1e-12


def _check_unitary(matrix: np.ndarray, tol: float, name: str) -> np.ndarray:
    mat = np.array(matrix, dtype=np.complex128, copy=True)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {mat.shape}")
    defect = float(np.linalg.norm(mat.conj().T @ mat - np.eye(mat.shape[0])))
    if defect > tol:
        raise ValidationError(
            f"{name} is not unitary: Gram defect {defect:.3e} exceeds {tol:.3e}")
    return mat


def compensator(u1: np.ndarray, phases, *,
                ortho_tol: float | None = None) -> np.ndarray:
    """Compensating factor 2 unitary for a factor 1 unitary and term phases.

    Entry (k, l) of the result is conj(u1[k, l]) * exp(i(phi_k - phi_l)),
    expressed in the paired factor 2 basis.  The result is unitary
    whenever u1 is.
    """
    tol = _TOL.ortho_tol if ortho_tol is None else ortho_tol
    mat = _check_unitary(u1, tol, "u1")
    phi = np.array(phases, dtype=float).reshape(-1)
    if phi.size != mat.shape[0]:
        raise ValidationError(
            f"expected {mat.shape[0]} phases for a {mat.shape[0]}x{mat.shape[0]} "
            f"unitary, got {phi.size}")
    return np.conj(mat) * np.exp(1j * (phi[:, None] - phi[None, :]))


@dataclass(frozen=True, eq=False)
class EnvariancePair:
    """A factor 1 unitary with its factor 2 compensator and term phases."""

    u1: np.ndarray
    u2: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        u1 = _check_unitary(self.u1, _TOL.ortho_tol, "u1")
        u2 = _check_unitary(self.u2, _TOL.ortho_tol, "u2")
        phi = np.array(self.phases, dtype=float).reshape(-1)
        if u1.shape != u2.shape or phi.size != u1.shape[0]:
            raise ValidationError("u1, u2, and phases must share one dimension")
        expected = np.conj(u1) * np.exp(1j * (phi[:, None] - phi[None, :]))
        defect = float(np.max(np.abs(u2 - expected)))
        if defect > _TOL.env_tol:
            raise ValidationError(
                f"u2 is not the compensator of u1: max defect {defect:.3e}")
        for name, arr in (("u1", u1), ("u2", u2), ("phases", phi)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_u1(cls, u1: np.ndarray, phases) -> "EnvariancePair":
        return cls(u1=np.asarray(u1, dtype=np.complex128),
                   u2=compensator(u1, phases),
                   phases=np.asarray(phases, dtype=float))

    @property
    def dim(self) -> int:
        return self.u1.shape[0]


def degenerate_cluster_state(phases, left_basis: Subspace | None = None,
                             right_basis: Subspace | None = None) -> PureState:
    """Equal-weight two-factor state sum_j exp(i phi_j)/sqrt(N) |L_j>|R_j>.

    Defaults to the computational bases of an N x N space when no bases
    are given.
    """
    phi = np.array(phases, dtype=float).reshape(-1)
    n = phi.size
    if n < 2:
        raise ValidationError("a degenerate cluster needs at least 2 terms")
    left = Subspace.full(n) if left_basis is None else left_basis
    right = Subspace.full(n) if right_basis is None else right_basis
    if left.rank != n or right.rank != n:
        raise ValidationError("bases must supply one vector per phase")
    coeffs = np.exp(1j * phi) / np.sqrt(n)
    mat = (left.basis * coeffs) @ right.basis.T
    return PureState((left.ambient_dim, right.ambient_dim), mat.reshape(-1))


def _embed(u: np.ndarray, basis: Subspace) -> np.ndarray:
    """Extend a unitary given in a subspace basis by the identity outside."""
    b = basis.basis
    n = basis.ambient_dim
    return np.eye(n, dtype=np.complex128) + b @ (u - np.eye(u.shape[0])) @ b.conj().T


def invariance_defect(omega: PureState, pair: EnvariancePair,
                      left_basis: Subspace | None = None,
                      right_basis: Subspace | None = None,
                      *, cluster_tol: float | None = None) -> float:
    """| <omega| (u1 (x) u2) |omega> - 1 | by direct tensor contraction.

    ``omega`` must have a flat coefficient spectrum matching the pair's
    dimension (one cluster of that multiplicity); anything else is a
    domain error.  The bases tell the pair's matrices where to act and
    default to the computational ones.
    """
    if omega.num_factors != 2:
        raise ValidationError("invariance_defect needs a two-factor state")
    n = pair.dim
    sd = decompose(omega, cluster_tol)
    if len(sd.clusters) != 1 or sd.clusters[0].multiplicity != n:
        raise ValidationError(
            f"state spectrum is not flat at multiplicity {n}: found "
            f"{[c.multiplicity for c in sd.clusters]} term(s) per cluster")
    d1, d2 = omega.dims
    left = Subspace.full(d1) if left_basis is None else left_basis
    right = Subspace.full(d2) if right_basis is None else right_basis
    if left.rank != n or right.rank != n:
        raise ValidationError("bases must carry exactly one vector per pair dimension")
    full_u1 = _embed(pair.u1, left)
    full_u2 = _embed(pair.u2, right)
    mat = omega.as_matrix()
    transformed = full_u1 @ mat @ full_u2.T
    return float(abs(np.vdot(mat, transformed) - 1.0))


def envariance_probability_check(state: PureState, u1: np.ndarray,
                                 cluster: int = 0,
                                 *, cluster_tol: float | None = None,
                                 subspace_eq_tol: float | None = None) -> bool:
    """Whether a cluster-confined unitary leaves factor 1 properties alone.

    Applies u1 on the chosen cluster's left basis together with its
    compensator on the paired right basis, then compares the factor 1
    lattice and measure of the transformed state with the originals.
    """
    stol = _TOL.subspace_eq_tol if subspace_eq_tol is None else subspace_eq_tol
    sd = decompose(state, cluster_tol)
    if not 0 <= cluster < len(sd.clusters):
        raise ValidationError(
            f"cluster index {cluster} out of range for {len(sd.clusters)} clusters")
    chosen = sd.clusters[cluster]
    mat = _check_unitary(u1, _TOL.ortho_tol, "u1")
    if mat.shape[0] != chosen.multiplicity:
        raise ValidationError(
            f"u1 acts on dimension {mat.shape[0]} but the cluster has "
            f"multiplicity {chosen.multiplicity}; the unitary must be confined "
            f"to one cluster")
    u2 = compensator(mat, np.zeros(chosen.multiplicity))
    full_u1 = _embed(mat, chosen.left_basis)
    full_u2 = _embed(u2, chosen.right_basis)
    transformed = PureState(
        state.dims, (full_u1 @ state.as_matrix() @ full_u2.T).reshape(-1))

    base_lat = modal_lattice(state, cluster_tol=cluster_tol)
    new_lat = modal_lattice(transformed, cluster_tol=cluster_tol)
    if base_lat.num_atoms != new_lat.num_atoms:
        return False
    for a, b in zip(base_lat.atoms, new_lat.atoms):
        if not subspace_equal(a, b, tol=stol):
            return False
    base_weights = born_measure(state, base_lat).atom_weights
    new_weights = born_measure(transformed, new_lat).atom_weights
    return bool(np.max(np.abs(base_weights - new_weights)) < stol)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unitary drawn by orthonormalizing a complex Gaussian matrix."""
    if dim < 1:
        raise ValidationError("dimension must be positive")
    gauss = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(gauss)
    # fix the QR phase gauge so the distribution is basis-invariant
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


@dataclass(frozen=True)
class TrialReport:
    """Aggregate defects over a batch of randomized compensator trials."""

    trials: int
    dim: int
    seed: int
    max_unitarity_defect: float
    max_invariance_defect: float
    max_row_sum_defect: float
    passed: bool


def run_envariance_trials(trials: int, dim: int, seed: int) -> TrialReport:
    """Randomized check of the compensator construction.

    Each trial draws a unitary and phases, builds the pair, and measures
    the compensator's unitarity defect, the invariance defect on the
    equal-weight state, and the defect of the row-sum identity
    (1/N) sum_{ij} |u1[i,j]|^2 = 1.
    """
    if trials < 1:
        raise ValidationError("trial count must be positive")
    if dim < 2:
        raise ValidationError("dimension must be at least 2")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    worst_unitarity = 0.0
    worst_invariance = 0.0
    worst_row_sum = 0.0
    for _ in range(trials):
        u1 = random_unitary(dim, rng)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=dim)
        pair = EnvariancePair.from_u1(u1, phases)
        gram = pair.u2.conj().T @ pair.u2
        worst_unitarity = max(worst_unitarity,
                              float(np.linalg.norm(gram - np.eye(dim))))
        omega = degenerate_cluster_state(phases)
        worst_invariance = max(worst_invariance, invariance_defect(omega, pair))
        row_sum = float(np.sum(np.abs(u1) ** 2)) / dim
        worst_row_sum = max(worst_row_sum, abs(row_sum - 1.0))
    passed = (worst_unitarity < UNITARITY_CONTRACT
              and worst_invariance < INVARIANCE_CONTRACT
              and worst_row_sum < UNITARITY_CONTRACT)
    return TrialReport(trials=trials, dim=dim, seed=int(seed),
                       max_unitarity_defect=worst_unitarity,
                       max_invariance_defect=worst_invariance,
                       max_row_sum_defect=worst_row_sum,
                       passed=passed)
