"""Biorthogonal decomposition of two-factor states with degeneracy clustering.

A bipartite state is decomposed as sum_k c_k |L_k>|R_k> with orthonormal
vector families on each side.  Terms whose weights |c_k|^2 agree within
the clustering tolerance are grouped into a single degeneracy cluster;
within a cluster the choice of paired bases is a gauge freedom and is
left exactly as the SVD returns it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES as _TOL
from .errors import ValidationError
from .hilbert import PureState, Subspace

__all__ = [
    "DegeneracyCluster",
    "SchmidtDecomposition",
    "decompose",
    "reduced_purity_is_product",
]


@dataclass(frozen=True, eq=False)
class DegeneracyCluster:
    """One (approximately) degenerate group of decomposition terms.

    weight        common squared coefficient of the cluster's terms
    multiplicity  number of terms in the cluster
    left_basis    orthonormal vectors on factor 1, one column per term
    right_basis   orthonormal vectors on factor 2, paired columnwise
    coefficients  per-term complex coefficients; |coefficients[j]|^2
                  equals the weight up to the clustering band
    """

    weight: float
    multiplicity: int
    left_basis: Subspace
    right_basis: Subspace
    coefficients: np.ndarray

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValidationError("cluster multiplicity must be at least 1")
        if self.left_basis.rank != self.multiplicity:
            raise ValidationError("left basis rank must equal the multiplicity")
        if self.right_basis.rank != self.multiplicity:
            raise ValidationError("right basis rank must equal the multiplicity")
        coeffs = np.array(self.coefficients, dtype=np.complex128).reshape(-1)
        if coeffs.size != self.multiplicity:
            raise ValidationError("one coefficient per cluster term is required")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Clustered biorthogonal decomposition of a two-factor state."""

    clusters: tuple[DegeneracyCluster, ...]
    left_dim: int
    right_dim: int
    cluster_tol: float

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))

    @property
    def rank(self) -> int:
        """Total number of nonzero terms across clusters."""
        return sum(c.multiplicity for c in self.clusters)

    @property
    def cluster_weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.clusters])

    @property
    def term_weights(self) -> np.ndarray:
        """Per-term squared coefficients, in cluster order."""
        return np.concatenate([np.abs(c.coefficients) ** 2 for c in self.clusters]) \
            if self.clusters else np.zeros(0)

    @property
    def is_degenerate(self) -> bool:
        return any(c.multiplicity > 1 for c in self.clusters)

    def reconstruct(self) -> np.ndarray:
        """Reassemble the amplitude vector from the stored terms."""
        mat = np.zeros((self.left_dim, self.right_dim), dtype=np.complex128)
        for cluster in self.clusters:
            left = cluster.left_basis.basis
            right = cluster.right_basis.basis
            for j in range(cluster.multiplicity):
                mat += cluster.coefficients[j] * np.outer(left[:, j], right[:, j])
        return mat.reshape(-1)


def decompose(state: PureState, cluster_tol: float | None = None,
              *, rank_tol: float | None = None) -> SchmidtDecomposition:
    """Decompose a two-factor state into weight-sorted degeneracy clusters.

    Weights are strictly decreasing across clusters: a new cluster starts
    whenever (w_prev - w_next) / w_prev reaches ``cluster_tol``.  Terms
    whose weight falls below ``rank_tol`` times the largest weight are
    dropped, so the total multiplicity equals the state's Schmidt rank.
    """
    ctol = _TOL.cluster_tol if cluster_tol is None else cluster_tol
    rtol = _TOL.rank_tol if rank_tol is None else rank_tol
    if state.num_factors != 2:
        raise ValidationError(
            f"decompose needs a state with exactly 2 factors, got {state.num_factors}")
    d1, d2 = state.dims
    u, s, vh = np.linalg.svd(state.as_matrix(), full_matrices=False)
    weights = s ** 2
    keep = weights > rtol * weights[0]
    u, s, vh, weights = u[:, keep], s[keep], vh[keep, :], weights[keep]

    boundaries = [0]
    for i in range(1, s.size):
        if (weights[i - 1] - weights[i]) / weights[i - 1] >= ctol:
            boundaries.append(i)
    boundaries.append(s.size)

    clusters = []
    for lo, hi in zip(boundaries[:-1], boundaries[1:]):
        clusters.append(DegeneracyCluster(
            weight=float(np.mean(weights[lo:hi])),
            multiplicity=hi - lo,
            left_basis=Subspace(u[:, lo:hi]),
            right_basis=Subspace(vh[lo:hi, :].T),
            coefficients=s[lo:hi].astype(np.complex128),
        ))
    return SchmidtDecomposition(clusters=tuple(clusters), left_dim=d1,
                                right_dim=d2, cluster_tol=ctol)


def reduced_purity_is_product(state: PureState, *,
                              rank_tol: float | None = None) -> bool:
    """Whether a two-factor state is a product state (Schmidt rank 1)."""
    return decompose(state, rank_tol=rank_tol).rank == 1
