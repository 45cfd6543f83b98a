"""Probability measures over definite-property lattices.

The measure of an atom is the squared length of the state's component
in it.  Coarse-graining joins decomposition terms into a single term
carrying the combined weight, which is what forces any additive measure
of the weights to be linear; the additivity check makes that criterion
executable.  A seeded sampler realizes the measure as a stream of value
assignments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES as _TOL
from .errors import ValidationError
from .hilbert import PureState, partial_trace, project_state
from .lattice import DefiniteLattice, ValueHomomorphism, modal_lattice
from .schmidt import decompose

__all__ = [
    "BornMeasure",
    "ValueAssignment",
    "born_measure",
    "coarse_grain",
    "additivity_check",
    "phase_invariance_check",
    "sample_assignment",
    "sample_counts",
]

_SUM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class BornMeasure:
    """Atom weights of a lattice under one state, in atom order."""

    atom_weights: np.ndarray

    def __post_init__(self):
        weights = np.array(self.atom_weights, dtype=float).reshape(-1)
        if weights.size == 0:
            raise ValidationError("a measure needs at least one atom weight")
        if np.any(weights < -_SUM_TOL) or np.any(weights > 1.0 + _SUM_TOL):
            raise ValidationError("atom weights must lie in [0, 1]")
        total = float(weights.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValidationError(
                f"atom weights must sum to 1, got {total:.17g}")
        weights.setflags(write=False)
        object.__setattr__(self, "atom_weights", weights)

    @property
    def num_atoms(self) -> int:
        return self.atom_weights.size

    def element_weight(self, atom_indices: Iterable[int]) -> float:
        indices = sorted(set(int(i) for i in atom_indices))
        for i in indices:
            if not 0 <= i < self.num_atoms:
                raise ValidationError(f"atom index {i} out of range")
        return float(self.atom_weights[indices].sum())


@dataclass(frozen=True)
class ValueAssignment:
    """One sampled truth assignment together with the seed that drew it."""

    homomorphism: ValueHomomorphism
    seed: int


def born_measure(state: PureState, lat: DefiniteLattice) -> BornMeasure:
    """Measure each atom by the state's squared component in it.

    Accepts either a lattice on the state's full space or, for a
    two-factor state, a lattice on the first factor (the atoms are then
    weighted through the reduced density operator).  Weights are divided
    by the state's squared norm, so a state admitted under a loose norm
    tolerance still yields a unit-total measure.
    """
    if lat.ambient_dim == state.dim:
        weights = np.array([project_state(state, atom)[1] for atom in lat.atoms])
    elif state.num_factors == 2 and lat.ambient_dim == state.dims[0]:
        w1 = partial_trace(state, 0).matrix
        weights = np.array([float(np.real(np.trace(atom.projector() @ w1)))
                            for atom in lat.atoms])
    else:
        raise ValidationError(
            f"lattice ambient dimension {lat.ambient_dim} matches neither the state "
            f"dimension {state.dim} nor its first factor")
    norm_sq = float(np.real(np.vdot(state.amplitudes, state.amplitudes)))
    return BornMeasure(atom_weights=weights / norm_sq)


def coarse_grain(state: PureState, merge: Iterable[int],
                 *, cluster_tol: float | None = None) -> PureState:
    """Join decomposition terms of a two-factor state into a single term.

    The merged term carries the root of the summed weights; its factor 1
    vector is the normalized coefficient-weighted sum of the merged
    terms' vectors, and its factor 2 vector is the lowest-index merged
    vector.  Term indices are 0-based positions in descending-weight
    order.  Requires a non-degenerate spectrum and at least two indices.
    """
    sd = decompose(state, cluster_tol)
    if sd.is_degenerate:
        raise ValidationError("coarse_grain requires a non-degenerate spectrum")
    merge_set = sorted(set(int(i) for i in merge))
    if len(merge_set) < 2:
        raise ValidationError("coarse_grain needs at least two term indices to merge")
    if merge_set[0] < 0 or merge_set[-1] >= sd.rank:
        raise ValidationError(
            f"merge indices {merge_set} out of range for rank {sd.rank}")
    coefficients = np.concatenate([c.coefficients for c in sd.clusters])
    left = np.hstack([c.left_basis.basis for c in sd.clusters])
    right = np.hstack([c.right_basis.basis for c in sd.clusters])

    merged_weight = float(np.sum(np.abs(coefficients[merge_set]) ** 2))
    merged_left = left[:, merge_set] @ coefficients[merge_set] / np.sqrt(merged_weight)
    anchor = right[:, merge_set[0]]

    mat = np.zeros((sd.left_dim, sd.right_dim), dtype=np.complex128)
    for k in range(sd.rank):
        if k in merge_set:
            continue
        mat += coefficients[k] * np.outer(left[:, k], right[:, k])
    mat += np.sqrt(merged_weight) * np.outer(merged_left, anchor)
    return PureState(state.dims, mat.reshape(-1))


def additivity_check(weights: Sequence[float], f: Callable[[float], float],
                     *, add_tol: float | None = None) -> bool:
    """Whether f(sum of weights) equals the sum of f(weight) within add_tol."""
    tol = _TOL.add_tol if add_tol is None else add_tol
    values = np.array(weights, dtype=float).reshape(-1)
    if values.size == 0 or np.any(values < 0.0):
        raise ValidationError("weights must be a nonempty list of nonnegative reals")
    if float(values.sum()) > 1.0 + _SUM_TOL:
        raise ValidationError("weights must sum to at most 1")
    defect = abs(f(float(values.sum())) - sum(f(float(w)) for w in values))
    return defect < tol


def phase_invariance_check(state: PureState, phases: Sequence[float],
                           *, cluster_tol: float | None = None,
                           subspace_eq_tol: float | None = None) -> bool:
    """Whether per-term phases leave factor 1 atoms and weights unchanged.

    Rebuilds the state with one extra phase on each decomposition term
    and compares the resulting factor 1 lattice and measure against the
    originals.
    """
    stol = _TOL.subspace_eq_tol if subspace_eq_tol is None else subspace_eq_tol
    sd = decompose(state, cluster_tol)
    phase_values = np.array(phases, dtype=float).reshape(-1)
    if phase_values.size != sd.rank:
        raise ValidationError(
            f"expected one phase per decomposition term ({sd.rank}), "
            f"got {phase_values.size}")
    coefficients = np.concatenate([c.coefficients for c in sd.clusters])
    left = np.hstack([c.left_basis.basis for c in sd.clusters])
    right = np.hstack([c.right_basis.basis for c in sd.clusters])
    mat = (left * (coefficients * np.exp(1j * phase_values))) @ right.T
    rephased = PureState(state.dims, mat.reshape(-1))

    base_lat = modal_lattice(state, cluster_tol=cluster_tol)
    new_lat = modal_lattice(rephased, cluster_tol=cluster_tol)
    if base_lat.num_atoms != new_lat.num_atoms:
        return False
    for a, b in zip(base_lat.atoms, new_lat.atoms):
        if a.rank != b.rank:
            return False
        if float(np.linalg.norm(a.projector() - b.projector())) >= stol:
            return False
    base_weights = born_measure(state, base_lat).atom_weights
    new_weights = born_measure(rephased, new_lat).atom_weights
    return bool(np.max(np.abs(base_weights - new_weights)) < stol)


def sample_assignment(measure: BornMeasure, lat: DefiniteLattice,
                      rng_seed: int) -> ValueAssignment:
    """Draw one value assignment by inverse transform over the atom weights.

    The stream is PCG64 seeded with ``rng_seed``, so the draw is a pure
    function of (measure, seed).
    """
    index = int(sample_counts(measure, lat, 1, rng_seed).argmax())
    return ValueAssignment(
        homomorphism=ValueHomomorphism(true_atom=index, num_atoms=lat.num_atoms),
        seed=int(rng_seed))


def sample_counts(measure: BornMeasure, lat: DefiniteLattice,
                  n: int, rng_seed: int) -> np.ndarray:
    """Count atom hits over ``n`` inverse-transform draws from one seed."""
    if measure.num_atoms != lat.num_atoms:
        raise ValidationError("measure and lattice disagree on the atom count")
    if n < 1:
        raise ValidationError("sample count must be positive")
    total = float(measure.atom_weights.sum())
    if total <= 0.0:
        raise ValidationError("cannot sample from a zero-total measure")
    rng = np.random.Generator(np.random.PCG64(int(rng_seed)))
    draws = rng.random(n) * total
    edges = np.cumsum(measure.atom_weights)
    indices = np.searchsorted(edges, draws, side="right")
    indices = np.minimum(indices, measure.num_atoms - 1)
    return np.bincount(indices, minlength=measure.num_atoms)
