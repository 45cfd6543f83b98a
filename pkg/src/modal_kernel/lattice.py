"""Boolean lattices of definite-valued projectors.

Given a state and a preferred observable, each eigenspace of the
observable contributes the projection of the state inside it, the
complement of that projection within the eigenspace, or (when the state
has no component there) the whole eigenspace.  The resulting atoms are
mutually orthogonal, sum to the identity, and generate a Boolean
algebra.  The two-factor variant takes the eigenspaces of the reduced
density operator on the first factor as atoms.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES as _TOL
from .errors import ValidationError
from .hilbert import (
    HermitianOperator,
    PureState,
    Subspace,
    eigenspaces,
    project_state,
    span,
    subspace_equal,
)
from .schmidt import SchmidtDecomposition

__all__ = [
    "DefiniteLattice",
    "ValueHomomorphism",
    "definite_lattice",
    "orthodox_lattice",
    "modal_lattice",
    "restrict_to_first_factor",
    "degenerate_property_projectors",
    "enumerate_homomorphisms",
    "check_valuation_laws",
    "BCVerdict",
    "bub_clifton_membership",
]

# sort order of label kinds used to break exact weight-and-index ties
_KIND_ORDER = {"psi_projection": 0, "complement_in_eigenspace": 1,
               "whole_eigenspace": 2}


@dataclass(frozen=True, eq=False)
class DefiniteLattice:
    """Atomic Boolean lattice of subspaces of one ambient space.

    The atoms are mutually orthogonal and sum to the identity, so every
    lattice element is a join of atoms and can be named by a set of atom
    indices.  ``labels`` records where each atom came from.
    """

    ambient_dim: int
    atoms: tuple[Subspace, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if len(self.atoms) != len(self.labels):
            raise ValidationError("one label per atom is required")
        if not self.atoms:
            raise ValidationError("a lattice needs at least one atom")
        tol = _TOL.subspace_eq_tol
        projectors = [a.projector() for a in self.atoms]
        for a in self.atoms:
            if a.ambient_dim != self.ambient_dim:
                raise ValidationError("all atoms must share the ambient dimension")
            if a.rank == 0:
                raise ValidationError("atoms must be nonzero subspaces")
        for i, j in itertools.combinations(range(len(projectors)), 2):
            overlap = float(np.linalg.norm(projectors[i] @ projectors[j]))
            if overlap > tol:
                raise ValidationError(
                    f"atoms {i} and {j} are not orthogonal (overlap {overlap:.3e})")
        total = sum(projectors)
        defect = float(np.linalg.norm(total - np.eye(self.ambient_dim)))
        if defect > tol * max(1, len(projectors)):
            raise ValidationError(
                f"atoms do not sum to the identity (defect {defect:.3e})")

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    def element(self, atom_indices: Iterable[int]) -> Subspace:
        """Join of the named atoms (the zero subspace for no indices)."""
        indices = sorted(set(int(i) for i in atom_indices))
        for i in indices:
            if not 0 <= i < self.num_atoms:
                raise ValidationError(f"atom index {i} out of range")
        if not indices:
            return Subspace.zero(self.ambient_dim)
        stacked = np.hstack([self.atoms[i].basis for i in indices])
        return Subspace(stacked)

    def contains(self, s: Subspace, tol: float | None = None) -> bool:
        """Whether a subspace is a lattice element, i.e. a join of atoms."""
        if s.ambient_dim != self.ambient_dim:
            raise ValidationError("subspace ambient dimension does not match lattice")
        t = _TOL.subspace_eq_tol if tol is None else tol
        p = s.projector()
        inside = [i for i, atom in enumerate(self.atoms)
                  if np.linalg.norm(p @ atom.projector() - atom.projector()) < t]
        return subspace_equal(self.element(inside), s, tol=t)


@dataclass(frozen=True)
class ValueHomomorphism:
    """Two-valued Boolean homomorphism determined by one true atom.

    Elements are joins of atoms, named either by an iterable of atom
    indices or by a bitmask over atoms.  The valuation maps an element
    to 1 exactly when the true atom lies under it, which makes joins go
    to OR, meets to AND, and complements to NOT.
    """

    true_atom: int
    num_atoms: int

    def __post_init__(self):
        if not 0 <= self.true_atom < self.num_atoms:
            raise ValidationError(
                f"true atom {self.true_atom} out of range for {self.num_atoms} atoms")

    def value(self, element: Iterable[int]) -> int:
        indices = set(int(i) for i in element)
        for i in indices:
            if not 0 <= i < self.num_atoms:
                raise ValidationError(f"atom index {i} out of range")
        return 1 if self.true_atom in indices else 0

    def value_of_mask(self, mask: int) -> int:
        return (int(mask) >> self.true_atom) & 1

    def values_of_masks(self, masks: np.ndarray) -> np.ndarray:
        """Vectorized valuation over an array of element bitmasks."""
        return ((np.asarray(masks, dtype=np.uint64) >> np.uint64(self.true_atom))
                & np.uint64(1)).astype(np.uint8)


def _atom_sort_key(entry):
    weight, eigenspace_index, kind = entry
    return (-weight, eigenspace_index, _KIND_ORDER[kind])


def definite_lattice(state: PureState, r: HermitianOperator,
                     *, cluster_tol: float | None = None,
                     rank_tol: float | None = None) -> DefiniteLattice:
    """Definite-property lattice of a state relative to a preferred observable.

    For each eigenspace of ``r`` (degenerate eigenvalues are clustered),
    the state's projection into the eigenspace contributes a one
    dimensional atom, and the orthogonal remainder of the eigenspace,
    when nonempty, contributes a second atom.  Eigenspaces carrying no
    component of the state (projection weight below ``rank_tol``) enter
    whole.  Atoms are sorted by descending projection weight, then by
    eigenspace index.
    """
    rtol = _TOL.rank_tol if rank_tol is None else rank_tol
    n = state.dim
    if r.dim != n:
        raise ValidationError(
            f"observable dimension {r.dim} does not match state dimension {n}")
    entries = []  # (sort key fields, atom, label)
    for idx, (_, eigenspace) in enumerate(eigenspaces(r, cluster_tol, rank_tol=rank_tol)):
        component, weight = project_state(state, eigenspace)
        if weight < rtol:
            entries.append(((weight, idx, "whole_eigenspace"), eigenspace,
                            f"whole_eigenspace({idx})"))
            continue
        direction = component / np.sqrt(weight)
        entries.append(((weight, idx, "psi_projection"),
                        Subspace(direction.reshape(-1, 1)),
                        f"psi_projection({idx})"))
        if eigenspace.rank > 1:
            # complement of the projected direction inside the eigenspace,
            # built in eigenspace coordinates to stay exactly orthonormal
            coords = eigenspace.basis.conj().T @ state.amplitudes
            coords = coords / np.linalg.norm(coords)
            u, _, _ = np.linalg.svd(coords.reshape(-1, 1), full_matrices=True)
            rest = eigenspace.basis @ u[:, 1:]
            rest_weight = float(np.real(
                np.vdot(state.amplitudes, rest @ (rest.conj().T @ state.amplitudes))))
            entries.append(((rest_weight, idx, "complement_in_eigenspace"),
                            Subspace(rest), f"complement_in_eigenspace({idx})"))
    entries.sort(key=lambda e: _atom_sort_key(e[0]))
    return DefiniteLattice(ambient_dim=n,
                           atoms=tuple(e[1] for e in entries),
                           labels=tuple(e[2] for e in entries))


def orthodox_lattice(state: PureState) -> DefiniteLattice:
    """Definite-property lattice with a trivial preferred observable.

    Taking the identity (or equivalently the state's own projector) as
    the observable leaves only the state direction and its orthogonal
    complement definite, a four element lattice.
    """
    return definite_lattice(state, HermitianOperator.identity(state.dim))


def modal_lattice(state: PureState, *, cluster_tol: float | None = None,
                  rank_tol: float | None = None) -> DefiniteLattice:
    """Definite-property lattice on factor 1 singled out by the factorization.

    The atoms are the eigenspaces of the reduced density operator of the
    first factor, ordered by descending eigenvalue; a nonempty null
    space enters as one atom.  Labels are ``w_0``, ``w_1``, ... in that
    order.
    """
    from .hilbert import partial_trace

    if state.num_factors != 2:
        raise ValidationError(
            f"modal_lattice needs a state with exactly 2 factors, got {state.num_factors}")
    w1 = partial_trace(state, 0)
    spaces = eigenspaces(w1, cluster_tol, rank_tol=rank_tol)
    return DefiniteLattice(ambient_dim=state.dims[0],
                           atoms=tuple(s for _, s in spaces),
                           labels=tuple(f"w_{i}" for i in range(len(spaces))))


def restrict_to_first_factor(lat: DefiniteLattice, dims: Sequence[int],
                             tol: float = 1e-8) -> DefiniteLattice:
    """Restrict a lattice on a two-factor space to elements of the form P (x) I.

    Atoms are grouped into the smallest unions whose joined projector
    factors as P (x) I; the collection of those P is returned as a
    lattice on the first factor.  Groups keep the order of their first
    constituent atom.
    """
    d1, d2 = (int(d) for d in dims)
    if d1 * d2 != lat.ambient_dim:
        raise ValidationError(
            f"factor dimensions {d1}x{d2} do not match ambient dimension {lat.ambient_dim}")
    projectors = [a.projector() for a in lat.atoms]
    identity2 = np.eye(d2, dtype=np.complex128)

    def first_factor_part(q: np.ndarray) -> np.ndarray:
        return q.reshape(d1, d2, d1, d2).trace(axis1=1, axis2=3) / d2

    remaining = set(range(lat.num_atoms))
    groups: list[list[int]] = []
    while remaining:
        group = {min(remaining)}
        while True:
            q = sum(projectors[i] for i in group)
            p = first_factor_part(q)
            if np.linalg.norm(q - np.kron(p, identity2)) < tol * max(1.0, d2):
                break
            grew = False
            for j in sorted(remaining - group):
                if np.linalg.norm(projectors[j] @ np.kron(p, identity2)) > tol:
                    group.add(j)
                    grew = True
            if not grew:
                raise ValidationError(
                    "lattice has no product-form closure over the given factorization")
        groups.append(sorted(group))
        remaining -= group
    atoms = []
    for group in groups:
        q = sum(projectors[i] for i in group)
        atoms.append(Subspace.from_projector(first_factor_part(q)))
    return DefiniteLattice(ambient_dim=d1, atoms=tuple(atoms),
                           labels=tuple(f"w_{i}" for i in range(len(atoms))))


def degenerate_property_projectors(sd: SchmidtDecomposition) -> list[Subspace]:
    """Factor 1 property subspaces of a decomposition, one per cluster.

    Each cluster of equal weights contributes the span of its left
    vectors.  For a two-factor state these coincide with the nonzero
    weight atoms of the factor's lattice.
    """
    return [cluster.left_basis for cluster in sd.clusters]


def enumerate_homomorphisms(lat: DefiniteLattice) -> list[ValueHomomorphism]:
    """All two-valued homomorphisms of the lattice, one per atom."""
    return [ValueHomomorphism(true_atom=i, num_atoms=lat.num_atoms)
            for i in range(lat.num_atoms)]


def check_valuation_laws(hom: ValueHomomorphism, *, exhaustive_limit: int = 12,
                         sample_pairs: int = 4096,
                         rng: np.random.Generator | None = None) -> bool:
    """Verify a valuation against the Boolean laws.

    For ``num_atoms`` up to ``exhaustive_limit`` every element pair is
    checked; beyond that, complements are still checked exhaustively in
    chunks while join and meet laws are spot-checked on sampled pairs.
    """
    m = hom.num_atoms
    full = (1 << m) - 1

    def laws_hold(left: np.ndarray, right: np.ndarray) -> bool:
        v_left = hom.values_of_masks(left)
        v_right = hom.values_of_masks(right)
        if not np.array_equal(hom.values_of_masks(left | right), v_left | v_right):
            return False
        if not np.array_equal(hom.values_of_masks(left & right), v_left & v_right):
            return False
        return True

    if m <= exhaustive_limit:
        elements = np.arange(1 << m, dtype=np.uint64)
        values = hom.values_of_masks(elements)
        if hom.value_of_mask(0) != 0 or hom.value_of_mask(full) != 1:
            return False
        if not np.array_equal(hom.values_of_masks(np.uint64(full) ^ elements),
                              1 - values):
            return False
        chunk = max(1, (1 << 22) // max(1, elements.size))
        for lo in range(0, elements.size, chunk):
            if not laws_hold(elements[lo:lo + chunk, None], elements[None, :]):
                return False
        return True

    gen = np.random.default_rng(0) if rng is None else rng
    if hom.value_of_mask(0) != 0 or hom.value_of_mask(full) != 1:
        return False
    left = gen.integers(0, 1 << m, size=sample_pairs, dtype=np.uint64)
    right = gen.integers(0, 1 << m, size=sample_pairs, dtype=np.uint64)
    if not np.array_equal(hom.values_of_masks(np.uint64(full) ^ left),
                          1 - hom.values_of_masks(left)):
        return False
    return laws_hold(left, right)


class BCVerdict(enum.Enum):
    """Outcome of a definite-set membership query.

    MEMBER and NOT_MEMBER are definite answers; UNSPECIFIED marks
    queries whose status the underlying criterion leaves open (a
    subspace confined to the null-weight sector but straddling several
    of its eigenspace blocks).  Only MEMBER is truthy.
    """

    MEMBER = "member"
    NOT_MEMBER = "not_member"
    UNSPECIFIED = "unspecified-by-paper"

    def __bool__(self) -> bool:
        return self is BCVerdict.MEMBER


def bub_clifton_membership(state: PureState, r: HermitianOperator, p: Subspace,
                           *, cluster_tol: float | None = None,
                           rank_tol: float | None = None,
                           tol: float | None = None) -> BCVerdict:
    """Test a subspace against the maximal definite set for (state, r).

    The definite set contains every join of lattice atoms, and in
    addition arbitrary subspaces confined to a single null-weight block
    (an eigenspace without a state component, or the remainder of an
    eigenspace orthogonal to the state's projection).  A subspace that
    straddles a nonzero-weight atom is rejected outright; one confined
    to the null-weight sector but mixing several of its blocks is
    reported as UNSPECIFIED rather than guessed at.
    """
    t = _TOL.subspace_eq_tol if tol is None else tol
    lat = definite_lattice(state, r, cluster_tol=cluster_tol, rank_tol=rank_tol)
    if p.ambient_dim != state.dim:
        raise ValidationError("query subspace has the wrong ambient dimension")
    pp = p.projector()

    q = pp.copy()
    for atom, label in zip(lat.atoms, lat.labels):
        if not label.startswith("psi_projection"):
            continue
        pa = atom.projector()
        fully_inside = float(np.linalg.norm(pp @ pa - pa)) < t
        fully_outside = float(np.linalg.norm(pp @ pa)) < t
        if fully_inside:
            q = q - pa
        elif not fully_outside:
            return BCVerdict.NOT_MEMBER
    if float(np.linalg.norm(q)) < t:
        return BCVerdict.MEMBER

    null_blocks = [atom.projector() for atom, label in zip(lat.atoms, lat.labels)
                   if not label.startswith("psi_projection")]
    if not null_blocks:
        return BCVerdict.NOT_MEMBER
    block_diagonal = sum(pn @ q @ pn for pn in null_blocks)
    if float(np.linalg.norm(q - block_diagonal)) < t:
        return BCVerdict.MEMBER
    total_null = sum(null_blocks)
    if float(np.linalg.norm(q - total_null @ q @ total_null)) < t:
        return BCVerdict.UNSPECIFIED
    return BCVerdict.NOT_MEMBER
