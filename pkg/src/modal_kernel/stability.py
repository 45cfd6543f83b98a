"""Sensitivity of the property basis near spectral degeneracy.

As two weights of a two-factor state approach each other, an arbitrarily
small perturbation of the state rotates the leading property direction
by an angle that grows roughly like the perturbation over the gap.  The
sweep below measures that angle across a range of gaps for a fixed
perturbation strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .hilbert import PureState, Subspace
from .schmidt import SchmidtDecomposition, decompose

__all__ = [
    "StabilityProbe",
    "SweepPoint",
    "largest_principal_angle",
    "basis_rotation_angle",
    "gap_state",
    "perturbation_unitary",
    "degeneracy_sweep",
]


@dataclass(frozen=True)
class StabilityProbe:
    """One sweep setting: spectral gap, perturbation strength, trial count."""

    gap: float
    perturbation: float
    trials: int

    def __post_init__(self):
        if not 0.0 < self.gap < 0.5:
            raise ValidationError(f"gap must lie in (0, 0.5), got {self.gap!r}")
        if not 0.0 < self.perturbation <= 0.1:
            raise ValidationError(
                f"perturbation strength must lie in (0, 0.1], got {self.perturbation!r}")
        if self.trials < 1:
            raise ValidationError("trial count must be positive")


@dataclass(frozen=True)
class SweepPoint:
    gap: float
    mean_angle: float


def largest_principal_angle(a: Subspace, b: Subspace) -> float:
    """Largest principal angle between two subspaces, in [0, pi/2].

    Uses the cosine route (singular values of the basis cross product)
    for large angles and the sine route for small ones, so both ends of
    the range stay accurate.
    """
    if a.ambient_dim != b.ambient_dim:
        raise ValidationError("subspaces must share the ambient dimension")
    if a.rank == 0 or b.rank == 0:
        return 0.0 if a.rank == b.rank else math.pi / 2.0
    cross = a.basis.conj().T @ b.basis
    cosines = np.linalg.svd(cross, compute_uv=False)
    smallest = float(np.clip(cosines[-1], -1.0, 1.0))
    if smallest < math.sqrt(0.5):
        return float(math.acos(smallest))
    residual = b.basis - a.basis @ cross
    sines = np.linalg.svd(residual, compute_uv=False)
    largest = float(np.clip(sines[0], 0.0, 1.0))
    return float(math.asin(largest))


def basis_rotation_angle(reference: SchmidtDecomposition,
                         perturbed: SchmidtDecomposition) -> float:
    """Largest principal angle between the leading factor 1 atoms."""
    if not reference.clusters or not perturbed.clusters:
        raise ValidationError("both decompositions need at least one cluster")
    lead_ref = reference.clusters[0].left_basis
    lead_pert = perturbed.clusters[0].left_basis
    if lead_ref.ambient_dim != lead_pert.ambient_dim:
        raise ValidationError("decompositions live in different factor dimensions")
    if lead_ref.rank != lead_pert.rank:
        return math.pi / 2.0
    return largest_principal_angle(lead_ref, lead_pert)


def gap_state(gap: float) -> PureState:
    """Two-qubit state sqrt(0.5 + gap)|00> + sqrt(0.5 - gap)|11>."""
    if not 0.0 < gap < 0.5:
        raise ValidationError(
            f"gap must lie strictly between 0 and 0.5, got {gap!r}")
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = math.sqrt(0.5 + gap)
    amps[3] = math.sqrt(0.5 - gap)
    return PureState((2, 2), amps)


def perturbation_unitary(delta: float, phase: float = 0.0) -> np.ndarray:
    """exp(i delta G) for the fixed generator G = |1><1| (x) (qubit mix).

    G mixes |0> and |1> on factor 2 inside the branch where factor 1 is
    |1>; the conditioning is what makes the perturbation move the factor
    1 spectrum's eigenvectors at all.  ``phase`` rotates the mixing axis
    in the qubit's equatorial plane.
    """
    mix = np.array([[0.0, np.exp(-1j * phase)],
                    [np.exp(1j * phase), 0.0]], dtype=np.complex128)
    generator = np.kron(np.diag([0.0, 1.0]).astype(np.complex128), mix)
    vals, vecs = np.linalg.eigh(generator)
    return (vecs * np.exp(1j * delta * vals)) @ vecs.conj().T


def degeneracy_sweep(gaps: Sequence[float], delta: float, *,
                     seed: int | None = None, trials: int = 1,
                     randomize: bool = False) -> list[SweepPoint]:
    """Rotation angle of the leading property direction across spectral gaps.

    For each gap the reference state is compared against the same state
    perturbed by a fixed strength-``delta`` rotation; the recorded value
    is the mean angle over ``trials`` (with ``randomize`` the mixing
    axis is drawn per trial from a seeded stream).  Gaps must be sorted
    in descending order and lie inside (0, 0.5).
    """
    gap_values = [float(g) for g in gaps]
    if not gap_values:
        raise ValidationError("at least one gap is required")
    if any(g2 >= g1 for g1, g2 in zip(gap_values, gap_values[1:])):
        raise ValidationError("gaps must be strictly descending")
    for g in gap_values:
        StabilityProbe(gap=g, perturbation=delta, trials=trials)
    rng = np.random.Generator(np.random.PCG64(0 if seed is None else int(seed)))
    phases = (rng.uniform(0.0, 2.0 * math.pi, size=trials) if randomize
              else np.zeros(trials))

    points = []
    for gap in gap_values:
        state = gap_state(gap)
        reference = decompose(state)
        angles = []
        for phase in phases:
            unitary = perturbation_unitary(delta, float(phase))
            perturbed_amps = unitary @ state.amplitudes
            perturbed = decompose(PureState(state.dims, perturbed_amps))
            angles.append(basis_rotation_angle(reference, perturbed))
        points.append(SweepPoint(gap=gap, mean_angle=float(np.mean(angles))))
    return points
