"""Numerical tolerance settings.

Every comparison threshold used by the package is collected in one
frozen dataclass so a run can be re-tuned from a single place (or from
a JSON config file, see the CLI module).
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Any, Mapping

from .errors import ValidationError


@dataclass(frozen=True)
class Tolerances:
    """Thresholds for the package's numerical contracts.

    norm_tol         deviation of a state's squared norm from 1
    herm_tol         max-entry deviation of an operator from its adjoint
    ortho_tol        deviation of a basis Gram matrix from the identity
    rank_tol         relative cutoff below which singular values and
                     weights are treated as zero
    cluster_tol      relative spectral gap below which eigenvalues are
                     treated as degenerate
    subspace_eq_tol  Frobenius distance between projectors below which
                     two subspaces count as equal
    env_tol          elementwise defect allowed in a compensating
                     unitary pair
    add_tol          defect allowed in additivity checks
    recon_tol        norm error allowed when a decomposition is
                     reassembled into the input vector
    """

    norm_tol: float = 1e-10
    herm_tol: float = 1e-10
    ortho_tol: float = 1e-10
    rank_tol: float = 1e-10
    cluster_tol: float = 1e-8
    subspace_eq_tol: float = 1e-9
    env_tol: float = 1e-10
    add_tol: float = 1e-12
    recon_tol: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()

_FIELD_NAMES = tuple(f.name for f in fields(Tolerances))


def tolerances_from_mapping(data: Mapping[str, Any],
                            base: Tolerances = DEFAULT_TOLERANCES) -> Tolerances:
    """Build a Tolerances value from a partial mapping, rejecting unknown keys."""
    overrides = {}
    for key, value in data.items():
        if key not in _FIELD_NAMES:
            raise ValidationError(f"unknown tolerance field {key!r}")
        overrides[key] = float(value)
        if overrides[key] <= 0.0:
            raise ValidationError(f"tolerance {key!r} must be positive, got {value!r}")
    return replace(base, **overrides)
