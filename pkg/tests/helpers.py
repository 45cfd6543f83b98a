"""Shared sampling utilities for the test suite.

Oracles live next to the tests that use them; this module only holds
generators for random instances (states, observables, unitaries) and
small comparison helpers.
"""

from __future__ import annotations

import numpy as np

from modal_kernel import PureState, HermitianOperator, Subspace, subspace_equal


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_state(dims, rng: np.random.Generator) -> PureState:
    n = int(np.prod(dims))
    amps = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(dims, amps / np.linalg.norm(amps))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    gauss = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(gauss)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_hermitian(n: int, rng: np.random.Generator) -> HermitianOperator:
    mat = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return HermitianOperator((mat + mat.conj().T) / 2.0)


def planted_hermitian(n: int, multiplicities, rng: np.random.Generator,
                      eigenvalues=None) -> HermitianOperator:
    """Hermitian operator with exactly the given eigenvalue multiplicities."""
    multiplicities = list(multiplicities)
    assert sum(multiplicities) == n
    if eigenvalues is None:
        # well separated values so clustering decisions are unambiguous
        base = rng.uniform(1.0, 2.0)
        eigenvalues = [base + 1.5 * k for k in range(len(multiplicities))]
    diag = np.concatenate([np.full(m, v) for v, m in zip(eigenvalues, multiplicities)])
    u = random_unitary(n, rng)
    mat = (u * diag) @ u.conj().T
    return HermitianOperator((mat + mat.conj().T) / 2.0)


def planted_schmidt_state(d1: int, d2: int, weights, rng: np.random.Generator) -> PureState:
    """Two-factor state with a prescribed coefficient spectrum."""
    weights = np.array(weights, dtype=float)
    r = weights.size
    assert r <= min(d1, d2)
    assert abs(weights.sum() - 1.0) < 1e-12
    left = random_unitary(d1, rng)[:, :r]
    right = random_unitary(d2, rng)[:, :r]
    mat = (left * np.sqrt(weights)) @ right.T
    return PureState((d1, d2), mat.reshape(-1))


def match_atoms(atoms_a, atoms_b, tol: float = 1e-9) -> bool:
    """Set-wise subspace equality between two atom collections."""
    if len(atoms_a) != len(atoms_b):
        return False
    unused = list(range(len(atoms_b)))
    for a in atoms_a:
        hit = None
        for j in unused:
            if subspace_equal(a, atoms_b[j], tol=tol):
                hit = j
                break
        if hit is None:
            return False
        unused.remove(hit)
    return True


def preserving_automorphism(state: PureState, r: HermitianOperator,
                            rng: np.random.Generator,
                            cluster_tol: float | None = None) -> np.ndarray:
    """Random unitary fixing the state vector and every eigenspace of r.

    Within each eigenspace the component of the state is held fixed and
    the orthogonal remainder is rotated arbitrarily; eigenspaces without
    a state component are rotated wholesale.
    """
    from modal_kernel import eigenspaces, project_state

    n = state.dim
    u = np.zeros((n, n), dtype=np.complex128)
    for _, eigenspace in eigenspaces(r, cluster_tol):
        basis = eigenspace.basis
        d = eigenspace.rank
        _, weight = project_state(state, eigenspace)
        if weight < 1e-10:
            block = random_unitary(d, rng)
            u += basis @ block @ basis.conj().T
            continue
        coords = (basis.conj().T @ state.amplitudes)
        coords = coords / np.linalg.norm(coords)
        q, _, _ = np.linalg.svd(coords.reshape(-1, 1), full_matrices=True)
        # q's first column spans the state's direction inside the eigenspace
        block = np.eye(d, dtype=np.complex128)
        if d > 1:
            block[1:, 1:] = random_unitary(d - 1, rng)
        rotated = q @ block @ q.conj().T
        u += basis @ rotated @ basis.conj().T
    return u
