import numpy as np
import pytest

from modal_kernel import (
    BornMeasure,
    HermitianOperator,
    PureState,
    Subspace,
    ValidationError,
    ValueAssignment,
    additivity_check,
    born_measure,
    coarse_grain,
    decompose,
    definite_lattice,
    modal_lattice,
    orthodox_lattice,
    phase_invariance_check,
    sample_assignment,
    sample_counts,
)
from helpers import make_rng, planted_schmidt_state, random_state


def two_term_state():
    return PureState((2, 2), [0.6, 0.0, 0.0, 0.8])


def three_term_state():
    # sqrt(0.5)|00> + sqrt(0.3)|11> + sqrt(0.2)|22>
    mat = np.diag(np.sqrt([0.5, 0.3, 0.2]))
    return PureState((3, 3), mat.reshape(-1))


# ------------------------------------------------------------------ born

def test_born_weights_on_modal_lattice():
    state = two_term_state()
    lat = modal_lattice(state)
    measure = born_measure(state, lat)
    np.testing.assert_allclose(measure.atom_weights, [0.64, 0.36], atol=1e-15)


def test_born_weights_on_orthodox_lattice():
    rng = make_rng(31)
    state = random_state((6,), rng)
    measure = born_measure(state, orthodox_lattice(state))
    np.testing.assert_allclose(measure.atom_weights, [1.0, 0.0], atol=1e-12)


def test_born_factor_route_matches_full_space_route():
    rng = make_rng(32)
    for _ in range(15):
        state = random_state((3, 4), rng)
        lat = modal_lattice(state)
        via_reduced = born_measure(state, lat).atom_weights
        # oracle: weight of P (x) I on the joint state
        direct = []
        for atom in lat.atoms:
            p = np.kron(atom.projector(), np.eye(4))
            direct.append(float(np.real(
                np.vdot(state.amplitudes, p @ state.amplitudes))))
        np.testing.assert_allclose(via_reduced, direct, atol=1e-12)


def test_born_weights_equal_squared_coefficients():
    rng = make_rng(33)
    for _ in range(20):
        state = random_state((4, 5), rng)
        sd = decompose(state)
        lat = modal_lattice(state)
        measure = born_measure(state, lat)
        expected = [c.weight * c.multiplicity for c in sd.clusters]
        if lat.num_atoms == len(expected) + 1:  # null atom present
            expected.append(0.0)
        np.testing.assert_allclose(measure.atom_weights, expected, atol=1e-12)


def test_born_weights_degenerate_cluster():
    rng = make_rng(34)
    state = planted_schmidt_state(4, 4, [0.3, 0.3, 0.25, 0.15], rng)
    measure = born_measure(state, modal_lattice(state))
    np.testing.assert_allclose(measure.atom_weights, [0.6, 0.25, 0.15], atol=1e-9)


def test_born_dimension_mismatch_rejected():
    state = two_term_state()
    lat = modal_lattice(PureState((3, 3), np.eye(3).reshape(-1) / np.sqrt(3)))
    with pytest.raises(ValidationError):
        born_measure(state, lat)


def test_preferred_observable_measure_sums_to_one():
    rng = make_rng(35)
    from helpers import planted_hermitian
    for _ in range(10):
        state = random_state((6,), rng)
        r = planted_hermitian(6, [2, 2, 2], rng)
        lat = definite_lattice(state, r)
        measure = born_measure(state, lat)
        assert abs(measure.atom_weights.sum() - 1.0) < 1e-12
        for s, w in zip(lat.atoms, measure.atom_weights):
            direct = float(np.real(np.vdot(state.amplitudes,
                                           s.projector() @ state.amplitudes)))
            assert abs(w - direct) < 1e-12


def test_measure_validation():
    with pytest.raises(ValidationError):
        BornMeasure(atom_weights=np.array([0.0, 0.0]))
    with pytest.raises(ValidationError):
        BornMeasure(atom_weights=np.array([0.7, 0.7]))
    with pytest.raises(ValidationError):
        BornMeasure(atom_weights=np.array([-0.1, 1.1]))
    with pytest.raises(ValidationError):
        BornMeasure(atom_weights=np.array([]))


def test_element_weight_adds_atoms():
    m = BornMeasure(atom_weights=np.array([0.5, 0.3, 0.2]))
    assert abs(m.element_weight([0, 2]) - 0.7) < 1e-15
    assert m.element_weight([]) == 0.0
    assert abs(m.element_weight([0, 1, 2]) - 1.0) < 1e-15
    with pytest.raises(ValidationError):
        m.element_weight([3])


# ---------------------------------------------------------- coarse grain

def test_coarse_grain_merges_lower_pair():
    state = three_term_state()
    merged = coarse_grain(state, [1, 2])
    sd = decompose(merged)
    np.testing.assert_allclose(sorted(sd.term_weights, reverse=True),
                               [0.5, 0.5], atol=1e-12)


def test_coarse_grain_merges_upper_pair():
    state = three_term_state()
    merged = coarse_grain(state, [0, 1])
    sd = decompose(merged)
    np.testing.assert_allclose(sd.term_weights, [0.8, 0.2], atol=1e-12)
    # untouched term keeps its rays
    low = sd.clusters[-1]
    assert abs(abs(low.left_basis.basis[2, 0]) - 1.0) < 1e-9
    assert abs(abs(low.right_basis.basis[2, 0]) - 1.0) < 1e-9
    # merged term anchors on the lowest merged index's factor 2 vector
    top = sd.clusters[0]
    assert abs(abs(top.right_basis.basis[0, 0]) - 1.0) < 1e-9


def test_coarse_grain_random_states_spectrum():
    rng = make_rng(36)
    for _ in range(10):
        state = planted_schmidt_state(4, 4, [0.4, 0.3, 0.2, 0.1], rng)
        merged = coarse_grain(state, [1, 3])
        sd = decompose(merged)
        np.testing.assert_allclose(sd.term_weights, [0.4, 0.4, 0.2], atol=1e-9)


def test_coarse_grain_preserves_norm_and_factor_shape():
    state = three_term_state()
    merged = coarse_grain(state, [0, 2])
    assert merged.dims == state.dims
    assert abs(np.linalg.norm(merged.amplitudes) - 1.0) < 1e-12


def test_coarse_grain_rejects_degenerate_spectrum():
    bell = PureState((2, 2), np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2))
    with pytest.raises(ValidationError):
        coarse_grain(bell, [0, 1])


def test_coarse_grain_index_validation():
    state = three_term_state()
    with pytest.raises(ValidationError):
        coarse_grain(state, [1])
    with pytest.raises(ValidationError):
        coarse_grain(state, [0, 3])
    with pytest.raises(ValidationError):
        coarse_grain(state, [-1, 1])


# ------------------------------------------------------------- additivity

def test_identity_is_additive():
    rng = make_rng(37)
    for _ in range(50):
        k = int(rng.integers(2, 7))
        weights = rng.uniform(0.05, 0.15, size=k)
        assert additivity_check(weights, lambda x: x)


def test_nonlinear_maps_fail_additivity():
    rng = make_rng(38)
    for f in (lambda x: x ** 2, np.sqrt, lambda x: x ** 3):
        for _ in range(20):
            k = int(rng.integers(2, 7))
            weights = rng.uniform(0.05, 0.15, size=k)
            assert not additivity_check(weights, f)
            # the defect is macroscopic, not a tolerance accident
            defect = abs(f(weights.sum()) - sum(f(w) for w in weights))
            assert defect > 1e-3


def test_additivity_validation():
    with pytest.raises(ValidationError):
        additivity_check([], lambda x: x)
    with pytest.raises(ValidationError):
        additivity_check([-0.2, 0.4], lambda x: x)
    with pytest.raises(ValidationError):
        additivity_check([0.8, 0.8], lambda x: x)


# ------------------------------------------------------- phase invariance

def test_phase_invariance_random_states():
    rng = make_rng(39)
    for _ in range(10):
        state = random_state((3, 4), rng)
        sd = decompose(state)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=sd.rank)
        assert phase_invariance_check(state, phases)


def test_phase_invariance_needs_one_phase_per_term():
    state = two_term_state()
    with pytest.raises(ValidationError):
        phase_invariance_check(state, [0.1, 0.2, 0.3])


# ---------------------------------------------------------------- sampler

def test_sample_counts_deterministic():
    state = two_term_state()
    lat = modal_lattice(state)
    measure = born_measure(state, lat)
    a = sample_counts(measure, lat, 10_000, 7)
    b = sample_counts(measure, lat, 10_000, 7)
    np.testing.assert_array_equal(a, b)
    c = sample_counts(measure, lat, 10_000, 8)
    assert not np.array_equal(a, c)
    assert a.sum() == 10_000


def test_sample_counts_frequencies():
    state = two_term_state()
    lat = modal_lattice(state)
    measure = born_measure(state, lat)
    n = 100_000
    counts = sample_counts(measure, lat, n, 12345)
    sigma = np.sqrt(0.64 * 0.36 / n)
    assert abs(counts[0] / n - 0.64) < 3 * sigma


def test_sample_assignment_reproducible():
    state = two_term_state()
    lat = modal_lattice(state)
    measure = born_measure(state, lat)
    a = sample_assignment(measure, lat, 99)
    b = sample_assignment(measure, lat, 99)
    assert a == b
    assert a.seed == 99
    assert 0 <= a.homomorphism.true_atom < lat.num_atoms
    assert a.homomorphism.num_atoms == lat.num_atoms


def test_sample_assignment_frequencies_across_seeds():
    state = two_term_state()
    lat = modal_lattice(state)
    measure = born_measure(state, lat)
    hits = sum(sample_assignment(measure, lat, seed).homomorphism.true_atom == 0
               for seed in range(1000))
    assert abs(hits / 1000 - 0.64) < 0.05


def test_sampler_validation():
    state = two_term_state()
    lat = modal_lattice(state)
    measure = born_measure(state, lat)
    with pytest.raises(ValidationError):
        sample_counts(measure, lat, 0, 1)
    other = BornMeasure(atom_weights=np.array([0.2, 0.3, 0.5]))
    with pytest.raises(ValidationError):
        sample_counts(other, lat, 10, 1)
