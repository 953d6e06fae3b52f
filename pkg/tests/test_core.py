"""State, observable, and propagator layer."""

import numpy as np
import pytest

from landauer import (
    FactorShape,
    Observable,
    QuantumState,
    UnitaryOp,
    evolve,
    hamiltonian_propagator,
    partial_trace,
    tensor,
    unitary_from_hamiltonian,
)
from landauer.core import eigh_matrix
from landauer.sampling import random_hermitian, random_state, random_unitary


def test_factor_shape_basics():
    s = FactorShape((2, 3, 2))
    assert s.dim == 12
    assert s.nfactors == 3
    assert s.kept((0, 2)).dims == (2, 2)


def test_factor_shape_rejects_bad_dims():
    with pytest.raises(ValueError):
        FactorShape(())
    with pytest.raises(ValueError):
        FactorShape((2, 0))
    with pytest.raises(ValueError):
        FactorShape((2, -3))


def test_state_validation_rejects_non_hermitian():
    m = np.array([[0.5, 0.5], [0.0, 0.5]], dtype=complex)
    with pytest.raises(ValueError):
        QuantumState(m, FactorShape((2,)))


def test_state_validation_rejects_bad_trace():
    with pytest.raises(ValueError):
        QuantumState(np.eye(2, dtype=complex), FactorShape((2,)))


def test_state_validation_rejects_negative_eigenvalue():
    m = np.diag([1.2, -0.2]).astype(complex)
    with pytest.raises(ValueError):
        QuantumState(m, FactorShape((2,)))


def test_state_validation_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        QuantumState(np.eye(2, dtype=complex) / 2, FactorShape((3,)))


def test_probabilities_are_clipped_and_normalized():
    rho = random_state(FactorShape((4,)), np.random.default_rng(3), rank=2)
    p = rho.probabilities()
    assert np.all(p >= 0)
    assert abs(float(np.sum(p)) - 1.0) < 1e-12


def test_observable_expectation_matches_trace():
    rng = np.random.default_rng(7)
    shape = FactorShape((3,))
    rho = random_state(shape, rng)
    a = Observable(random_hermitian(3, rng), shape)
    direct = float(np.real(np.trace(a.matrix @ rho.matrix)))
    assert abs(a.expectation(rho) - direct) < 1e-12


def test_unitary_validation():
    with pytest.raises(ValueError):
        UnitaryOp(np.array([[1, 0], [1, 1]], dtype=complex), FactorShape((2,)))


def test_tensor_is_kron_with_composed_shape():
    rng = np.random.default_rng(11)
    a = random_state(FactorShape((2,)), rng)
    b = random_state(FactorShape((3,)), rng)
    ab = tensor(a, b)
    assert ab.shape.dims == (2, 3)
    assert np.allclose(ab.matrix, np.kron(a.matrix, b.matrix), atol=1e-14)


def test_partial_trace_recovers_product_marginals():
    rng = np.random.default_rng(13)
    a = random_state(FactorShape((2,)), rng)
    b = random_state(FactorShape((3,)), rng)
    ab = tensor(a, b)
    assert np.allclose(partial_trace(ab, (0,)).matrix, a.matrix, atol=1e-13)
    assert np.allclose(partial_trace(ab, (1,)).matrix, b.matrix, atol=1e-13)


def test_partial_trace_of_bell_state_is_maximally_mixed():
    bell = np.zeros((4, 4), dtype=complex)
    for i in (0, 3):
        for j in (0, 3):
            bell[i, j] = 0.5
    rho = QuantumState(bell, FactorShape((2, 2)))
    for keep in ((0,), (1,)):
        m = partial_trace(rho, keep).matrix
        assert np.allclose(m, np.eye(2) / 2, atol=1e-14)


def test_partial_trace_three_factors_keeps_order():
    rng = np.random.default_rng(17)
    parts = [random_state(FactorShape((d,)), rng) for d in (2, 3, 2)]
    joint = tensor(tensor(parts[0], parts[1]), parts[2])
    kept = partial_trace(joint, (0, 2))
    expected = np.kron(parts[0].matrix, parts[2].matrix)
    assert kept.shape.dims == (2, 2)
    assert np.allclose(kept.matrix, expected, atol=1e-13)


def test_partial_trace_rejects_bad_keep():
    rho = random_state(FactorShape((2, 2)), np.random.default_rng(0))
    with pytest.raises(ValueError):
        partial_trace(rho, ())
    with pytest.raises(ValueError):
        partial_trace(rho, (2,))
    # duplicate indices collapse to one factor
    assert partial_trace(rho, (0, 0)).shape.dims == (2,)


def test_eigh_matrix_sorted_and_reconstructs():
    rng = np.random.default_rng(19)
    m = random_hermitian(6, rng, scale=3.0)
    w, v = eigh_matrix(m)
    assert np.all(np.diff(w) >= 0)
    assert np.allclose((v * w) @ v.conj().T, m, atol=1e-10)


def test_unitary_from_hamiltonian_group_law():
    rng = np.random.default_rng(23)
    shape = FactorShape((4,))
    h = Observable(random_hermitian(4, rng), shape)
    u1 = unitary_from_hamiltonian(h, 0.7)
    u2 = unitary_from_hamiltonian(h, 1.1)
    u12 = unitary_from_hamiltonian(h, 1.8)
    assert np.allclose(u1.matrix @ u2.matrix, u12.matrix, atol=1e-12)
    # short-time series check: U = 1 - iHt - (Ht)^2/2 + O(t^3)
    t = 1e-3
    ut = unitary_from_hamiltonian(h, t).matrix
    series = (np.eye(4) - 1j * h.matrix * t
              - (h.matrix @ h.matrix) * t * t / 2)
    assert np.max(np.abs(ut - series)) < 10 * t ** 3


def test_propagator_closure_is_deterministic():
    rng = np.random.default_rng(29)
    shape = FactorShape((3,))
    h = Observable(random_hermitian(3, rng), shape)
    prop = hamiltonian_propagator(h)
    a = prop(0.4).matrix
    b = prop(0.4).matrix
    assert np.array_equal(a, b)
    assert np.allclose(a, unitary_from_hamiltonian(h, 0.4).matrix, atol=1e-13)


def test_evolve_preserves_spectrum():
    rng = np.random.default_rng(31)
    shape = FactorShape((4,))
    rho = random_state(shape, rng)
    u = UnitaryOp(random_unitary(4, rng), shape)
    out = evolve(rho, u)
    assert np.allclose(np.sort(np.linalg.eigvalsh(out.matrix)),
                       np.sort(np.linalg.eigvalsh(rho.matrix)), atol=1e-12)


def test_evolve_rejects_dimension_mismatch():
    rng = np.random.default_rng(37)
    rho = random_state(FactorShape((2,)), rng)
    u = UnitaryOp(random_unitary(3, rng), FactorShape((3,)))
    with pytest.raises(ValueError):
        evolve(rho, u)
