"""Entropy, divergence, reference states, and flows.

Frozen scalars below were computed from the closed forms, not from the
library: S(0.25, 0.75) = -(0.25 ln 0.25 + 0.75 ln 0.75), the two-point
divergence from p ln(p/q) sums, and the beta = 1 two-level Gibbs weight
1/(1 + e^{-1}).
"""

import math

import numpy as np
import pytest

from landauer import (
    FactorShape,
    Observable,
    QuantumState,
    ReferenceEnsemble,
    UnitaryOp,
    flows,
    generalized_gibbs,
    gibbs_state,
    log_partition,
    mutual_information,
    noneq_free_energy,
    relative_entropy,
    tensor,
    von_neumann_entropy,
)
from landauer.sampling import (
    random_hermitian,
    random_pure_state,
    random_state,
    random_unitary,
)

ENTROPY_QUARTER = 0.5623351446188083
LN2 = 0.6931471805599453
DIV_37_HALF = 0.08228287850505178
GIBBS_P0_BETA1 = 0.7310585786300049

Q2 = FactorShape((2,))


def diag_state(*pops):
    return QuantumState(np.diag(pops).astype(complex), FactorShape((len(pops),)))


def test_entropy_frozen_two_level_value():
    assert abs(von_neumann_entropy(diag_state(0.25, 0.75)) - ENTROPY_QUARTER) < 1e-14


def test_entropy_pure_state_is_zero():
    psi = random_pure_state(FactorShape((5,)), np.random.default_rng(1))
    assert abs(von_neumann_entropy(psi)) < 1e-12


def test_entropy_maximally_mixed_is_log_dim():
    assert abs(von_neumann_entropy(diag_state(0.5, 0.5)) - LN2) < 1e-14
    d = 7
    mm = QuantumState(np.eye(d, dtype=complex) / d, FactorShape((d,)))
    assert abs(von_neumann_entropy(mm) - math.log(d)) < 1e-12


def test_entropy_unitary_invariant():
    rng = np.random.default_rng(5)
    shape = FactorShape((4,))
    rho = random_state(shape, rng)
    u = UnitaryOp(random_unitary(4, rng), shape)
    rotated = QuantumState(u.matrix @ rho.matrix @ u.matrix.conj().T, shape)
    assert abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) < 1e-11


def test_relative_entropy_frozen_value_and_axioms():
    rho = diag_state(0.3, 0.7)
    sig = diag_state(0.5, 0.5)
    assert abs(relative_entropy(rho, sig) - DIV_37_HALF) < 1e-14
    assert abs(relative_entropy(rho, rho)) < 1e-12
    rng = np.random.default_rng(9)
    for _ in range(20):
        a = random_state(FactorShape((3,)), rng)
        b = random_state(FactorShape((3,)), rng)
        assert relative_entropy(a, b) >= -1e-12


def test_relative_entropy_outside_support_is_infinite():
    rho = diag_state(0.5, 0.5)
    sig = diag_state(1.0, 0.0)
    assert math.isinf(relative_entropy(rho, sig))


def test_relative_entropy_unitary_invariant():
    rng = np.random.default_rng(13)
    shape = FactorShape((3,))
    a = random_state(shape, rng)
    b = random_state(shape, rng)
    u = random_unitary(3, rng)
    ar = QuantumState(u @ a.matrix @ u.conj().T, shape)
    br = QuantumState(u @ b.matrix @ u.conj().T, shape)
    assert abs(relative_entropy(ar, br) - relative_entropy(a, b)) < 1e-10


def test_mutual_information_product_is_zero():
    rng = np.random.default_rng(17)
    joint = tensor(random_state(Q2, rng), random_state(FactorShape((3,)), rng))
    assert abs(mutual_information(joint, ((0,), (1,)))) < 1e-11


def test_mutual_information_bell_state_is_two_ln_two():
    bell = np.zeros((4, 4), dtype=complex)
    for i in (0, 3):
        for j in (0, 3):
            bell[i, j] = 0.5
    rho = QuantumState(bell, FactorShape((2, 2)))
    assert abs(mutual_information(rho, ((0,), (1,))) - 2 * LN2) < 1e-12


def test_mutual_information_nonnegative_on_random_states():
    rng = np.random.default_rng(19)
    shape = FactorShape((2, 3))
    for _ in range(20):
        rho = random_state(shape, rng)
        assert mutual_information(rho, ((0,), (1,))) >= -1e-10


def test_gibbs_two_level_frozen_populations():
    h = Observable(np.diag([0.0, 1.0]).astype(complex), Q2)
    g = gibbs_state(h, 1.0)
    assert abs(float(np.real(g.matrix[0, 0])) - GIBBS_P0_BETA1) < 1e-14
    assert abs(float(np.real(g.matrix[1, 1])) - (1 - GIBBS_P0_BETA1)) < 1e-14


def test_gibbs_beta_zero_is_maximally_mixed():
    h = Observable(np.diag([0.0, 1.0, 2.0]).astype(complex), FactorShape((3,)))
    g = gibbs_state(h, 0.0)
    assert np.allclose(g.matrix, np.eye(3) / 3, atol=1e-14)


def test_gibbs_large_beta_reaches_ground_state():
    h = Observable(np.diag([0.0, 1.0]).astype(complex), Q2)
    g = gibbs_state(h, 500.0)
    assert abs(float(np.real(g.matrix[0, 0])) - 1.0) < 1e-12


def test_gibbs_commutes_with_hamiltonian():
    rng = np.random.default_rng(23)
    shape = FactorShape((4,))
    h = Observable(random_hermitian(4, rng), shape)
    g = gibbs_state(h, 0.7)
    comm = g.matrix @ h.matrix - h.matrix @ g.matrix
    assert np.max(np.abs(comm)) < 1e-12


def test_log_partition_matches_direct_sum():
    h = Observable(np.diag([0.0, 1.0, 2.5]).astype(complex), FactorShape((3,)))
    beta = 0.9
    expected = math.log(sum(math.exp(-beta * e) for e in (0.0, 1.0, 2.5)))
    assert abs(log_partition(h, beta) - expected) < 1e-13
    # overflow-safe at large beta * spread
    assert math.isfinite(log_partition(h, 800.0))


def test_generalized_gibbs_single_term_matches_gibbs():
    h = Observable(np.diag([0.0, 1.0]).astype(complex), Q2)
    ens = ReferenceEnsemble(((h, 1.0),))
    assert np.allclose(generalized_gibbs(ens).matrix,
                       gibbs_state(h, 1.0).matrix, atol=1e-14)


def test_generalized_gibbs_commuting_terms_merge():
    h = Observable(np.diag([0.0, 1.0]).astype(complex), Q2)
    n = Observable(np.diag([1.0, -1.0]).astype(complex), Q2)
    ens = ReferenceEnsemble(((h, 0.8), (n, 0.3)))
    merged = Observable(0.8 * h.matrix + 0.3 * n.matrix, Q2)
    assert np.allclose(generalized_gibbs(ens).matrix,
                       gibbs_state(merged, 1.0).matrix, atol=1e-13)


def test_generalized_gibbs_noncommuting_terms_is_valid_state():
    rng = np.random.default_rng(29)
    a = Observable(random_hermitian(3, rng), FactorShape((3,)))
    b = Observable(random_hermitian(3, rng), FactorShape((3,)))
    g = generalized_gibbs(ReferenceEnsemble(((a, 0.5), (b, 0.2))))
    assert abs(float(np.real(np.trace(g.matrix))) - 1.0) < 1e-12
    assert np.min(np.linalg.eigvalsh(g.matrix)) > 0


def test_reference_ensemble_exposes_energy_term():
    h = Observable(np.diag([0.0, 1.0]).astype(complex), Q2)
    n = Observable(np.diag([1.0, -1.0]).astype(complex), Q2)
    ens = ReferenceEnsemble(((h, 2.0), (n, 0.5)))
    assert ens.beta == 2.0
    assert ens.energy_observable is ens.terms[0][0]
    charge_only = ReferenceEnsemble(((n, 0.5),), energy_index=None)
    assert charge_only.beta is None


def test_reference_ensemble_rejects_mixed_dimensions():
    h2 = Observable(np.diag([0.0, 1.0]).astype(complex), Q2)
    h3 = Observable(np.diag([0.0, 1.0, 2.0]).astype(complex), FactorShape((3,)))
    with pytest.raises(ValueError):
        ReferenceEnsemble(((h2, 1.0), (h3, 1.0)))


def test_flows_match_direct_traces():
    rng = np.random.default_rng(31)
    shape = FactorShape((3,))
    a = random_state(shape, rng)
    b = random_state(shape, rng)
    h = Observable(random_hermitian(3, rng), shape)
    n = Observable(random_hermitian(3, rng), shape)
    rec = flows(a, b, ReferenceEnsemble(((h, 1.1), (n, -0.4))))
    dq = float(np.real(np.trace((b.matrix - a.matrix) @ h.matrix)))
    dn = float(np.real(np.trace((b.matrix - a.matrix) @ n.matrix)))
    assert abs(rec.delta_Q - dq) < 1e-12
    assert abs(rec.delta_charges[0] - dn) < 1e-12


def test_noneq_free_energy_of_gibbs_is_minus_log_z_over_beta():
    h = Observable(np.diag([0.0, 1.0, 2.0]).astype(complex), FactorShape((3,)))
    beta = 0.8
    g = gibbs_state(h, beta)
    assert abs(noneq_free_energy(g, h, beta) + log_partition(h, beta) / beta) < 1e-11


def test_noneq_free_energy_exceeds_equilibrium_value():
    rng = np.random.default_rng(37)
    shape = FactorShape((4,))
    h = Observable(random_hermitian(4, rng), shape)
    beta = 1.3
    floor = -log_partition(h, beta) / beta
    for _ in range(10):
        rho = random_state(shape, rng)
        assert noneq_free_energy(rho, h, beta) >= floor - 1e-10


def test_noneq_free_energy_requires_positive_beta():
    h = Observable(np.diag([0.0, 1.0]).astype(complex), Q2)
    g = gibbs_state(h, 1.0)
    with pytest.raises(ValueError):
        noneq_free_energy(g, h, 0.0)
    with pytest.raises(ValueError):
        noneq_free_energy(g, h, -1.0)
