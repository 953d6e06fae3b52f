"""Seeded random states, operators and bound instances.

Everything takes an explicit numpy Generator so that property tests and the
random-audit command stay reproducible run to run.
"""

from __future__ import annotations

import numpy as np

from .core import FactorShape, Observable, QuantumState, UnitaryOp
from .thermo import ReferenceEnsemble, gibbs_state

AUDIT_DIMS = ((2, 2), (2, 3), (3, 3))


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (g + g.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase convention fixed."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_state(shape, rng: np.random.Generator, rank: int | None = None) -> QuantumState:
    """Mixed state G G^dag / tr, full rank unless a smaller rank is given."""
    shape = shape if isinstance(shape, FactorShape) else FactorShape(tuple(shape))
    d = shape.dim
    r = d if rank is None else int(rank)
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    m = g @ g.conj().T
    m /= np.real(np.trace(m))
    return QuantumState(0.5 * (m + m.conj().T), shape)


def random_pure_state(shape, rng: np.random.Generator) -> QuantumState:
    return random_state(shape, rng, rank=1)


def random_bound_instance(rng: np.random.Generator):
    """One randomized (state, unitary, ensemble, cut) exchange-identity case.

    Dimensions are drawn from AUDIT_DIMS, the joint unitary is Haar, and the
    reference ensemble gets a random Hermitian energy term with a potential
    in [-2, 2], plus (half the time) one extra charge term.  The identity is
    supposed to hold for every such instance regardless of the potentials.
    """
    ds, de = AUDIT_DIMS[rng.integers(len(AUDIT_DIMS))]
    shape = FactorShape((ds, de))
    rho = random_state(shape, rng)
    u = UnitaryOp(random_unitary(shape.dim, rng), shape)
    env_shape = FactorShape((de,))
    terms = [(Observable(random_hermitian(de, rng), env_shape),
              float(rng.uniform(-2.0, 2.0)))]
    if rng.uniform() < 0.5:
        terms.append((Observable(random_hermitian(de, rng), env_shape),
                      float(rng.uniform(-1.0, 1.0))))
    ens = ReferenceEnsemble(tuple(terms), energy_index=0)
    return rho, u, ens, ((0,), (1,))


def correlated_thermal_state(h_env: Observable, beta: float, dim_system: int,
                             rng: np.random.Generator | None = None) -> QuantumState:
    """Pure system-environment state whose environment marginal is thermal.

    |psi> = sum_j lambda_j |s_j> (x) |e_j> with lambda_j^2 = <e_j|gamma|e_j>
    over the energy eigenbasis {|e_j>}, so tracing out the system returns
    exactly gamma_beta while the joint state is maximally correlated.  The
    system vectors are the computational basis, or a Haar-rotated copy when
    an rng is supplied.  Requires dim_system >= dim of the environment.
    """
    de = h_env.dim
    if dim_system < de:
        raise ValueError(f"system dimension {dim_system} must be >= {de}")
    gamma = gibbs_state(h_env, beta)
    _, e_vecs = np.linalg.eigh(h_env.matrix)
    lam = np.sqrt(np.real(np.sum(e_vecs.conj() * (gamma.matrix @ e_vecs), axis=0)))
    s_vecs = np.eye(dim_system, dtype=complex)
    if rng is not None:
        s_vecs = random_unitary(dim_system, rng)
    psi = np.zeros(dim_system * de, dtype=complex)
    for j in range(de):
        psi += lam[j] * np.kron(s_vecs[:, j], e_vecs[:, j])
    m = np.outer(psi, psi.conj())
    return QuantumState(m, FactorShape((dim_system, de)))
