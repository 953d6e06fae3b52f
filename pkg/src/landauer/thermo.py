"""Entropies, divergences, reference ensembles and flows.

All entropic quantities use the natural logarithm, so everything is in nats
and inverse temperatures multiply energies directly (k_B = 1).  The reference
state against which erasure costs are measured is a generalized Gibbs
ensemble exp(-sum_k mu_k C^k)/Z built from a ReferenceEnsemble; an ordinary
thermal reference is the special case of a single (H_E, beta) term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    TOL_SUPP,
    FactorShape,
    Observable,
    QuantumState,
    eigh_matrix,
    partial_trace,
)


@dataclass
class ReferenceEnsemble:
    """Weighted conserved quantities defining the reference state.

    terms is a sequence of (observable, potential) pairs.  By convention the
    energy term, when present, is terms[energy_index] and its potential is
    the inverse temperature beta; the remaining terms are charges with their
    Lagrange-multiplier potentials.  energy_index=None declares a pure
    charge ensemble with no energy term.
    """

    terms: tuple[tuple[Observable, float], ...]
    energy_index: int | None = 0

    def __post_init__(self) -> None:
        terms = tuple((obs, float(mu)) for obs, mu in self.terms)
        if not terms:
            raise ValueError("ensemble needs at least one term")
        dim = terms[0][0].dim
        for obs, mu in terms:
            if obs.dim != dim:
                raise ValueError("ensemble observables must share one dimension")
            if not math.isfinite(mu):
                raise ValueError(f"ensemble potential {mu} is not finite")
        if self.energy_index is not None and not (0 <= self.energy_index < len(terms)):
            raise ValueError(f"energy_index {self.energy_index} out of range")
        self.terms = terms

    @property
    def dim(self) -> int:
        return self.terms[0][0].dim

    @property
    def shape(self) -> FactorShape:
        return self.terms[0][0].shape

    @property
    def beta(self) -> float | None:
        """Inverse temperature of the energy term, if there is one."""
        if self.energy_index is None:
            return None
        return self.terms[self.energy_index][1]

    @property
    def energy_observable(self) -> Observable | None:
        if self.energy_index is None:
            return None
        return self.terms[self.energy_index][0]


@dataclass
class FlowRecord:
    """Unweighted expectation-value changes of the ensemble terms.

    delta_Q is the energy flow into the environment (0.0 when the ensemble
    has no energy term); delta_charges holds one entry per non-energy term,
    in ensemble order.
    """

    delta_Q: float
    delta_charges: tuple[float, ...] = field(default_factory=tuple)


def von_neumann_entropy(rho: QuantumState) -> float:
    """S(rho) = -sum_i p_i ln p_i with 0 ln 0 := 0, in nats."""
    p = rho.probabilities()
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def relative_entropy(rho: QuantumState, sigma: QuantumState) -> float:
    """Quantum relative entropy D(rho || sigma) in nats.

    Evaluated in sigma's eigenbasis as tr(rho ln rho) - sum_j ln(s_j) <v_j|rho|v_j>.
    Eigenvalues of sigma at or below TOL_SUPP count as outside its support:
    if rho carries more than TOL_SUPP of weight there the divergence is
    +infinity, otherwise both states are projected onto the support and the
    finite value is returned.
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch {rho.dim} vs {sigma.dim}")
    s, v = sigma.eig()
    inside = s > TOL_SUPP
    # weight of rho outside sigma's support decides finiteness
    v_out = v[:, ~inside]
    outside_weight = float(np.real(np.sum((v_out.conj() * (rho.matrix @ v_out)))))
    if outside_weight > TOL_SUPP:
        return math.inf
    v_in = v[:, inside]
    rho_sub = v_in.conj().T @ rho.matrix @ v_in
    rho_sub = 0.5 * (rho_sub + rho_sub.conj().T)
    r = np.linalg.eigvalsh(rho_sub)
    r = r[r > 0.0]
    tr_rho_ln_rho = float(np.sum(r * np.log(r)))
    cross = float(np.real(np.sum(np.log(s[inside]) * np.real(np.diag(rho_sub)))))
    return tr_rho_ln_rho - cross


def mutual_information(rho: QuantumState, cut: tuple[Sequence[int], Sequence[int]]) -> float:
    """I(A:B) = S(A) + S(B) - S(AB) across a bipartition of the factors."""
    part_a = tuple(sorted(int(i) for i in cut[0]))
    part_b = tuple(sorted(int(i) for i in cut[1]))
    n = rho.shape.nfactors
    if not part_a or not part_b:
        raise ValueError("both sides of the cut must be nonempty")
    if sorted(part_a + part_b) != list(range(n)):
        raise ValueError(f"cut {cut} is not a partition of {n} factors")
    s_a = von_neumann_entropy(partial_trace(rho, part_a))
    s_b = von_neumann_entropy(partial_trace(rho, part_b))
    s_ab = von_neumann_entropy(rho)
    return s_a + s_b - s_ab


def gibbs_state(h: Observable, beta: float) -> QuantumState:
    """Thermal state exp(-beta H)/Z, assembled in the eigenbasis of H.

    Populations are computed with a max-shifted exponent so that large
    |beta * energy| cannot overflow; the result is always full rank.
    """
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    w, v = eigh_matrix(h.matrix)
    x = -beta * w
    p = np.exp(x - np.max(x))
    p /= p.sum()
    m = (v * p) @ v.conj().T
    m = 0.5 * (m + m.conj().T)
    return QuantumState(m, h.shape)


def log_partition(h: Observable, beta: float) -> float:
    """ln Z = ln tr exp(-beta H), overflow-safe via the same max shift."""
    w, _ = eigh_matrix(h.matrix)
    x = -beta * w
    m = float(np.max(x))
    return m + float(np.log(np.sum(np.exp(x - m))))


def generalized_gibbs(ens: ReferenceEnsemble) -> QuantumState:
    """Reference state exp(-sum_k mu_k C^k)/Z of a finite ensemble.

    The exponent sum is a single Hermitian matrix, so the construction works
    whether or not the individual charges commute.  Full rank for finite
    potentials.
    """
    a = np.zeros((ens.dim, ens.dim), dtype=complex)
    for obs, mu in ens.terms:
        a += mu * obs.matrix
    w, v = eigh_matrix(a)
    x = -w
    p = np.exp(x - np.max(x))
    p /= p.sum()
    m = (v * p) @ v.conj().T
    m = 0.5 * (m + m.conj().T)
    return QuantumState(m, ens.shape)


def flows(env_initial: QuantumState, env_final: QuantumState,
          ens: ReferenceEnsemble) -> FlowRecord:
    """Changes tr[(rho_f - rho_i) C] of each ensemble observable."""
    if env_initial.dim != ens.dim or env_final.dim != ens.dim:
        raise ValueError("environment states must match the ensemble dimension")
    diff = env_final.matrix - env_initial.matrix
    deltas = [float(np.real(np.trace(diff @ obs.matrix))) for obs, _ in ens.terms]
    if ens.energy_index is None:
        return FlowRecord(0.0, tuple(deltas))
    delta_q = deltas.pop(ens.energy_index)
    return FlowRecord(delta_q, tuple(deltas))


def noneq_free_energy(rho: QuantumState, h: Observable, beta: float) -> float:
    """Non-equilibrium free energy F(rho) = tr(H rho) - S(rho)/beta.

    The same quantity equals D(rho || gamma_beta)/beta - ln(Z)/beta; both
    routes are evaluated and must agree within 1e-9, which cross-checks the
    entropy and divergence code paths against each other.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    f_direct = h.expectation(rho) - von_neumann_entropy(rho) / beta
    f_dual = (relative_entropy(rho, gibbs_state(h, beta))
              - log_partition(h, beta)) / beta
    if abs(f_direct - f_dual) > 1e-9:
        raise ArithmeticError(
            f"free-energy routes disagree: {f_direct!r} vs {f_dual!r}")
    return f_direct
