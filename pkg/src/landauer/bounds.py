"""Erasure-bound ledgers: exact identities, bounds and finite-time forms.

The central object is an exchange identity for the entropy production of a
system S jointly evolved with an environment E and measured against a
reference ensemble Gamma on E:

    delta_S_S + sum_k mu_k delta<C^k>_E
        = D(rho_E^f || Gamma) + I(rho_SE^f) - D(rho_E^i || Gamma) - I(rho_SE^i)

It holds exactly for every state, joint unitary and finite ensemble, so each
ledger asserts it on construction; a residual beyond tolerance means a sign
or bookkeeping bug, never physics.  The right-hand side groups into erasure
cost terms sigma0 = D + I whose nonnegativity gives the corrected bound
sigma_mod = sigma_old + sigma0_initial = sigma0_final >= 0 even when the
uncorrected sigma_old goes negative.

The finite-time ledger tracks the open-system counterpart: with gamma(t) the
image of the system Gibbs state under the same reduced dynamics,

    sigma_tau = delta_S_S - beta * delta_Q_S + K(tau),
    K(tau) = tr[rho_S(tau) (ln gamma(tau) - ln gamma(0))],

which equals the drop of D(rho_S(t) || gamma(t)) over [0, tau] and is
nonnegative by the data-processing inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    TOL_SUPP,
    FactorShape,
    Observable,
    QuantumState,
    UnitaryOp,
    evolve,
    partial_trace,
    tensor,
    unitary_from_hamiltonian,
)
from .thermo import (
    FlowRecord,
    ReferenceEnsemble,
    flows,
    generalized_gibbs,
    gibbs_state,
    relative_entropy,
    von_neumann_entropy,
)

# Identity residuals are pure bookkeeping error; bound slacks may sit at an
# exact zero and are allowed this much numerical dip.
IDENTITY_TOL = 1e-8
SIGMA0_TOL = 1e-9
# Clipped weight above which ln gamma(tau) stops being meaningful.
K_UNDEFINED_MASS = 1e-8
ENERGY_BOOKKEEPING_TOL = 1e-9
CONSERVING_COMM_TOL = 1e-12

Cut = tuple[Sequence[int], Sequence[int]]


@dataclass
class BoundLedger:
    """All bound-related quantities of one (state, unitary, ensemble) case.

    Everything entropic is in nats; flow terms appear both raw (flows) and
    potential-weighted (weighted_flow_sum), and work is the weighted flow
    sum, i.e. the erasure work in units of the reference temperature.
    free_energy_delta is beta * (F(rho_E^f) - F(rho_E^i)) for the energy
    term's beta, or nan for ensembles without one.
    """

    delta_S: float
    flows: FlowRecord
    weighted_flow_sum: float
    D_initial: float
    D_final: float
    I_initial: float
    I_final: float
    sigma0_initial: float
    sigma0_final: float
    sigma_old: float
    sigma_mod: float
    identity_residual: float
    work: float
    free_energy_delta: float
    mi_delta: float
    beta: float | None


def _split_cut(shape: FactorShape, cut: Cut) -> tuple[tuple[int, ...], tuple[int, ...]]:
    sys_part = tuple(sorted(int(i) for i in cut[0]))
    env_part = tuple(sorted(int(i) for i in cut[1]))
    if sorted(sys_part + env_part) != list(range(shape.nfactors)):
        raise ValueError(f"cut {cut} does not partition {shape.nfactors} factors")
    if not sys_part or not env_part:
        raise ValueError("both sides of the cut must be nonempty")
    return sys_part, env_part


def ledger(rho_initial: QuantumState, u: UnitaryOp, ens: ReferenceEnsemble,
           cut: Cut = ((0,), (1,))) -> BoundLedger:
    """Evaluate every bound quantity for one joint unitary step.

    The exchange identity is asserted, as are the nonnegativity of both
    sigma0 terms and the equality sigma_mod = sigma0_final; a failure raises
    rather than returning a silently inconsistent ledger.
    """
    sys_part, env_part = _split_cut(rho_initial.shape, cut)
    env_dim = int(np.prod([rho_initial.shape.dims[i] for i in env_part]))
    if ens.dim != env_dim:
        raise ValueError(f"ensemble dim {ens.dim} does not match environment dim {env_dim}")
    if rho_initial.dim != u.dim:
        raise ValueError("state and unitary dimensions differ")

    rho_final = evolve(rho_initial, u)
    rho_s_i = partial_trace(rho_initial, sys_part)
    rho_s_f = partial_trace(rho_final, sys_part)
    rho_e_i = partial_trace(rho_initial, env_part)
    rho_e_f = partial_trace(rho_final, env_part)

    gamma = generalized_gibbs(ens)
    d_initial = relative_entropy(rho_e_i, gamma)
    d_final = relative_entropy(rho_e_f, gamma)
    if not (math.isfinite(d_initial) and math.isfinite(d_final)):
        raise ValueError("divergence from the reference ensemble is infinite")

    s_s_i = von_neumann_entropy(rho_s_i)
    s_s_f = von_neumann_entropy(rho_s_f)
    s_e_i = von_neumann_entropy(rho_e_i)
    s_e_f = von_neumann_entropy(rho_e_f)
    s_se_i = von_neumann_entropy(rho_initial)
    s_se_f = von_neumann_entropy(rho_final)
    i_initial = s_s_i + s_e_i - s_se_i
    i_final = s_s_f + s_e_f - s_se_f

    fl = flows(rho_e_i, rho_e_f, ens)
    diff = rho_e_f.matrix - rho_e_i.matrix
    weighted = 0.0
    for obs, mu in ens.terms:
        weighted += mu * float(np.real(np.trace(diff @ obs.matrix)))

    delta_s = s_s_f - s_s_i
    sigma_old = delta_s + weighted
    sigma0_initial = d_initial + i_initial
    sigma0_final = d_final + i_final
    sigma_mod = sigma_old + sigma0_initial
    identity_residual = sigma_old - (sigma0_final - sigma0_initial)

    beta = ens.beta
    if beta is None:
        free_energy_delta = math.nan
    else:
        # beta * delta F_E = beta * delta<H_E> - delta S_E, finite for beta = 0
        free_energy_delta = beta * fl.delta_Q - (s_e_f - s_e_i)

    led = BoundLedger(
        delta_S=delta_s,
        flows=fl,
        weighted_flow_sum=weighted,
        D_initial=d_initial,
        D_final=d_final,
        I_initial=i_initial,
        I_final=i_final,
        sigma0_initial=sigma0_initial,
        sigma0_final=sigma0_final,
        sigma_old=sigma_old,
        sigma_mod=sigma_mod,
        identity_residual=identity_residual,
        work=weighted,
        free_energy_delta=free_energy_delta,
        mi_delta=i_final - i_initial,
        beta=beta,
    )
    if abs(led.identity_residual) > IDENTITY_TOL:
        raise ArithmeticError(
            f"exchange identity residual {led.identity_residual:.3e} exceeds {IDENTITY_TOL}")
    if led.sigma0_initial < -SIGMA0_TOL or led.sigma0_final < -SIGMA0_TOL:
        raise ArithmeticError("erasure cost term sigma0 came out negative")
    if abs(led.sigma_mod - led.sigma0_final) > IDENTITY_TOL:
        raise ArithmeticError("sigma_mod does not match sigma0_final")
    return led


def upper_bound_check(led: BoundLedger) -> float:
    """Slack of the dissipated-heat upper bound for heat-only ensembles.

    slack = (-delta_S + sigma0_final) - beta * delta_Q_E, which the identity
    forces to equal D_initial + I_initial, hence >= 0.
    """
    if led.flows.delta_charges:
        raise ValueError("upper bound is stated for heat-only ensembles")
    if led.beta is None:
        raise ValueError("upper bound needs an energy term")
    slack = (-led.delta_S + led.sigma0_final) - led.beta * led.flows.delta_Q
    expected = led.D_initial + led.I_initial
    if abs(slack - expected) > 1e-9:
        raise ArithmeticError(
            f"upper-bound slack {slack!r} deviates from D_i + I_i = {expected!r}")
    return slack


def special_case_athermal_product(led: BoundLedger) -> tuple[float, float]:
    """Reduced decomposition for product initial states (I_initial = 0).

    Returns (beta * delta F_E, I_final), whose sum must reproduce sigma_old:
    with no initial correlations the entropy production is carried entirely
    by the environment's free-energy change plus the correlations built up.
    """
    if abs(led.I_initial) > 1e-9:
        raise ValueError(f"initial mutual information {led.I_initial!r} is not 0")
    if led.beta is None or math.isnan(led.free_energy_delta):
        raise ValueError("decomposition needs an energy term")
    terms = (led.free_energy_delta, led.I_final)
    if abs(sum(terms) - led.sigma_old) > IDENTITY_TOL:
        raise ArithmeticError("product-state decomposition does not match sigma_old")
    return terms


def special_case_correlated_thermal(led: BoundLedger) -> tuple[float, float]:
    """Reduced decomposition for thermal environment marginals (D_initial = 0).

    Returns (delta I_SE, D_final); their sum must reproduce sigma_old.
    """
    if abs(led.D_initial) > 1e-9:
        raise ValueError(f"initial divergence {led.D_initial!r} is not 0")
    terms = (led.mi_delta, led.D_final)
    if abs(sum(terms) - led.sigma_old) > IDENTITY_TOL:
        raise ArithmeticError("correlated-thermal decomposition does not match sigma_old")
    return terms


@dataclass
class FiniteTimeLedger:
    """Finite-time bound bookkeeping at one evolution time tau.

    sigma_tau is the system-side form delta_S - beta*delta_Q_S + K_term;
    sigma_tau_env drops the interaction energy and reads the heat from the
    environment instead (delta_S + beta*delta_Q_E + K_term).  The two agree
    exactly when the interaction commutes with the free Hamiltonian
    (energy_conserving), and differ by beta*delta_Q_int otherwise.
    """

    tau: float
    delta_S: float
    delta_Q_S: float
    delta_Q_E: float
    delta_Q_int: float
    K_term: float
    sigma_tau: float
    relent_drop: float
    sigma_tau_env: float
    beta: float
    k_defined: bool
    energy_conserving: bool
    commutator_norm: float


def _log_expectation(rho_m: np.ndarray, state: QuantumState) -> tuple[float, float]:
    """tr(rho ln state) plus the rho-weight on state's null space."""
    w, v = state.eig()
    inside = w > TOL_SUPP
    occ = np.real(np.sum(v.conj() * (rho_m @ v), axis=0))
    outside_mass = float(np.sum(occ[~inside]))
    value = float(np.sum(np.log(w[inside]) * occ[inside]))
    return value, outside_mass


def joint_hamiltonian(h_s: Observable, h_e: Observable, h_int: Observable) -> Observable:
    """H = H_S (x) 1 + 1 (x) H_E + H_int on the combined factor shape."""
    shape = FactorShape(h_s.shape.dims + h_e.shape.dims)
    if h_int.dim != shape.dim:
        raise ValueError("interaction dimension does not match the product space")
    m = (np.kron(h_s.matrix, np.eye(h_e.dim))
         + np.kron(np.eye(h_s.dim), h_e.matrix)
         + h_int.matrix)
    return Observable(m, shape)


def finite_time_ledger(rho_s0: QuantumState, rho_e0: QuantumState,
                       h_s: Observable, h_e: Observable, h_int: Observable,
                       tau: float, beta_tilde: float,
                       u: UnitaryOp | None = None) -> FiniteTimeLedger:
    """Track the finite-time bound for a product initial state.

    Both rho_S (x) rho_E and gamma_S(0) (x) rho_E are pushed through the same
    joint unitary, so gamma(tau) is the image of the initial system Gibbs
    state under the identical reduced channel.  Callers sweeping a time grid
    should pass u from a cached propagator; it must equal exp(-i H tau).
    """
    h_full = joint_hamiltonian(h_s, h_e, h_int)
    if u is None:
        u = unitary_from_hamiltonian(h_full, tau)
    n_s = rho_s0.shape.nfactors
    n_all = n_s + rho_e0.shape.nfactors
    keep_s = tuple(range(n_s))
    keep_e = tuple(range(n_s, n_all))

    joint0 = tensor(rho_s0, rho_e0)
    joint_tau = evolve(joint0, u)
    rho_s_tau = partial_trace(joint_tau, keep_s)
    rho_e_tau = partial_trace(joint_tau, keep_e)

    gamma0 = gibbs_state(h_s, beta_tilde)
    gamma_tau = partial_trace(evolve(tensor(gamma0, rho_e0), u), keep_s)

    delta_s = von_neumann_entropy(rho_s_tau) - von_neumann_entropy(rho_s0)
    delta_q_s = float(np.real(np.trace((rho_s_tau.matrix - rho_s0.matrix) @ h_s.matrix)))
    delta_q_e = float(np.real(np.trace((rho_e_tau.matrix - rho_e0.matrix) @ h_e.matrix)))
    delta_q_int = float(np.real(np.trace((joint_tau.matrix - joint0.matrix) @ h_int.matrix)))
    book = delta_q_s + delta_q_e + delta_q_int
    if abs(book) > ENERGY_BOOKKEEPING_TOL:
        raise ArithmeticError(f"energy bookkeeping residual {book:.3e}")

    ln_gamma_tau, clipped_mass = _log_expectation(rho_s_tau.matrix, gamma_tau)
    ln_gamma_0, _ = _log_expectation(rho_s_tau.matrix, gamma0)
    k_defined = clipped_mass <= K_UNDEFINED_MASS
    k_term = ln_gamma_tau - ln_gamma_0 if k_defined else math.nan

    free_m = (np.kron(h_s.matrix, np.eye(h_e.dim))
              + np.kron(np.eye(h_s.dim), h_e.matrix))
    comm = h_int.matrix @ free_m - free_m @ h_int.matrix
    comm_norm = float(np.max(np.abs(comm)))

    sigma_tau = delta_s - beta_tilde * delta_q_s + k_term
    sigma_tau_env = delta_s + beta_tilde * delta_q_e + k_term
    relent_drop = (relative_entropy(rho_s0, gamma0)
                   - relative_entropy(rho_s_tau, gamma_tau))

    led = FiniteTimeLedger(
        tau=float(tau),
        delta_S=delta_s,
        delta_Q_S=delta_q_s,
        delta_Q_E=delta_q_e,
        delta_Q_int=delta_q_int,
        K_term=k_term,
        sigma_tau=sigma_tau,
        relent_drop=relent_drop,
        sigma_tau_env=sigma_tau_env,
        beta=float(beta_tilde),
        k_defined=k_defined,
        energy_conserving=comm_norm <= CONSERVING_COMM_TOL,
        commutator_norm=comm_norm,
    )
    if k_defined:
        if not math.isfinite(relent_drop) or abs(sigma_tau - relent_drop) > IDENTITY_TOL:
            raise ArithmeticError(
                f"finite-time identity residual {sigma_tau - relent_drop!r}")
        if relent_drop < -SIGMA0_TOL:
            raise ArithmeticError(f"relative-entropy drop {relent_drop!r} is negative")
    return led


@dataclass
class TrotterExpansion:
    """First-order-in-epsilon propagator for H_free + epsilon * H_int.

    u_approx is U_free(t) minus (i eps t / n) * sum_k U_f(h_k t) H_int
    U_f(g_k t) with h_k = (k+1)/n, g_k = (n-k-1)/n; it is unitary only to
    O(epsilon^2), so it is kept as a raw matrix.  chi(rho) is the matching
    first-order state correction built from X_n = sum_k U_f(k t/n) H_int
    U_f(g_k t).
    """

    shape: FactorShape
    epsilon: float
    t: float
    n: int
    u_free: UnitaryOp
    u_approx: np.ndarray
    x_n: np.ndarray

    def chi(self, rho_m: np.ndarray) -> np.ndarray:
        uf = self.u_free.matrix
        pre = 1j * self.t / self.n
        return pre * (uf @ rho_m @ self.x_n.conj().T - self.x_n @ rho_m @ uf.conj().T)

    def evolve_product(self, rho_s: QuantumState, rho_e: QuantumState) -> np.ndarray:
        """Approximate joint state: free-evolved product plus eps * chi.

        The output is Hermitian and unit trace but may carry O(epsilon^2)
        negative eigenvalues, so it is returned as a raw matrix.
        """
        rho_m = np.kron(rho_s.matrix, rho_e.matrix)
        uf = self.u_free.matrix
        out = uf @ rho_m @ uf.conj().T + self.epsilon * self.chi(rho_m)
        return 0.5 * (out + out.conj().T)


def trotter_first_order(h_free: Observable, h_int: Observable, epsilon: float,
                        t: float, n: int = 400) -> TrotterExpansion:
    """Assemble the first-order propagator and its state correction.

    The free propagators at all grid times k t / n come from one
    eigendecomposition of H_free; the finite-n sums converge to the exact
    first-order Dyson term as n grows (callers can compare n against 2n).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if n < 1:
        raise ValueError("n must be at least 1")
    if h_free.dim != h_int.dim:
        raise ValueError("free and interaction terms must share a dimension")
    w, v = np.linalg.eigh(h_free.matrix)
    v_dag = v.conj().T
    # U_f(j t / n) for j = 0..n, shared by both sums
    ufs = [(v * np.exp(-1j * w * (j * t / n))) @ v_dag for j in range(n + 1)]
    left = [ufs[j] @ h_int.matrix for j in range(n + 1)]
    d = h_free.dim
    y = np.zeros((d, d), dtype=complex)
    x = np.zeros((d, d), dtype=complex)
    for k in range(n):
        tail = ufs[n - k - 1]
        y += left[k + 1] @ tail
        x += left[k] @ tail
    u_free = UnitaryOp(ufs[n], h_free.shape)
    u_approx = ufs[n] - 1j * epsilon * t / n * y
    return TrotterExpansion(shape=h_free.shape, epsilon=float(epsilon), t=float(t),
                            n=int(n), u_free=u_free, u_approx=u_approx, x_n=x)


@dataclass
class WeakCouplingResult:
    """Weak-coupling bound value and its ingredients.

    value = delta_S + beta*delta_Q_E + beta*epsilon*delta_Q_int_free + K_term,
    where delta_Q_int_free replaces the true interaction-energy change with
    the one computed from freely evolved marginals; everything else uses the
    exact joint dynamics.  epsilon_scale = eps * ||h_int||_2 * tau is the
    caller's smallness diagnostic, and trotter_gap reports how converged the
    finite-n first-order propagator is (n vs 2n, max-norm).
    """

    value: float
    delta_S: float
    delta_Q_E: float
    delta_Q_int_free: float
    K_term: float
    epsilon_scale: float
    trotter_gap: float | None
    finite_time: FiniteTimeLedger


def weak_coupling_bound(rho_s0: QuantumState, rho_e0: QuantumState,
                        h_s: Observable, h_e: Observable, h_int: Observable,
                        epsilon: float, tau: float, n: int = 400,
                        beta_tilde: float = 1.0,
                        check_convergence: bool = True) -> WeakCouplingResult:
    """Evaluate the weak-coupling form of the finite-time bound.

    The full interaction is epsilon * h_int.  The free-marginal interaction
    term makes the bound computable without tracking interaction energy in
    the correlated state; for conserving interactions it vanishes
    identically and the value reduces to the exact finite-time sigma_tau.
    """
    scaled_int = Observable(epsilon * h_int.matrix, h_int.shape)
    ft = finite_time_ledger(rho_s0, rho_e0, h_s, h_e, scaled_int, tau, beta_tilde)

    u_s = unitary_from_hamiltonian(h_s, tau)
    u_e = unitary_from_hamiltonian(h_e, tau)
    rho_s_f = evolve(rho_s0, u_s)
    rho_e_f = evolve(rho_e0, u_e)
    q_int_free = float(np.real(
        np.trace((np.kron(rho_s_f.matrix, rho_e_f.matrix)
                  - np.kron(rho_s0.matrix, rho_e0.matrix)) @ h_int.matrix)))

    value = ft.delta_S + beta_tilde * ft.delta_Q_E \
        + beta_tilde * epsilon * q_int_free + ft.K_term

    h_int_norm = float(np.max(np.abs(np.linalg.eigvalsh(h_int.matrix))))
    gap = None
    if check_convergence:
        h_free = joint_hamiltonian(h_s, h_e,
                                   Observable(np.zeros_like(h_int.matrix), h_int.shape))
        a = trotter_first_order(h_free, h_int, epsilon, tau, n)
        b = trotter_first_order(h_free, h_int, epsilon, tau, 2 * n)
        gap = float(np.max(np.abs(a.u_approx - b.u_approx)))

    return WeakCouplingResult(
        value=value,
        delta_S=ft.delta_S,
        delta_Q_E=ft.delta_Q_E,
        delta_Q_int_free=q_int_free,
        K_term=ft.K_term,
        epsilon_scale=float(epsilon * h_int_norm * abs(tau)),
        trotter_gap=gap,
        finite_time=ft,
    )
