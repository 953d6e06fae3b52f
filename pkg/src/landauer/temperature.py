"""Non-equilibrium temperature estimators for states that need not be Gibbs.

Three routes are provided and all of them return the canonical 1/beta when
fed an actual thermal state:

* spectral: a degeneracy-weighted average of log-population slopes across
  adjacent energy levels,
* cold/hot: the extremal two-level effective temperatures over all pairs of
  levels,
* energy matched: the beta whose Gibbs state has the same mean energy.

Estimates carry their method tag and free-form diagnostics, since the
non-thermal cases are exactly where the edge conditions (inversions, empty
levels, excluded pairs) carry physical information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import TOL_SUPP, Observable, QuantumState, eigh_matrix

# Adjacent eigenvalues closer than this fraction of the spectral span are
# treated as one degenerate level; eigensolvers split exact degeneracies by
# roundoff and the estimators must not mistake that for structure.
GROUP_TOL_FRACTION = 1e-8

# Floor for zero populations inside the spectral formula; keeps the
# estimator total while flagging the state as degenerate.
W_FLOOR = 1e-300

_BETA_MAX_SCALE = 1e4  # bisection window is [-scale/span, +scale/span]


@dataclass(frozen=True)
class SpectrumDecomposition:
    """Energy levels (E_i, N_i, W_i): clustered eigenvalue, multiplicity,
    and total population of the state on that level."""

    levels: tuple[tuple[float, int, float], ...]
    group_tol: float
    span: float

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for e, _, _ in self.levels])

    @property
    def degeneracies(self) -> np.ndarray:
        return np.array([n for _, n, _ in self.levels])

    @property
    def populations(self) -> np.ndarray:
        return np.array([w for _, _, w in self.levels])


@dataclass(frozen=True)
class TemperatureEstimate:
    """One estimator's verdict: method tag, inverse temperature, and notes.

    inverse_temperature = 0 encodes infinite temperature; defined = False
    (with inverse_temperature = nan) marks formulas that had no value.
    """

    method: str
    inverse_temperature: float
    defined: bool = True
    diagnostics: dict = field(default_factory=dict)

    @property
    def temperature(self) -> float:
        if not self.defined:
            return math.nan
        if self.inverse_temperature == 0.0:
            return math.inf
        return 1.0 / self.inverse_temperature


def decompose_spectrum(rho: QuantumState, h: Observable,
                       group_tol: float | None = None) -> SpectrumDecomposition:
    """Cluster the spectrum of h and attach the state's level populations.

    Adjacent eigenvalues with gaps <= group_tol (default: 1e-8 of the
    spectral span) share a level; the level energy is the cluster mean and
    its population is sum_v <v|rho|v> over the cluster's eigenvectors.
    """
    if rho.dim != h.dim:
        raise ValueError(f"dimension mismatch {rho.dim} vs {h.dim}")
    w, v = eigh_matrix(h.matrix)
    span = float(w[-1] - w[0])
    if group_tol is None:
        group_tol = GROUP_TOL_FRACTION * span
    occ = np.real(np.sum(v.conj() * (rho.matrix @ v), axis=0))
    levels: list[tuple[float, int, float]] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or (w[i] - w[i - 1]) > group_tol:
            cluster = slice(start, i)
            levels.append((float(np.mean(w[cluster])), i - start,
                           float(np.sum(occ[cluster]))))
            start = i
    total = sum(pop for _, _, pop in levels)
    if abs(total - 1.0) > 1e-9:
        raise ArithmeticError(f"level populations sum to {total}, not 1")
    return SpectrumDecomposition(tuple(levels), float(group_tol), span)


def spectral_temperature(rho: QuantumState, h: Observable,
                         group_tol: float | None = None) -> TemperatureEstimate:
    """Degeneracy-weighted log-population slope estimator.

    1/T = N * sum_i ((W_i + W_{i-1})/2) * (ln(W_i/N_i) - ln(W_{i-1}/N_{i-1}))
                 / (E_i - E_{i-1})
    with N = -(1 - (W_0 + W_M)/2)^{-1}.  Exact on Gibbs states for any level
    structure.  Empty levels are floored at W_FLOOR and flagged degenerate.
    """
    dec = decompose_spectrum(rho, h, group_tol)
    if len(dec.levels) < 2:
        raise ValueError("spectral temperature needs at least two energy levels")
    e = dec.energies
    n = dec.degeneracies.astype(float)
    w = dec.populations
    floored = int(np.sum(w < W_FLOOR))
    w = np.maximum(w, W_FLOOR)
    diagnostics = {"levels": len(dec.levels), "floored_levels": floored,
                   "degenerate": floored > 0}
    edge = 1.0 - 0.5 * (w[0] + w[-1])
    if abs(edge) < 1e-15:
        # All weight on the extreme levels makes the normalization diverge;
        # unreachable for normalized states with >= 2 levels, guarded anyway.
        return TemperatureEstimate("spectral", math.nan, defined=False,
                                   diagnostics=diagnostics)
    logs = np.log(w / n)
    terms = 0.5 * (w[1:] + w[:-1]) * np.diff(logs) / np.diff(e)
    beta = float(-np.sum(terms) / edge)
    return TemperatureEstimate("spectral", beta, diagnostics=diagnostics)


def cold_hot_temperature(rho: QuantumState, h: Observable,
                         include_negative: bool = False,
                         group_tol: float | None = None,
                         ) -> tuple[TemperatureEstimate, TemperatureEstimate]:
    """Extremal pairwise temperatures T_ij = (E_j - E_i)/ln(p_i/p_j).

    p_i is the per-state population W_i/N_i of level i, which keeps the
    pairwise values degeneracy-robust.  Pairs with a population at or below
    TOL_SUPP or with exactly equal populations are excluded; pairs with
    negative T_ij (local inversions) are excluded from the extremes unless
    include_negative is set.  The cold estimate is the minimum admissible
    value, the hot one the maximum.
    """
    dec = decompose_spectrum(rho, h, group_tol)
    e = dec.energies
    p = dec.populations / dec.degeneracies
    values: list[float] = []
    excluded_support = 0
    excluded_equal = 0
    negatives = 0
    m = len(dec.levels)
    for i in range(m):
        for j in range(i + 1, m):
            if p[i] <= TOL_SUPP or p[j] <= TOL_SUPP:
                excluded_support += 1
                continue
            log_ratio = math.log(p[i] / p[j])
            if log_ratio == 0.0:
                excluded_equal += 1
                continue
            t_ij = (e[j] - e[i]) / log_ratio
            if t_ij < 0.0:
                negatives += 1
                if not include_negative:
                    continue
            values.append(t_ij)
    diagnostics = {
        "pairs_considered": m * (m - 1) // 2,
        "excluded_support": excluded_support,
        "excluded_equal_population": excluded_equal,
        "negative_pairs": negatives,
        "admitted": len(values),
    }
    if not values:
        raise ValueError("no admissible level pair for cold/hot temperatures")
    t_c, t_h = min(values), max(values)
    cold = TemperatureEstimate("cold", 1.0 / t_c, diagnostics=dict(diagnostics))
    hot = TemperatureEstimate("hot", 1.0 / t_h, diagnostics=dict(diagnostics))
    return cold, hot


def _mean_energy(w: np.ndarray, beta: float) -> float:
    # Gibbs mean energy from the spectrum alone, max-shifted against
    # overflow.  Extended precision keeps the curve strictly monotone at the
    # resolution the bisection works at, even where it is nearly flat.
    wl = w.astype(np.longdouble)
    x = -np.longdouble(beta) * wl
    p = np.exp(x - np.max(x))
    return float(np.sum(wl * p) / np.sum(p))


def energy_matched_temperature(rho: QuantumState, h: Observable) -> TemperatureEstimate:
    """beta* such that the Gibbs state of h has the state's mean energy.

    tr(gamma_beta H) is strictly decreasing in beta (asserted along the
    search), so bisection on [-beta_max, beta_max] with beta_max = 1e4/span
    pins beta* down; the residual must come out <= 1e-10 * span.
    """
    if rho.dim != h.dim:
        raise ValueError(f"dimension mismatch {rho.dim} vs {h.dim}")
    w, _ = eigh_matrix(h.matrix)
    span = float(w[-1] - w[0])
    if span <= 0.0:
        raise ValueError("constant spectrum has no matchable temperature")
    target = float(np.real(np.trace(h.matrix @ rho.matrix)))
    if not (w[0] < target < w[-1]):
        raise ValueError(
            f"mean energy {target} not strictly inside the spectrum "
            f"({w[0]}, {w[-1]})")
    beta_max = _BETA_MAX_SCALE / span
    lo, hi = -beta_max, beta_max
    e_lo, e_hi = _mean_energy(w, lo), _mean_energy(w, hi)
    if not (e_hi < target < e_lo):
        raise ValueError("mean energy unreachable inside the bisection window")
    slack = 1e-12 * span  # rounding allowance, far below any physical scale
    iterations = 0
    while (hi - lo) > 1e-13 * max(1.0, abs(lo), abs(hi)) and iterations < 300:
        mid = 0.5 * (lo + hi)
        e_mid = _mean_energy(w, mid)
        # the energy map must stay decreasing across the bracket
        if not (e_lo + slack >= e_mid >= e_hi - slack):
            raise ArithmeticError("Gibbs energy map is not monotone in beta")
        if e_mid > target:
            lo, e_lo = mid, e_mid
        else:
            hi, e_hi = mid, e_mid
        iterations += 1
    beta = 0.5 * (lo + hi)
    residual = abs(_mean_energy(w, beta) - target)
    if residual > 1e-10 * span:
        raise ArithmeticError(
            f"bisection residual {residual:.3e} exceeds {1e-10 * span:.3e}")
    return TemperatureEstimate("energy_matched", float(beta),
                               diagnostics={"iterations": iterations,
                                            "residual": float(residual)})


ESTIMATORS = {
    "spectral": spectral_temperature,
    "energy_matched": energy_matched_temperature,
}


def estimate(method: str, rho: QuantumState, h: Observable) -> TemperatureEstimate:
    """Dispatch one estimator by tag: spectral, cold, hot, energy_matched."""
    if method in ESTIMATORS:
        return ESTIMATORS[method](rho, h)
    if method in ("cold", "hot"):
        cold, hot = cold_hot_temperature(rho, h)
        return cold if method == "cold" else hot
    raise ValueError(f"unknown temperature estimator {method!r}")
