"""Dense linear-algebra substrate for small multipartite quantum systems.

States, observables and unitaries are complex numpy matrices wrapped in thin
dataclasses that validate on construction and remember the tensor
factorization.  All evolutions are exact: matrix exponentials of Hermitian
generators go through eigh, never through series expansions or stepping, so
a propagator at time t is always unitary to machine precision.

Units: hbar = k_B = 1 throughout.  Energies are dimensionless multiples of
whatever scale constant a caller picks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

HBAR = 1.0
K_B = 1.0

# Validation tolerances.  Double precision at dims <= 128 comfortably
# achieves these; anything worse signals a real bug, not roundoff.
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9
TOL_UNITARY = 1e-9
# Eigenvalue threshold for support-inclusion tests; below it, ln(x) is
# numerically meaningless.
TOL_SUPP = 1e-10

# Reconstruction check V diag(w) V^dag == m is asserted up to this dimension.
_EIGH_CHECK_DIM = 128
_EIGH_CHECK_TOL = 1e-10


@dataclass(frozen=True)
class FactorShape:
    """Tensor factorization (d_1, ..., d_n) of a Hilbert space."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) == 0:
            raise ValueError("FactorShape needs at least one factor")
        if any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {dims}")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def nfactors(self) -> int:
        return len(self.dims)

    def kept(self, keep: Sequence[int]) -> "FactorShape":
        return FactorShape(tuple(self.dims[i] for i in keep))


def _as_square_matrix(m, dim: int, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {m.shape}")
    if m.shape[0] != dim:
        raise ValueError(
            f"{what} dimension {m.shape[0]} does not match factor shape dim {dim}"
        )
    return m


def _check_hermitian(m: np.ndarray, what: str) -> None:
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > TOL_HERM:
        raise ValueError(f"{what} is not Hermitian (max asymmetry {dev:.3e})")


@dataclass
class QuantumState:
    """Density matrix with its tensor factorization.

    Construction validates hermiticity, unit trace and positive
    semidefiniteness (up to TOL_PSD of slack) and caches the
    eigendecomposition, since nearly every consumer needs it.
    """

    matrix: np.ndarray
    shape: FactorShape
    _eigvals: np.ndarray = field(init=False, repr=False)
    _eigvecs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.shape, FactorShape):
            self.shape = FactorShape(tuple(self.shape))
        m = _as_square_matrix(self.matrix, self.shape.dim, "state")
        _check_hermitian(m, "state")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TOL_TRACE:
            raise ValueError(f"state trace {tr} deviates from 1 beyond {TOL_TRACE}")
        w, v = eigh_matrix(m)
        if w[0] < -TOL_PSD:
            raise ValueError(f"state has eigenvalue {w[0]:.3e} below -{TOL_PSD}")
        self.matrix = m
        self._eigvals = w
        self._eigvecs = v

    @property
    def dim(self) -> int:
        return self.shape.dim

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Cached ascending eigenvalues and eigenvector columns."""
        return self._eigvals, self._eigvecs

    def probabilities(self) -> np.ndarray:
        """Eigenvalues prepared for matrix functions: slack in
        [-TOL_PSD, 0) is clipped to exactly 0 so logs stay clean."""
        return np.where(self._eigvals < 0.0, 0.0, self._eigvals)


@dataclass
class Observable:
    """Hermitian operator with its tensor factorization."""

    matrix: np.ndarray
    shape: FactorShape

    def __post_init__(self) -> None:
        if not isinstance(self.shape, FactorShape):
            self.shape = FactorShape(tuple(self.shape))
        m = _as_square_matrix(self.matrix, self.shape.dim, "observable")
        _check_hermitian(m, "observable")
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.shape.dim

    def expectation(self, rho: QuantumState) -> float:
        return float(np.real(np.trace(self.matrix @ rho.matrix)))


@dataclass
class UnitaryOp:
    """Unitary operator; U U^dag = 1 enforced within TOL_UNITARY."""

    matrix: np.ndarray
    shape: FactorShape

    def __post_init__(self) -> None:
        if not isinstance(self.shape, FactorShape):
            self.shape = FactorShape(tuple(self.shape))
        m = _as_square_matrix(self.matrix, self.shape.dim, "unitary")
        dev = float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))
        if dev > TOL_UNITARY:
            raise ValueError(f"operator deviates from unitarity by {dev:.3e}")
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.shape.dim


def tensor(a, b):
    """Kronecker product of two states or two observables (same kind)."""
    if isinstance(a, QuantumState) and isinstance(b, QuantumState):
        return QuantumState(
            np.kron(a.matrix, b.matrix), FactorShape(a.shape.dims + b.shape.dims)
        )
    if isinstance(a, Observable) and isinstance(b, Observable):
        return Observable(
            np.kron(a.matrix, b.matrix), FactorShape(a.shape.dims + b.shape.dims)
        )
    if isinstance(a, UnitaryOp) and isinstance(b, UnitaryOp):
        return UnitaryOp(
            np.kron(a.matrix, b.matrix), FactorShape(a.shape.dims + b.shape.dims)
        )
    raise TypeError(f"tensor requires two operands of the same kind, got "
                    f"{type(a).__name__} and {type(b).__name__}")


def _normalize_keep(keep: Iterable[int], nfactors: int) -> tuple[int, ...]:
    keep = tuple(sorted({int(i) for i in keep}))
    if not keep:
        raise ValueError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= nfactors:
        raise ValueError(f"keep indices {keep} out of range for {nfactors} factors")
    return keep


def partial_trace_matrix(m: np.ndarray, dims: Sequence[int],
                         keep: Iterable[int]) -> np.ndarray:
    """Partial trace of a raw matrix over all factors not in keep.

    Kept factors stay in their original order.  Works on any square matrix,
    not just density matrices; used internally for operator-valued pieces.
    """
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = _normalize_keep(keep, n)
    t = np.asarray(m, dtype=complex).reshape(dims + dims)
    row = list(range(n))
    col = [n + i for i in range(n)]
    for i in range(n):
        if i not in keep:
            col[i] = row[i]  # pairing the axes traces out factor i
    out = [row[i] for i in keep] + [col[i] for i in keep]
    d = int(np.prod([dims[i] for i in keep]))
    return np.einsum(t, row + col, out).reshape(d, d)


def partial_trace(rho: QuantumState, keep: Iterable[int]) -> QuantumState:
    """Reduced state on the kept factors (original order preserved)."""
    keep = _normalize_keep(keep, rho.shape.nfactors)
    red = partial_trace_matrix(rho.matrix, rho.shape.dims, keep)
    red = 0.5 * (red + red.conj().T)
    return QuantumState(red, rho.shape.kept(keep))


def eigh_matrix(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigendecomposition of a Hermitian matrix, with a
    reconstruction check at small dimensions."""
    m = np.asarray(m, dtype=complex)
    w, v = np.linalg.eigh(m)
    if m.shape[0] <= _EIGH_CHECK_DIM:
        err = float(np.max(np.abs((v * w) @ v.conj().T - m)))
        scale = max(1.0, float(np.max(np.abs(m))))
        if err > _EIGH_CHECK_TOL * scale:
            raise ArithmeticError(f"eigh reconstruction error {err:.3e}")
    return w, v


def eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of an Observable, QuantumState, or raw matrix."""
    if isinstance(m, QuantumState):
        return m.eig()
    if isinstance(m, Observable):
        return eigh_matrix(m.matrix)
    return eigh_matrix(m)


def unitary_from_hamiltonian(h: Observable, t: float) -> UnitaryOp:
    """U(t) = exp(-i H t / hbar) assembled from the eigenbasis of H."""
    w, v = eigh(h)
    u = (v * np.exp(-1j * w * (t / HBAR))) @ v.conj().T
    return UnitaryOp(u, h.shape)


def hamiltonian_propagator(h: Observable):
    """Return t -> U(t) with the eigendecomposition of H computed once.

    Sweeps over dense time grids should use this instead of calling
    unitary_from_hamiltonian per point; the result is identical.
    """
    w, v = eigh(h)
    v_dag = v.conj().T
    shape = h.shape

    def u_of_t(t: float) -> UnitaryOp:
        return UnitaryOp((v * np.exp(-1j * w * (t / HBAR))) @ v_dag, shape)

    return u_of_t


def evolve(rho: QuantumState, u: UnitaryOp) -> QuantumState:
    """Conjugate a state by a unitary: U rho U^dag."""
    if rho.dim != u.dim:
        raise ValueError(f"state dim {rho.dim} does not match unitary dim {u.dim}")
    m = u.matrix @ rho.matrix @ u.matrix.conj().T
    m = 0.5 * (m + m.conj().T)
    return QuantumState(m, rho.shape)
