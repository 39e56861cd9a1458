"""Finite-dimensional states, bases and projective measurement statistics.

Matrices and vectors are plain complex numpy arrays wrapped in small frozen
dataclasses that validate on construction. Basis vectors are stored as the
columns of a unitary matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimMismatch,
    NotHermitian,
    NotOrthonormal,
    NotPositive,
    NotUnitary,
    TraceNotOne,
    WeightError,
)
from .jacobi import jacobi_eigh

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
NORM_TOL = 1e-9
ORTHO_TOL = 1e-9
UNITARY_TOL = 1e-9
PROB_SUM_TOL = 1e-9
PROB_CLAMP_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def ket(amplitudes: Sequence[complex] | np.ndarray, normalize: bool = False) -> np.ndarray:
    """Return a unit-norm state vector.

    With ``normalize=False`` the squared norm must already be within 1e-9 of 1.
    """
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ValueError("state vector must be non-empty and finite")
    norm2 = float(np.vdot(v, v).real)
    if normalize:
        if norm2 == 0.0:
            raise ValueError("cannot normalise the zero vector")
        return v / np.sqrt(norm2)
    if abs(norm2 - 1.0) > NORM_TOL:
        raise ValueError(f"state vector not normalised (|psi|^2 = {norm2:.12g})")
    return v


def basis_ket(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


KET_0 = _frozen(basis_ket(2, 0))
KET_1 = _frozen(basis_ket(2, 1))
KET_PLUS = _frozen(np.array([1.0, 1.0], dtype=complex) / np.sqrt(2))
KET_MINUS = _frozen(np.array([1.0, -1.0], dtype=complex) / np.sqrt(2))


def maximally_coherent_ket(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Validated density matrix. Build through :func:`make_density`."""

    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, idx):
        return self.matrix[idx]


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal basis; ``vectors[:, k]`` is the k-th basis state."""

    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise NotOrthonormal(f"basis matrix must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NotOrthonormal("basis vectors must be finite")
        gram_err = float(np.abs(v.conj().T @ v - np.eye(v.shape[0])).max())
        if gram_err > ORTHO_TOL:
            raise NotOrthonormal(f"max |<v_k|v_l> - delta_kl| = {gram_err:.3e}")
        object.__setattr__(self, "vectors", _frozen(v))

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[complex]]) -> "MeasurementBasis":
        return cls(np.column_stack([np.asarray(x, dtype=complex) for x in vectors]))

    @classmethod
    def computational(cls, dim: int) -> "MeasurementBasis":
        return cls(np.eye(dim, dtype=complex))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.dim

    def __getitem__(self, k: int) -> np.ndarray:
        return self.vectors[:, k]

    def projectors(self) -> np.ndarray:
        v = self.vectors
        return np.einsum("ik,jk->kij", v, v.conj())


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the outcomes of one projective measurement."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.size == 0 or not np.all(np.isfinite(p)):
            raise ValueError("distribution must be non-empty and finite")
        if p.min() < -PROB_CLAMP_TOL or p.max() > 1.0 + PROB_CLAMP_TOL:
            raise ValueError(f"probabilities outside [0, 1]: {p}")
        p = np.clip(p, 0.0, 1.0)
        total = float(p.sum())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total:.12g}, not 1")
        object.__setattr__(self, "probs", _frozen(p))

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, i):
        return self.probs[i]

    def __iter__(self):
        return iter(self.probs.tolist())


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: MeasurementBasis

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors.vectors
        return (v * self.eigenvalues) @ v.conj().T


def make_density(entries) -> DensityOperator:
    """Validate a square complex array as a density operator.

    Raises NotHermitian, TraceNotOne or NotPositive, each carrying the
    measured residual.
    """
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"density matrix must be square, got shape {m.shape}")
    if m.shape[0] < 2:
        raise DimMismatch("density matrix dimension must be at least 2")
    if not np.all(np.isfinite(m)):
        raise NotHermitian(float("inf"), "non-finite entries")
    herm = float(np.abs(m - m.conj().T).max())
    if herm > HERMITIAN_TOL:
        raise NotHermitian(herm)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceNotOne(abs(tr - 1.0), f"trace = {tr:.12g}")
    # cheap LAPACK check; the Jacobi oracle is kept for eigen_decompose
    lowest = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
    if lowest < -PSD_TOL:
        raise NotPositive(-lowest, f"smallest eigenvalue {lowest:.6g}")
    return DensityOperator(_frozen(m))


def from_ensemble(weights: Sequence[float], states: Sequence[Sequence[complex]]) -> DensityOperator:
    w = np.asarray(weights, dtype=float).reshape(-1)
    if len(states) != w.size or w.size == 0:
        raise WeightError(f"{w.size} weights for {len(states)} states")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise WeightError(f"weights must be finite and nonnegative: {w}")
    if abs(w.sum() - 1.0) > 1e-9:
        raise WeightError(f"weights sum to {w.sum():.12g}, not 1")
    vecs = [ket(s) for s in states]
    dims = {v.size for v in vecs}
    if len(dims) != 1:
        raise DimMismatch(f"ensemble states have mixed dimensions {sorted(dims)}")
    rho = sum(wk * np.outer(v, v.conj()) for wk, v in zip(w, vecs))
    return make_density(rho)


def pure(amplitudes) -> DensityOperator:
    v = ket(amplitudes)
    return make_density(np.outer(v, v.conj()))


def maximally_mixed(dim: int) -> DensityOperator:
    return make_density(np.eye(dim, dtype=complex) / dim)


def eigen_decompose(rho: DensityOperator) -> EigenDecomposition:
    """Spectral decomposition via the Jacobi oracle.

    Eigenvalues come back in descending order; round-off negatives down to
    -1e-9 are clamped to zero.
    """
    w, v = jacobi_eigh(rho.matrix)
    if w.min() < -PSD_TOL:
        raise NotPositive(-float(w.min()))
    w = np.where(w < 0.0, 0.0, w)
    return EigenDecomposition(_frozen(w), MeasurementBasis(v))


def _check_dims(rho: DensityOperator, basis: MeasurementBasis) -> None:
    if rho.dim != basis.dim:
        raise DimMismatch(f"state has dim {rho.dim}, basis has dim {basis.dim}")


def outcome_probabilities(rho: DensityOperator, basis: MeasurementBasis) -> OutcomeDistribution:
    """p_i = <e_i|rho|e_i> for each basis vector."""
    _check_dims(rho, basis)
    v = basis.vectors
    p = np.einsum("ik,ij,jk->k", v.conj(), rho.matrix, v).real
    return OutcomeDistribution(p)


def outcome_probabilities_batch(rho: DensityOperator, unitaries: np.ndarray) -> np.ndarray:
    """Outcome probabilities for a stack of bases given as unitaries (count, n, n).

    Row b holds <v_k|rho|v_k> for the columns v_k of ``unitaries[b]``; no
    orthonormality check is made, so callers pass generated unitaries only.
    """
    u = np.asarray(unitaries, dtype=complex)
    if u.shape[-1] != rho.dim:
        raise DimMismatch(f"bases have dim {u.shape[-1]}, state has dim {rho.dim}")
    return np.einsum("bik,ij,bjk->bk", u.conj(), rho.matrix, u).real


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitary(f"expected a square matrix, got shape {u.shape}")
    err = float(np.abs(u @ u.conj().T - np.eye(u.shape[0])).max())
    if err > tol:
        raise NotUnitary(f"max |U U^dag - I| = {err:.3e}")
    return u


def apply_unitary(rho: DensityOperator, u: np.ndarray) -> DensityOperator:
    u = check_unitary(u)
    if u.shape[0] != rho.dim:
        raise DimMismatch(f"unitary has dim {u.shape[0]}, state has dim {rho.dim}")
    return make_density(u @ rho.matrix @ u.conj().T)


def random_density(dim: int, rng: np.random.Generator) -> DensityOperator:
    """Random full-rank state A A^dag / tr(A A^dag) with Gaussian A."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = a @ a.conj().T
    return make_density(m / np.trace(m).real)


def random_unitaries(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitaries, shape ``(count, dim, dim)``.

    QR of complex Gaussian matrices with the phases of diag(R) pushed into Q.
    """
    z = (rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return random_unitaries(dim, 1, rng)[0]


def random_basis(dim: int, rng: np.random.Generator) -> MeasurementBasis:
    return MeasurementBasis(random_unitary(dim, rng))
