"""Minimum-Shannon-entropy search over measurement bases.

The minimum of the outcome entropy over all orthonormal bases equals the von
Neumann entropy and is reached at the eigenbasis. This module provides the
ways of locating that minimum without diagonalising: the equatorial phase
sweep used by the interferometers, and a random-basis search for any
dimension. ``min_shannon_oracle`` is the closed-form answer for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy.linalg import expm

from .entropy import entropy_bits, entropy_bits_rows, outcome_shannon
from .errors import DimMismatch, PreconditionFailed
from .states import (
    DensityOperator,
    MeasurementBasis,
    OutcomeDistribution,
    _check_dims,
    eigen_decompose,
    outcome_probabilities,
    random_basis,
)

TWO_PI = 2.0 * math.pi
DEFAULT_GRID = 1024
REFINE_TOL = 1e-8
TIE_TOL = 1e-12
UNIFORM_TOL = 1e-6


def qubit_basis(theta: float, phi: float) -> MeasurementBasis:
    """Basis {|e1(theta, phi)>, |e2(theta, phi)>} on the Bloch sphere.

    |e1> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
    |e2> = sin(theta/2)|0> - e^{i phi} cos(theta/2)|1>
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    if not 0.0 <= phi < TWO_PI:
        raise ValueError(f"phi must lie in [0, 2 pi), got {phi}")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    return MeasurementBasis(np.array([[c, s], [e * s, -e * c]], dtype=complex))


def _detector_vectors(phis: np.ndarray) -> np.ndarray:
    # (N, 2, 2); columns are |D0(phi)>, |D1(phi)>
    ph = np.exp(-1j * np.asarray(phis, dtype=float))
    v = np.empty(ph.shape + (2, 2), dtype=complex)
    v[..., 0, 0] = 1.0
    v[..., 0, 1] = 1.0
    v[..., 1, 0] = -ph
    v[..., 1, 1] = ph
    return v / math.sqrt(2.0)


def detector_basis(phi: float) -> MeasurementBasis:
    """Interferometer detection basis.

    |D0> = (|0> - e^{-i phi}|1>)/sqrt2 and |D1> = (|0> + e^{-i phi}|1>)/sqrt2,
    i.e. |D0(phi)> = |e2(pi/2, -phi)> and |D1(phi)> = |e1(pi/2, -phi)>.
    """
    return MeasurementBasis(_detector_vectors(np.array(phi)))


def _shifted_detector_probs(rho: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Outcome probabilities of S_phi rho S_phi^dag in the {D0(phi), D1(phi)} basis."""
    phis = np.asarray(phis, dtype=float)
    s = np.zeros(phis.shape + (2, 2), dtype=complex)
    s[..., 0, 0] = 1.0
    s[..., 1, 1] = np.exp(1j * phis)
    shifted = s @ rho @ np.conj(np.swapaxes(s, -1, -2))
    v = _detector_vectors(phis)
    p = np.einsum("...ik,...ij,...jk->...k", v.conj(), shifted, v).real
    return np.clip(p, 0.0, 1.0)


def sweep_distribution(rho: DensityOperator, phi: float) -> OutcomeDistribution:
    """Detector statistics of one sweep setting (phase shifter + detection at ``phi``)."""
    if rho.dim != 2:
        raise DimMismatch(f"equatorial sweep needs a qubit, got dim {rho.dim}")
    return OutcomeDistribution(_shifted_detector_probs(rho.matrix, np.array(phi)))


def sweep_entropy(rho: DensityOperator, phi: float) -> float:
    return entropy_bits(sweep_distribution(rho, phi).probs)


@dataclass(frozen=True)
class SweepResult:
    phis: np.ndarray
    probs: np.ndarray
    entropies: np.ndarray
    argmin_index: int

    @property
    def argmin_phi(self) -> float:
        return float(self.phis[self.argmin_index])

    @property
    def min_entropy(self) -> float:
        return float(self.entropies[self.argmin_index])

    @property
    def min_distribution(self) -> OutcomeDistribution:
        return OutcomeDistribution(self.probs[self.argmin_index])

    @property
    def grid(self) -> list[tuple[float, OutcomeDistribution, float]]:
        return list(self)

    def __len__(self) -> int:
        return self.phis.size

    def __iter__(self) -> Iterator[tuple[float, OutcomeDistribution, float]]:
        for phi, p, h in zip(self.phis, self.probs, self.entropies):
            yield float(phi), OutcomeDistribution(p), float(h)


def sweep_grid(grid_points: int) -> np.ndarray:
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    return TWO_PI * np.arange(grid_points) / grid_points


def first_argmin(values: np.ndarray, tol: float = TIE_TOL) -> int:
    """Index of the first entry within ``tol`` of the minimum."""
    values = np.asarray(values)
    return int(np.flatnonzero(values <= values.min() + tol)[0])


def sweep_from_probs(phis: np.ndarray, probs: np.ndarray) -> SweepResult:
    probs = np.asarray(probs, dtype=float)
    entropies = entropy_bits_rows(probs)
    return SweepResult(phis, probs, entropies, first_argmin(entropies))


def equatorial_sweep(rho: DensityOperator, grid_points: int = DEFAULT_GRID) -> SweepResult:
    """Scan the interferometer phase over ``2 pi k / grid_points``.

    At each phase the state passes the phase shifter and is analysed in the
    {D0(phi), D1(phi)} basis, the same composition as the worked examples, so
    P0(phi) = 1/2 - |rho01| cos(2 phi - arg rho01) for an equalized state.
    """
    if rho.dim != 2:
        raise DimMismatch(f"equatorial sweep needs a qubit, got dim {rho.dim}")
    phis = sweep_grid(grid_points)
    return sweep_from_probs(phis, _shifted_detector_probs(rho.matrix, phis))


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = REFINE_TOL) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on [lo, hi] until the bracket is narrower than ``tol``."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def refine_minimum(
    f: Callable[[float], float], sweep: SweepResult, tol: float = REFINE_TOL
) -> tuple[float, float]:
    """Golden-section polish of the grid minimum, within one grid step either side.

    The grid point is kept unless the refined value is strictly lower, so flat
    curves keep the smallest-phase tie-break. The returned phase is wrapped
    into [0, 2 pi).
    """
    step = TWO_PI / len(sweep)
    phi0 = sweep.argmin_phi
    phi, h = golden_section(f, phi0 - step, phi0 + step, tol)
    if h < sweep.min_entropy - TIE_TOL:
        return phi % TWO_PI, h
    return phi0, sweep.min_entropy


def min_shannon_random_search(
    rho: DensityOperator, trials: int, seed: int
) -> tuple[float, MeasurementBasis]:
    """Best outcome entropy over ``trials`` Haar-random bases.

    Trial k draws from ``default_rng([seed, k])``, so the result does not
    depend on evaluation order. Ties keep the earliest trial. The eigenbasis
    is never offered as a candidate.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    best_h, best_basis = math.inf, None
    for k in range(trials):
        basis = random_basis(rho.dim, np.random.default_rng([seed, k]))
        h = outcome_shannon(rho, basis)
        if h < best_h:
            best_h, best_basis = h, basis
    return best_h, best_basis


def min_shannon_oracle(rho: DensityOperator) -> tuple[float, MeasurementBasis]:
    eig = eigen_decompose(rho)
    return entropy_bits(eig.eigenvalues), eig.eigenvectors


def overlap_matrix(meas: MeasurementBasis, eigen: MeasurementBasis) -> np.ndarray:
    """a[i, j] = |<e_i|eta_j>|^2; doubly stochastic for two orthonormal bases."""
    if meas.dim != eigen.dim:
        raise DimMismatch(f"bases have dims {meas.dim} and {eigen.dim}")
    return np.abs(meas.vectors.conj().T @ eigen.vectors) ** 2


def is_doubly_stochastic(a: np.ndarray, tol: float = 1e-9) -> bool:
    a = np.asarray(a)
    n = a.shape[0]
    return bool(
        a.min() >= -tol
        and a.max() <= 1 + tol
        and np.abs(a.sum(axis=0) - 1).max() <= tol
        and np.abs(a.sum(axis=1) - 1).max() <= tol
        and abs(a.sum() - n) <= 1e-8
    )


def fourier_matrix(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(2j * math.pi * np.outer(k, k) / n) / math.sqrt(n)


def uniform_basis(rho: DensityOperator) -> MeasurementBasis:
    """Eigenbasis rotated by the discrete Fourier transform.

    Every vector overlaps each eigenvector with weight 1/n, so the outcome
    distribution is uniform.
    """
    eig = eigen_decompose(rho)
    return MeasurementBasis(eig.eigenvectors.vectors @ fourier_matrix(rho.dim))


@dataclass(frozen=True)
class StationarityReport:
    """Outcome of :func:`check_uniform_stationarity`.

    ``max_delta`` is the largest perturbed entropy minus log2(n); it must not
    exceed 1e-9.
    """

    dim: int
    uniform_entropy: float
    max_entropy: float
    max_delta: float
    trials: int
    step: float

    @property
    def passed(self) -> bool:
        return self.max_delta <= 1e-9


def _random_generator(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    k = 0.5 * (g - g.conj().T)
    return k / np.linalg.norm(k)


def check_uniform_stationarity(
    rho: DensityOperator,
    basis: MeasurementBasis,
    trials: int = 200,
    step: float = 1e-3,
    seed: int = 0,
) -> StationarityReport:
    """Perturb a uniform-producing basis and confirm the entropy never rises.

    Each perturbation rotates the basis by exp(step * K) with K a random
    anti-Hermitian matrix of unit Frobenius norm.
    """
    _check_dims(rho, basis)
    n = rho.dim
    p = outcome_probabilities(rho, basis).probs
    if np.abs(p - 1.0 / n).max() > UNIFORM_TOL:
        raise PreconditionFailed(f"basis does not produce a uniform distribution: {p}")
    h0 = entropy_bits(p)
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(trials):
        u = expm(step * _random_generator(n, rng))
        worst = max(worst, outcome_shannon(rho, MeasurementBasis(u @ basis.vectors)))
    return StationarityReport(n, h0, worst, worst - math.log2(n), trials, step)
