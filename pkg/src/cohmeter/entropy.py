"""Shannon, von Neumann and dephased-state entropies, in bits.

Coherence values are reported in cobits; one cobit is the coherence of the
maximally coherent qubit, so numerically a cobit equals a bit.
"""

from __future__ import annotations

import numpy as np

from .errors import CohmeterError
from .states import (
    DensityOperator,
    MeasurementBasis,
    OutcomeDistribution,
    _check_dims,
    eigen_decompose,
    make_density,
    outcome_probabilities,
)

ZERO_PROB = 1e-15
COHERENCE_CLAMP = 1e-9


def entropy_bits(probs) -> float:
    """-sum p log2 p with 0 log 0 = 0 (entries at or below 1e-15 are skipped)."""
    p = np.asarray(probs, dtype=float)
    p = p[p > ZERO_PROB]
    return float(max(-np.sum(p * np.log2(p)), 0.0))


def entropy_bits_rows(probs: np.ndarray) -> np.ndarray:
    """Row-wise :func:`entropy_bits` for a 2-D array of distributions."""
    p = np.asarray(probs, dtype=float)
    safe = np.where(p > ZERO_PROB, p, 1.0)
    terms = np.where(p > ZERO_PROB, p * np.log2(safe), 0.0)
    return np.maximum(-terms.sum(axis=-1), 0.0)


def shannon(dist: OutcomeDistribution) -> float:
    return entropy_bits(dist.probs)


def outcome_shannon(rho: DensityOperator, basis: MeasurementBasis) -> float:
    return entropy_bits(outcome_probabilities(rho, basis).probs)


def von_neumann(rho: DensityOperator) -> float:
    return entropy_bits(eigen_decompose(rho).eigenvalues)


def dephase(rho: DensityOperator, basis: MeasurementBasis) -> DensityOperator:
    """Delete the off-diagonal elements of rho in ``basis``.

    The result is expressed back in the original (matrix) representation.
    """
    _check_dims(rho, basis)
    v = basis.vectors
    pops = outcome_probabilities(rho, basis).probs
    return make_density((v * pops) @ v.conj().T)


def diag_entropy(rho: DensityOperator, basis: MeasurementBasis) -> float:
    return outcome_shannon(rho, basis)


def relative_entropy_of_coherence(rho: DensityOperator, basis: MeasurementBasis | None = None) -> float:
    """S(rho_diag) - S(rho), in cobits.

    ``basis`` is the incoherent reference basis (computational by default).
    """
    if basis is None:
        basis = MeasurementBasis.computational(rho.dim)
    c = diag_entropy(rho, basis) - von_neumann(rho)
    if c < -COHERENCE_CLAMP:
        raise CohmeterError(f"negative relative entropy of coherence {c:.3e}; numerical inconsistency")
    return max(c, 0.0)
