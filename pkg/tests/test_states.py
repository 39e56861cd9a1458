import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohmeter.errors import DimMismatch, NotHermitian, NotPositive, NotUnitary, TraceNotOne, WeightError
from cohmeter.jacobi import jacobi_eigh
from cohmeter.states import (
    KET_0,
    KET_1,
    KET_PLUS,
    MeasurementBasis,
    OutcomeDistribution,
    apply_unitary,
    eigen_decompose,
    from_ensemble,
    make_density,
    maximally_mixed,
    outcome_probabilities,
    outcome_probabilities_batch,
    random_density,
    random_unitaries,
    random_unitary,
)
from cohmeter.optics import rotation
from cohmeter.search import detector_basis

from oracles import closed_form_qubit_spectrum


class TestJacobi:
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_matches_lapack(self, rng, n):
        for _ in range(20):
            a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            h = a + a.conj().T
            w, v = jacobi_eigh(h)
            assert np.all(np.diff(w) <= 0)
            np.testing.assert_allclose(np.sort(w), np.linalg.eigvalsh(h), atol=1e-10)
            np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
            np.testing.assert_allclose((v * w) @ v.conj().T, h, atol=1e-10)

    def test_degenerate_spectrum(self):
        w, v = jacobi_eigh(np.eye(3) / 3)
        np.testing.assert_allclose(w, [1 / 3] * 3)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-14)

    def test_budget_exhaustion_raises(self, rng):
        from cohmeter.errors import ConvergenceFailure

        a = rng.standard_normal((6, 6))
        with pytest.raises(ConvergenceFailure):
            jacobi_eigh(a + a.T, max_sweeps=1)


class TestMakeDensity:
    def test_projector(self):
        rho = make_density([[1, 0], [0, 0]])
        assert rho.dim == 2

    def test_worked_partial_matrix(self):
        rho = make_density([[5 / 8, 3 / 8], [3 / 8, 3 / 8]])
        np.testing.assert_allclose(rho.matrix, [[0.625, 0.375], [0.375, 0.375]])

    def test_not_positive(self):
        m = np.array([[0.6, 0.5], [0.5, 0.4]])
        lowest = closed_form_qubit_spectrum(m).min()
        assert lowest < 0
        with pytest.raises(NotPositive) as exc:
            make_density(m)
        assert exc.value.residual == pytest.approx(-lowest, rel=1e-9)
        assert "positive" in str(exc.value)

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian) as exc:
            make_density([[0.5, 0.1], [0.2, 0.5]])
        assert exc.value.residual == pytest.approx(0.1)

    def test_trace(self):
        with pytest.raises(TraceNotOne) as exc:
            make_density([[0.5, 0], [0, 0.6]])
        assert exc.value.residual == pytest.approx(0.1)

    @pytest.mark.parametrize("entries", [[[1.0]], np.ones((2, 3)) / 2])
    def test_shape(self, entries):
        with pytest.raises(DimMismatch):
            make_density(entries)

    def test_matrix_is_read_only(self):
        rho = make_density(np.eye(2) / 2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0


class TestFromEnsemble:
    def test_worked_state(self):
        rho = from_ensemble([0.75, 0.25], [KET_PLUS, KET_0])
        np.testing.assert_allclose(rho.matrix, [[5 / 8, 3 / 8], [3 / 8, 3 / 8]], atol=1e-15)

    def test_single(self):
        np.testing.assert_allclose(from_ensemble([1.0], [KET_0]).matrix, [[1, 0], [0, 0]])

    def test_maximally_mixed(self):
        np.testing.assert_allclose(from_ensemble([0.5, 0.5], [KET_0, KET_1]).matrix, np.eye(2) / 2)

    @pytest.mark.parametrize("weights", [[0.7, 0.4], [-0.1, 1.1], [1.0]])
    def test_bad_weights(self, weights):
        with pytest.raises(WeightError):
            from_ensemble(weights, [KET_0, KET_1])

    def test_mixed_dims(self):
        with pytest.raises(DimMismatch):
            from_ensemble([0.5, 0.5], [KET_0, [1, 0, 0]])


class TestEigenDecompose:
    def test_worked_spectrum(self, appendix_partial):
        eig = eigen_decompose(appendix_partial)
        np.testing.assert_allclose(eig.eigenvalues, closed_form_qubit_spectrum(appendix_partial.matrix), atol=1e-14)
        assert eig.eigenvalues == pytest.approx([0.895, 0.105], abs=1e-3)

    def test_maximally_mixed(self):
        eig = eigen_decompose(maximally_mixed(2))
        np.testing.assert_allclose(eig.eigenvalues, [0.5, 0.5])

    def test_reconstruction_random(self, rng):
        ens = [random_unitary(4, rng)[:, 0] for _ in range(3)]
        rho = from_ensemble([0.5, 0.3, 0.2], ens)
        eig = eigen_decompose(rho)
        assert np.abs(eig.reconstruct() - rho.matrix).max() <= 1e-8

    def test_reconstruction_many(self, rng):
        worst = 0.0
        for i in range(1000):
            rho = random_density(2 + i % 5, rng)
            eig = eigen_decompose(rho)
            worst = max(worst, np.abs(eig.reconstruct() - rho.matrix).max())
            assert np.all(np.diff(eig.eigenvalues) <= 0)
        assert worst <= 1e-8

    def test_rank_deficient_clamped(self):
        eig = eigen_decompose(make_density(np.outer(KET_PLUS, KET_PLUS)))
        assert eig.eigenvalues.min() >= 0.0
        assert eig.eigenvalues[0] == pytest.approx(1.0)


class TestOutcomeProbabilities:
    def test_detector_basis_on_worked_state(self, appendix_partial):
        equalized = apply_unitary(appendix_partial, rotation(np.arctan(1 / 3) / 2))
        p = outcome_probabilities(equalized, detector_basis(0.0))
        assert p.probs == pytest.approx([0.105, 0.895], abs=1e-3)

    def test_maximally_mixed_any_basis(self, rng):
        p = outcome_probabilities(maximally_mixed(2), MeasurementBasis(random_unitary(2, rng)))
        np.testing.assert_allclose(p.probs, [0.5, 0.5], atol=1e-15)

    def test_incoherent_state(self, mixed_3_1):
        p = outcome_probabilities(mixed_3_1, MeasurementBasis.computational(2))
        np.testing.assert_allclose(p.probs, [0.75, 0.25])

    def test_dim_mismatch(self, mixed_3_1):
        with pytest.raises(DimMismatch):
            outcome_probabilities(mixed_3_1, MeasurementBasis.computational(3))

    def test_eigenbasis_gives_spectrum(self, rng):
        for _ in range(100):
            rho = random_density(int(rng.integers(2, 7)), rng)
            eig = eigen_decompose(rho)
            np.testing.assert_allclose(outcome_probabilities(rho, eig.eigenvectors).probs, eig.eigenvalues, atol=1e-8)

    def test_batch_agrees(self, rng):
        rho = random_density(3, rng)
        us = random_unitaries(3, 10, rng)
        batch = outcome_probabilities_batch(rho, us)
        for u, row in zip(us, batch):
            np.testing.assert_allclose(outcome_probabilities(rho, MeasurementBasis(u)).probs, row, atol=1e-14)


class TestOutcomeDistribution:
    def test_clamps_round_off(self):
        d = OutcomeDistribution([-1e-13, 1 + 1e-13])
        assert d.probs.min() == 0.0

    @pytest.mark.parametrize("probs", [[0.5, 0.6], [-0.1, 1.1]])
    def test_rejects(self, probs):
        with pytest.raises(ValueError):
            OutcomeDistribution(probs)


class TestApplyUnitary:
    def test_identity(self, appendix_partial):
        np.testing.assert_array_equal(apply_unitary(appendix_partial, np.eye(2)).matrix, appendix_partial.matrix)

    def test_not_unitary(self, appendix_partial):
        with pytest.raises(NotUnitary):
            apply_unitary(appendix_partial, [[1, 1], [0, 1]])

    def test_worked_incoherent_rotation(self, mixed_3_1):
        from cohmeter.optics import PhaseShifter

        phi = 0.7
        u = PhaseShifter(phi).matrix @ rotation(0.785)
        out = apply_unitary(mixed_3_1, u).matrix
        assert abs(out[0, 1]) == pytest.approx(0.25, abs=1e-6)
        assert out[0, 1] / abs(out[0, 1]) == pytest.approx(np.exp(-1j * phi))

    def test_worked_partial_rotation(self, appendix_partial):
        from cohmeter.optics import PhaseShifter

        out = apply_unitary(appendix_partial, PhaseShifter(1.1).matrix @ rotation(0.161)).matrix
        assert abs(out[0, 1]) == pytest.approx(0.395, abs=1e-3)

    def test_spectrum_preserved(self, rng):
        for _ in range(200):
            dim = int(rng.integers(2, 7))
            rho = random_density(dim, rng)
            out = apply_unitary(rho, random_unitary(dim, rng))
            assert np.trace(out.matrix).real == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(out.matrix, out.matrix.conj().T, atol=1e-14)
            np.testing.assert_allclose(
                eigen_decompose(out).eigenvalues, eigen_decompose(rho).eigenvalues, atol=1e-8
            )


@settings(max_examples=60, deadline=None)
@given(dim=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_probabilities_sum_to_one(dim, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(dim, rng)
    p = outcome_probabilities(rho, MeasurementBasis(random_unitary(dim, rng)))
    assert abs(p.probs.sum() - 1.0) <= 1e-9


def test_random_unitaries_are_unitary(rng):
    us = random_unitaries(4, 50, rng)
    eye = np.eye(4)
    for u in us:
        np.testing.assert_allclose(u @ u.conj().T, eye, atol=1e-12)


def test_random_unitary_haar_first_moment(rng):
    # E|U_00|^2 = 1/n for Haar measure
    us = random_unitaries(3, 20000, rng)
    assert np.mean(np.abs(us[:, 0, 0]) ** 2) == pytest.approx(1 / 3, abs=0.01)
