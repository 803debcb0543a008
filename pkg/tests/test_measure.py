import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mubrelation.exceptions import DimMismatch, InvalidState, WeightCountMismatch
from mubrelation.measure import (
    EnsembleState,
    SampleRecord,
    born_probabilities,
    dephase,
    empirical_post_state,
    mix,
    post_measurement_state,
    sample_counts,
    sample_measurements,
)
from mubrelation.mub import MixtureWeights, generate_mub, qubit_pauli_bases
from mubrelation.qmat import computational_basis, random_density, random_unitary

from oracles import SZ, dephase_by_projectors

Z, X, Y = qubit_pauli_bases()
KET0 = np.diag([1.0, 0.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)


def random_basis(n, seed):
    return computational_basis(n).rotated(random_unitary(n, 2.0, seed))


class TestBorn:
    def test_deterministic_outcome(self):
        np.testing.assert_allclose(born_probabilities(KET0, Z).probs, [1, 0], atol=1e-15)

    def test_unbiased_outcome(self):
        np.testing.assert_allclose(born_probabilities(KET0, X).probs, [0.5, 0.5], atol=1e-15)

    def test_maximally_mixed(self):
        for b in generate_mub(3):
            np.testing.assert_allclose(born_probabilities(np.eye(3) / 3, b).probs, 1 / 3, atol=1e-15)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            born_probabilities(np.eye(3) / 3, Z)

    def test_invalid_state(self):
        with pytest.raises(InvalidState):
            born_probabilities(np.diag([1.5, -0.5]), Z)

    def test_round_off_negative_is_clamped(self):
        # A rank-1 state measured in its own basis gives exact zeros up to round-off.
        rho = random_density(4, "pure", 3)
        w, v = np.linalg.eigh(rho)
        p = born_probabilities(rho, computational_basis(4).rotated(v)).probs
        assert np.all(p >= 0)
        assert p.sum() == pytest.approx(1.0, abs=1e-15)


class TestDephase:
    def test_plus_state_in_z(self):
        np.testing.assert_allclose(dephase(PLUS, Z).rho, np.eye(2) / 2, atol=1e-15)

    def test_diagonal_unchanged(self):
        rho = np.diag([0.3, 0.7]).astype(complex)
        np.testing.assert_allclose(dephase(rho, Z).rho, rho, atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_spin_expectation_form(self, seed):
        rho = random_density(2, "mixed", seed)
        s = np.trace(rho @ SZ / 2).real
        np.testing.assert_allclose(dephase(rho, Z).rho, np.eye(2) / 2 + 2 * s * SZ / 2, atol=1e-14)

    @given(n=st.integers(2, 7), seed=st.integers(0, 2**31))
    @settings(max_examples=40, deadline=None)
    def test_against_projector_oracle(self, n, seed):
        rho = random_density(n, "mixed", seed)
        b = random_basis(n, seed + 1)
        np.testing.assert_allclose(dephase(rho, b).rho, dephase_by_projectors(rho, b.vectors), atol=1e-12)

    @given(n=st.integers(2, 7), seed=st.integers(0, 2**31), kind=st.sampled_from(["pure", "mixed"]))
    @settings(max_examples=40, deadline=None)
    def test_idempotent_trace_positive(self, n, seed, kind):
        rho = random_density(n, kind, seed)
        b = random_basis(n, seed + 1)
        once = dephase(rho, b).rho
        twice = dephase(once, b).rho
        assert np.max(np.abs(twice - once)) <= 1e-12
        assert abs(np.trace(once) - 1) <= 1e-12
        assert np.linalg.eigvalsh(once)[0] >= -1e-12
        # Off-diagonals vanish in the measurement basis.
        in_basis = b.vectors.conj() @ once @ b.vectors.T
        assert np.max(np.abs(in_basis - np.diag(np.diag(in_basis)))) <= 1e-12

    @given(n=st.integers(2, 7), seed=st.integers(0, 2**31), a=st.floats(0, 1))
    @settings(max_examples=40, deadline=None)
    def test_linearity(self, n, seed, a):
        r1 = random_density(n, "pure", seed)
        r2 = random_density(n, "mixed", seed + 1)
        b = random_basis(n, seed + 2)
        lhs = dephase(a * r1 + (1 - a) * r2, b).rho
        rhs = a * dephase(r1, b).rho + (1 - a) * dephase(r2, b).rho
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


class TestMix:
    def test_single(self):
        s = dephase(PLUS, X)
        np.testing.assert_allclose(mix([s], [1.0]), s.rho)

    def test_qubit_relation(self):
        states = [dephase(KET0, b, a) for a, b in enumerate((Z, X, Y))]
        np.testing.assert_allclose(mix(states, MixtureWeights.uniform(3)), np.diag([2 / 3, 1 / 3]), atol=1e-15)

    def test_one_hot(self):
        states = [dephase(random_density(2, "mixed", 1), b, a) for a, b in enumerate((Z, X, Y))]
        np.testing.assert_allclose(mix(states, [1, 0, 0]), states[0].rho)

    def test_count_mismatch(self):
        with pytest.raises(WeightCountMismatch):
            mix([dephase(KET0, Z)], MixtureWeights.uniform(2))

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            mix([EnsembleState(0, np.eye(2) / 2), EnsembleState(1, np.eye(3) / 3)], [0.5, 0.5])


class TestSampling:
    def test_deterministic_row(self):
        rec = sample_measurements(KET0, qubit_pauli_bases(), 1000, seed=1)
        np.testing.assert_array_equal(rec.counts[0], [1000, 0])
        assert np.all(rec.counts.sum(axis=1) == 1000)

    def test_binomial_concentration(self):
        m = 10**6
        rec = sample_measurements(np.eye(2) / 2, qubit_pauli_bases(), m, seed=5)
        assert np.all(np.abs(rec.counts - m / 2) <= 5 * np.sqrt(m / 4))

    def test_reproducible(self):
        a = sample_measurements(random_density(3, "pure", 0), generate_mub(3), 500, seed=9)
        b = sample_measurements(random_density(3, "pure", 0), generate_mub(3), 500, seed=9)
        np.testing.assert_array_equal(a.counts, b.counts)
        c = sample_measurements(random_density(3, "pure", 0), generate_mub(3), 500, seed=10)
        assert not np.array_equal(a.counts, c.counts)

    def test_rows_are_order_independent(self):
        # Row alpha depends only on (seed, alpha), not on the other bases.
        rho = random_density(3, "mixed", 2)
        mubs = generate_mub(3)
        full = sample_measurements(rho, mubs, 200, seed=4)
        reordered = sample_measurements(rho, [mubs[0], mubs[1], mubs[3], mubs[2]], 200, seed=4)
        np.testing.assert_array_equal(full.counts[:2], reordered.counts[:2])

    def test_inverse_cdf_frequencies(self):
        p = np.array([0.1, 0.2, 0.3, 0.4])
        counts = sample_counts(p, 200_000, np.random.default_rng(0))
        assert np.all(np.abs(counts / 200_000 - p) <= 5 * np.sqrt(p * (1 - p) / 200_000))

    def test_shots_must_be_positive(self):
        with pytest.raises(ValueError):
            sample_measurements(KET0, qubit_pauli_bases(), 0, seed=0)

    def test_record_validation(self):
        with pytest.raises(ValueError):
            SampleRecord(seed=0, shots=3, counts=[[1, 1], [3, 0]])


class TestEmpiricalPostState:
    def test_exact_counts_agree_with_mix(self):
        # Rational probabilities (3/8, 5/8) etc. realised exactly by counts with M = 8.
        rho = np.array([[3 / 8, 1 / 8 - 1j / 8], [1 / 8 + 1j / 8, 5 / 8]])
        bases = qubit_pauli_bases()
        probs = np.stack([born_probabilities(rho, b).probs for b in bases])
        counts = np.rint(probs * 8).astype(int)
        np.testing.assert_allclose(counts / 8, probs, atol=1e-15)
        rec = SampleRecord(seed=0, shots=8, counts=counts)
        np.testing.assert_allclose(empirical_post_state(rec, bases), post_measurement_state(rho, bases), atol=1e-12)

    def test_single_outcome_rows(self):
        bases = qubit_pauli_bases()
        rec = SampleRecord(seed=0, shots=5, counts=[[5, 0], [0, 5], [5, 0]])
        w = MixtureWeights([0.5, 0.3, 0.2])
        expected = 0.5 * bases[0].projector(0) + 0.3 * bases[1].projector(1) + 0.2 * bases[2].projector(0)
        np.testing.assert_allclose(empirical_post_state(rec, bases, w), expected, atol=1e-15)

    def test_monte_carlo_calibration(self):
        bases = qubit_pauli_bases()
        ok = 0
        for seed in range(200):
            rho = random_density(2, "pure", seed)
            rec = sample_measurements(rho, bases, 10**4, seed)
            err = np.linalg.norm(empirical_post_state(rec, bases) - post_measurement_state(rho, bases))
            ok += err <= 0.1
        assert ok / 200 >= 0.99

    def test_shape_mismatch(self):
        rec = SampleRecord(seed=0, shots=1, counts=[[1, 0], [1, 0]])
        with pytest.raises(DimMismatch):
            empirical_post_state(rec, qubit_pauli_bases())
