import numpy as np
import pytest

from qcorr import linalg
from qcorr.channels import choi_matrix, validate_cptp
from qcorr.sampling import (
    haar_unitary,
    random_commuting_pair,
    random_cptp,
    random_density,
    random_orthogonal_pure_pair,
    random_povm,
    rng_from_seed,
    substream,
)


class TestHaarUnitary:
    def test_unitarity(self, rng):
        for d in (1, 2, 5, 8):
            u = haar_unitary(d, rng)
            assert linalg.frobenius(u.conj().T @ u - np.eye(d)) < 1e-12

    def test_scalar_case(self, rng):
        u = haar_unitary(1, rng)
        assert abs(abs(u[0, 0]) - 1.0) < 1e-12

    def test_first_moment(self):
        # Haar moment: E|U_00|^2 = 1/d
        rng = rng_from_seed(5)
        vals = [abs(haar_unitary(2, rng)[0, 0]) ** 2 for _ in range(10_000)]
        assert np.mean(vals) == pytest.approx(0.5, abs=0.02)

    def test_determinism(self):
        a = haar_unitary(4, rng_from_seed(9))
        b = haar_unitary(4, rng_from_seed(9))
        assert np.array_equal(a, b)


class TestRandomDensity:
    def test_rank_one_is_pure(self, rng):
        rho = random_density(4, rng, rank=1)
        assert rho.entropy() == pytest.approx(0.0, abs=1e-9)
        assert rho.purity() == pytest.approx(1.0, abs=1e-10)

    def test_trace_one(self, rng):
        for _ in range(20):
            assert np.trace(random_density(3, rng).mat) == pytest.approx(1.0, abs=1e-12)

    def test_mean_purity_full_rank(self):
        # trace-normalized Wishart: E[Tr rho^2] = 0.8 at d=2 and 0.6 at d=3
        # (frozen from the Monte Carlo / beta-integral oracle)
        rng = rng_from_seed(6)
        for d, expected in ((2, 0.8), (3, 0.6)):
            purity = [random_density(d, rng).purity() for _ in range(10_000)]
            assert np.mean(purity) == pytest.approx(expected, abs=0.02)

    def test_bad_rank(self, rng):
        with pytest.raises(ValueError):
            random_density(3, rng, rank=4)


class TestRandomCptp:
    def test_env_one_is_unitary(self, rng):
        ch = random_cptp(3, rng, env_dim=1)
        assert len(ch.ops) == 1
        u = ch.ops[0]
        assert linalg.frobenius(u.conj().T @ u - np.eye(3)) < 1e-12

    def test_validates(self, rng):
        for d in (2, 3, 4):
            validate_cptp(list(random_cptp(d, rng).ops))

    def test_full_env_gives_full_choi_rank(self, rng):
        ranks = []
        for _ in range(10):
            ch = random_cptp(3, rng)
            w = linalg.hermitian_eig(choi_matrix(ch)).eigenvalues
            ranks.append(int(np.sum(w > 1e-10)))
        assert min(ranks) == 9

    def test_trace_preservation_residual(self, rng):
        ch = random_cptp(4, rng)
        resid = linalg.frobenius(
            np.einsum("kji,kjl->il", ch.ops.conj(), ch.ops) - np.eye(4)
        )
        assert resid < 1e-10


class TestRandomCommutingPair:
    def test_commute(self, rng):
        for d in (2, 3, 5):
            a, b = random_commuting_pair(d, rng)
            assert linalg.frobenius(linalg.commutator(a.mat, b.mat)) < 1e-12

    def test_valid_density_matrices(self, rng):
        a, b = random_commuting_pair(4, rng)
        assert np.trace(a.mat) == pytest.approx(1.0)
        assert b.spectrum().eigenvalues[0] >= -1e-12

    def test_spectra_independent(self):
        rng = rng_from_seed(8)
        tops_a, tops_b = [], []
        for _ in range(2000):
            a, b = random_commuting_pair(3, rng)
            tops_a.append(a.spectrum().eigenvalues[-1])
            tops_b.append(b.spectrum().eigenvalues[-1])
        corr = np.corrcoef(tops_a, tops_b)[0, 1]
        assert abs(corr) < 0.05


class TestOrthogonalPurePair:
    def test_orthogonal_and_normalized(self, rng):
        for d in (2, 3, 6):
            phi, psi = random_orthogonal_pure_pair(d, rng)
            assert abs(np.vdot(phi, psi)) < 1e-12
            assert np.linalg.norm(phi) == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)

    def test_component_beta_moments(self):
        # |<0|phi>|^2 ~ Beta(1, d-1): mean 1/d, second moment 2/(d(d+1))
        rng = rng_from_seed(10)
        d = 4
        vals = np.array(
            [abs(random_orthogonal_pure_pair(d, rng)[0][0]) ** 2 for _ in range(10_000)]
        )
        assert vals.mean() == pytest.approx(1 / d, abs=0.02)
        assert np.mean(vals**2) == pytest.approx(2 / (d * (d + 1)), abs=0.02)


class TestPovm:
    def test_elements_sum_to_identity(self, rng):
        povm = random_povm(3, 4, rng)
        assert linalg.frobenius(sum(povm) - np.eye(3)) < 1e-10
        for f in povm:
            assert linalg.hermitian_eig(f).eigenvalues[0] >= -1e-10


class TestSubstreams:
    def test_same_index_same_stream(self):
        x = substream(123, 7).standard_normal(32)
        y = substream(123, 7).standard_normal(32)
        assert np.array_equal(x, y)

    def test_different_indices_differ(self):
        x = substream(123, 1).standard_normal(32)
        y = substream(123, 2).standard_normal(32)
        assert not np.array_equal(x, y)

    def test_sampled_artifacts_bitwise_reproducible(self):
        a = random_cptp(3, substream(99, 0)).ops
        b = random_cptp(3, substream(99, 0)).ops
        assert np.array_equal(a, b)
