import numpy as np
import pytest

from beamlab import (ArrayGeometry, MismatchSpec, generate_snapshots,
                     hermitianize, load_matrix_csv, pearson_correlation,
                     realize_scenario, sample_covariance, save_matrix_csv,
                     steering_vector, theoretical_covariance, theoretical_ipnc)
from beamlab.errors import DimensionError, UndefinedCorrelationError

from conftest import default_truth, rng_for


class TestSampleCovariance:
    def test_single_outer_product(self):
        scm = sample_covariance(np.array([[1.0, 1.0j]]))
        assert np.allclose(scm, np.array([[1.0, -1.0j], [1.0j, 1.0]]))

    def test_orthonormal_pair(self):
        scm = sample_covariance(np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex))
        assert np.allclose(scm, 0.5 * np.eye(2))

    def test_bad_shape_rejected(self):
        with pytest.raises(DimensionError):
            sample_covariance(np.ones(4, dtype=complex))

    def test_default_scenario_trace(self):
        # expected trace under the unit-norm steering convention:
        # sigma_s^2 + sum_p sigma_p^2 + L * sigma_n^2
        truth = default_truth(rng_for(20), snr_db=10.0)
        data = generate_snapshots(truth, rng_for(20, 1))
        expected = 10.0 + 2000.0 + 12.0
        trace = np.trace(sample_covariance(data)).real
        assert 0.8 * expected < trace < 1.2 * expected

    def test_merge_identity(self):
        rng = rng_for(21)
        a = rng.standard_normal((7, 4)) + 1j * rng.standard_normal((7, 4))
        b = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
        merged = sample_covariance(np.vstack([a, b])) * 12
        split = sample_covariance(a) * 7 + sample_covariance(b) * 5
        assert np.allclose(merged, split, atol=1e-12)


class TestTheoreticalCovariance:
    def test_noise_only(self):
        geom = ArrayGeometry.ula(5)
        truth = realize_scenario(geom, 0.0, 0.0, [], [], 2.5, 10,
                                 MismatchSpec("none"), rng_for(22))
        assert np.allclose(theoretical_covariance(truth), 2.5 * np.eye(5))

    def test_single_interferer_rank_one(self):
        geom = ArrayGeometry.ula(6)
        truth = realize_scenario(geom, 0.0, 0.0, [25.0], [7.0], 0.0, 10,
                                 MismatchSpec("none"), rng_for(23))
        r = theoretical_covariance(truth)
        eigs = np.linalg.eigvalsh(r)
        assert eigs[-1] == pytest.approx(7.0, rel=1e-12)
        assert np.max(np.abs(eigs[:-1])) < 1e-12

    def test_matches_large_k_sample(self):
        truth = default_truth(rng_for(24), snr_db=0.0, snapshots=1)
        # accumulate the SCM over chunks; equivalent to one 10^6-snapshot set
        total = np.zeros((12, 12), dtype=complex)
        chunks = 20
        per = 50_000
        for i in range(chunks):
            chunk_truth = default_truth(rng_for(24), snr_db=0.0, snapshots=per)
            data = generate_snapshots(chunk_truth, rng_for(24, i))
            total += sample_covariance(data) * per
        scm = total / (chunks * per)
        theory = theoretical_covariance(default_truth(rng_for(24), snr_db=0.0))
        assert np.linalg.norm(scm - theory) / np.linalg.norm(theory) < 0.01

    def test_ipnc_definitional_identity(self):
        truth = default_truth(rng_for(25), mismatch="look_direction")
        sv = truth.soi_sv
        diff = theoretical_covariance(truth) - theoretical_ipnc(truth)
        assert np.allclose(diff, truth.soi_power * np.outer(sv, sv.conj()), atol=1e-12)

    def test_ipnc_noise_floor_eigenvalues(self):
        truth = default_truth(rng_for(26))
        eigs = np.linalg.eigvalsh(theoretical_ipnc(truth))
        assert np.max(np.abs(eigs[: 12 - 2] - 1.0)) < 1e-10

    def test_hermitian_outputs(self):
        truth = default_truth(rng_for(27), mismatch="random_sv")
        for m in (theoretical_covariance(truth), theoretical_ipnc(truth)):
            assert np.max(np.abs(m - m.conj().T)) < 1e-12
            assert np.min(np.linalg.eigvalsh(m)) > -1e-10 * np.trace(m).real


class TestPearsonCorrelation:
    def test_self_correlation_diagonal_exactly_one(self):
        rng = rng_for(28)
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        corr = pearson_correlation(a, a)
        assert np.all(np.diag(corr) == 1.0)

    def test_affine_invariance_real(self):
        # the correlation is defined over real matrices; a per-column affine
        # map leaves corresponding-column correlations at exactly 1
        rng = rng_for(29)
        a = rng.standard_normal((8, 5))
        b = 2.0 * a + np.ones((8, 1)) * np.arange(1, 6)
        corr = pearson_correlation(a, b)
        assert np.allclose(np.diag(corr), 1.0, atol=1e-12)

    def test_affine_invariance_complex_balanced_offset(self):
        # complex columns stack (re, im); offsets shifting both parts equally
        # cancel in the centering
        rng = rng_for(29, 1)
        a = rng.standard_normal((8, 5)) + 1j * rng.standard_normal((8, 5))
        b = 2.0 * a + (1.0 + 1.0j) * np.ones((8, 1)) * np.arange(1, 6)
        corr = pearson_correlation(a, b)
        assert np.allclose(np.diag(corr), 1.0, atol=1e-12)

    def test_entries_bounded(self):
        rng = rng_for(30)
        a = rng.standard_normal((10, 4)) + 1j * rng.standard_normal((10, 4))
        b = rng.standard_normal((10, 4)) + 1j * rng.standard_normal((10, 4))
        corr = pearson_correlation(a, b)
        assert np.all(corr <= 1.0) and np.all(corr >= -1.0)

    def test_swap_transpose_symmetry(self):
        rng = rng_for(31)
        a = rng.standard_normal((9, 3)) + 1j * rng.standard_normal((9, 3))
        b = rng.standard_normal((9, 3)) + 1j * rng.standard_normal((9, 3))
        assert np.allclose(pearson_correlation(a, b),
                           pearson_correlation(b, a).T, atol=1e-13)

    def test_zero_variance_column_rejected(self):
        a = np.ones((4, 2))
        with pytest.raises(UndefinedCorrelationError):
            pearson_correlation(a, a)
        with pytest.raises(UndefinedCorrelationError):
            pearson_correlation((1 + 1j) * np.ones((4, 2)), (1 + 1j) * np.ones((4, 2)))


def test_matrix_csv_roundtrip(tmp_path):
    rng = rng_for(32)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    path = tmp_path / "m.csv"
    save_matrix_csv(path, m)
    assert np.array_equal(load_matrix_csv(path), m)
