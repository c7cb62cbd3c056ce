"""Tests for frame metrics, oracle MSE, RIC, StRIP, and RSNR."""

import itertools
import math

import numpy as np
import pytest

from framesense.design import design_gaussian, gen_parseval_target
from framesense.metrics import (
    bpdn_error_constants,
    coherence_report,
    empirical_strip,
    exact_ric,
    gram,
    mutual_coherence,
    offdiag_histogram,
    oracle_mse_expected,
    oracle_mse_support,
    rsnr,
    rsnr_db,
    sensed_energy,
    sensed_snr,
    strip_bound,
)
from framesense.model import RandomStream, gen_gaussian_dictionary
from framesense.recovery import oracle_ls


def worked_three_column_matrix():
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    return np.column_stack([e1, e2, (e1 + e2) / math.sqrt(2)])


def icosahedral_etf():
    # six equiangular unit vectors in R^3 from icosahedron vertex pairs
    phi = (1 + math.sqrt(5)) / 2
    raw = np.array(
        [
            [0, 1, phi],
            [0, -1, phi],
            [1, phi, 0],
            [-1, phi, 0],
            [phi, 0, 1],
            [phi, 0, -1],
        ],
        dtype=float,
    ).T
    return raw / np.linalg.norm(raw, axis=0)


class TestGram:
    def test_identity(self):
        assert np.array_equal(gram(np.eye(3)), np.eye(3))

    def test_direct_product(self):
        a = np.array([[1.0, 1.0], [0.0, 0.0]])
        assert np.array_equal(gram(a), np.ones((2, 2)))

    def test_positive_semidefinite(self):
        a = RandomStream(0).generator().standard_normal((5, 9))
        w = np.linalg.eigvalsh(gram(a))
        assert w.min() >= -1e-10


class TestMutualCoherence:
    def test_orthonormal_columns(self):
        assert mutual_coherence(np.eye(4)) == 0.0

    def test_worked_example(self):
        assert abs(mutual_coherence(worked_three_column_matrix()) - 1 / math.sqrt(2)) < 1e-12

    def test_equiangular_tight_frame(self):
        a = icosahedral_etf()
        want = math.sqrt((6 - 3) / (3 * 5))
        assert abs(mutual_coherence(a) - want) < 1e-12

    def test_equals_max_offdiag_gram(self):
        a = RandomStream(1).generator().standard_normal((4, 7))
        q = np.abs(gram(a))
        np.fill_diagonal(q, 0.0)
        assert mutual_coherence(a) == q.max()

    def test_normalized_mode_divides_by_column_norms(self):
        a = worked_three_column_matrix() * 3.0
        assert abs(mutual_coherence(a, normalize_columns=True) - 1 / math.sqrt(2)) < 1e-12

    def test_normalized_mode_rejects_zero_column(self):
        a = np.array([[1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            mutual_coherence(a, normalize_columns=True)

    def test_requires_two_columns(self):
        with pytest.raises(ValueError):
            mutual_coherence(np.ones((3, 1)))


class TestOffdiagHistogram:
    def test_identity_all_in_first_bin(self):
        hist = offdiag_histogram(np.eye(3), 4)
        assert hist.counts[0] == 3
        assert hist.counts[1:].sum() == 0

    def test_three_values_three_bins(self):
        q = np.eye(3)
        q[0, 1] = q[1, 0] = 0.1
        q[0, 2] = q[2, 0] = 0.5
        q[1, 2] = q[2, 1] = 0.9
        hist = offdiag_histogram(q, 3)
        assert list(hist.counts) == [1, 1, 1]

    def test_counts_sum_is_pair_count(self):
        a = RandomStream(2).generator().standard_normal((6, 11))
        hist = offdiag_histogram(gram(a), 7)
        assert hist.counts.sum() == 11 * 10 // 2

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            offdiag_histogram(np.ones((2, 3)), 2)

    def test_rejects_asymmetric(self):
        q = np.eye(3)
        q[0, 1] = 0.5
        with pytest.raises(ValueError):
            offdiag_histogram(q, 2)


class TestCoherenceReport:
    def test_fields_consistent(self):
        rng = RandomStream(3)
        psi = gen_gaussian_dictionary(8, 10, rng.child("d"))
        phi = design_gaussian(5, 8, rng.child("p"))
        report = coherence_report(phi @ psi, bins=6)
        a = phi @ psi
        assert report.mu == mutual_coherence(a)
        assert abs(report.gram_trace - np.trace(gram(a))) < 1e-12
        assert abs(report.sensed_energy - np.sum(a * a)) < 1e-12
        assert report.histogram.counts.sum() == 10 * 9 // 2


class TestOracleMseSupport:
    def test_orthonormal_support_columns(self):
        a = np.eye(5)[:, :4]
        assert abs(oracle_mse_support(a, (0, 1, 2), 1e-4) - 3e-4) < 1e-18

    def test_scaled_orthonormal_support(self):
        c = 3.0
        a = c * np.eye(4)
        assert abs(oracle_mse_support(a, (1, 3), 1.0) - 2 / c**2) < 1e-12

    def test_matches_eigenvalue_path(self):
        a = RandomStream(4).generator().standard_normal((6, 9))
        support = (1, 4, 7)
        sub = a[:, support]
        w = np.linalg.eigvalsh(sub.T @ sub)
        want = 1e-2 * np.sum(1.0 / w)
        assert abs(oracle_mse_support(a, support, 1e-2) - want) < 1e-9

    def test_singular_support_names_offender(self):
        a = np.zeros((4, 5))
        a[:, 0] = [1.0, 0, 0, 0]
        a[:, 1] = [1.0, 0, 0, 0]
        with pytest.raises(np.linalg.LinAlgError, match=r"\(0, 1\)"):
            oracle_mse_support(a, (0, 1), 1.0)

    def test_matches_monte_carlo(self):
        rng = RandomStream(5)
        a = rng.child("a").generator().standard_normal((8, 12))
        support = (0, 3, 9)
        sigma2 = 1e-4
        want = oracle_mse_support(a, support, sigma2)
        x = np.zeros(12)
        x[list(support)] = (1.0, -1.0, 1.0)
        y0 = a @ x
        gen = rng.child("noise").generator()
        trials = 100000
        noise = gen.standard_normal((trials, 8)) * math.sqrt(sigma2)
        sub = a[:, support]
        # batched least squares via the normal equations of the fixed support
        ginv = np.linalg.inv(sub.T @ sub)
        coef = (y0 + noise) @ sub @ ginv
        err = coef - x[list(support)]
        got = float(np.mean(np.sum(err**2, axis=1)))
        assert abs(got - want) < 0.02 * want


class TestOracleMseExpected:
    def test_identity_exact(self):
        out = oracle_mse_expected(np.eye(6), 3, 1e-2)
        assert abs(out.value - 3e-2) < 1e-15
        assert out.stderr == 0.0
        assert out.singular_trials == 0

    def test_exact_mean_over_all_supports(self):
        a = RandomStream(6).generator().standard_normal((5, 7))
        s = 2
        total = 0.0
        supports = list(itertools.combinations(range(7), s))
        for support in supports:
            total += oracle_mse_support(a, support, 1.0)
        want = total / len(supports)
        out = oracle_mse_expected(a, s, 1.0)
        assert abs(out.value - want) < 1e-9

    def test_sampled_agrees_with_exact(self):
        a = RandomStream(7).generator().standard_normal((8, 12))
        exact = oracle_mse_expected(a, 3, 1.0)
        sampled = oracle_mse_expected(a, 3, 1.0, trials=10000, rng=RandomStream(8))
        assert abs(sampled.value - exact.value) <= 3 * sampled.stderr

    def test_lower_bound_at_trace_m(self):
        m, nhat, s = 5, 8, 2
        gen = RandomStream(9).generator()
        for _ in range(50):
            a = gen.standard_normal((m, nhat))
            a *= math.sqrt(m) / np.linalg.norm(a)
            out = oracle_mse_expected(a, s, 1.0)
            assert out.value >= s * nhat / m - 1e-9

    def test_enumeration_guard(self):
        a = np.zeros((3, 60))
        with pytest.raises(ValueError):
            oracle_mse_expected(a, 10, 1.0)

    def test_sampled_counts_singular_supports(self):
        a = np.eye(4).copy()
        a[:, 3] = a[:, 2]
        out = oracle_mse_expected(a, 2, 1.0, trials=200, rng=RandomStream(10))
        assert out.singular_trials > 0
        assert out.singular_trials <= 200


class TestSensedEnergyAndSnr:
    def test_identity_dictionary(self):
        phi = design_gaussian(3, 5, RandomStream(11))
        assert abs(sensed_energy(phi, np.eye(5)) - 5.0) < 1e-9

    def test_zero_sensing(self):
        assert sensed_energy(np.zeros((2, 3)), np.eye(3)) == 0.0

    def test_snr_unit_energy_per_measurement(self):
        phi = np.eye(4)
        psi = np.eye(4)
        assert abs(sensed_snr(phi, psi, 1e-4) - 1e4) < 1e-6

    def test_snr_linearity(self):
        phi = math.sqrt(2.0) * np.eye(4)
        assert abs(sensed_snr(phi, np.eye(4), 1.0) - 2.0) < 1e-12

    def test_snr_rejects_zero_noise(self):
        with pytest.raises(ValueError):
            sensed_snr(np.eye(2), np.eye(2), 0.0)


class TestExactRic:
    def test_identity(self):
        report = exact_ric(np.eye(2), 1)
        assert report.delta == 0.0

    def test_worked_example(self):
        report = exact_ric(worked_three_column_matrix(), 2)
        assert abs(report.delta - 1 / math.sqrt(2)) < 1e-12
        assert report.support == (0, 2)

    def test_monotone_in_order(self):
        a = RandomStream(12).generator().standard_normal((4, 6))
        a /= np.linalg.norm(a, axis=0)
        deltas = [exact_ric(a, s).delta for s in (1, 2, 3)]
        assert deltas[0] <= deltas[1] <= deltas[2]

    def test_scale_guard(self):
        with pytest.raises(ValueError):
            exact_ric(np.ones((2, 300)), 5)


class TestBpdnErrorConstants:
    def test_zero_delta(self):
        c1, c2 = bpdn_error_constants(0.0)
        assert (c1, c2) == (2.0, 4.0)

    def test_formula_point(self):
        c1, c2 = bpdn_error_constants(0.2)
        assert abs(c1 - (2 + (2 * math.sqrt(2) - 2) * 0.2) / (1 - (math.sqrt(2) + 1) * 0.2)) < 1e-12
        assert abs(c1 - 4.1877) < 5e-4
        assert abs(c2 - 8.473) < 5e-3

    def test_rejects_vacuous_region(self):
        with pytest.raises(ValueError):
            bpdn_error_constants(0.45)


class TestStripBound:
    def test_reference_point(self):
        out = strip_bound(0.03, 4, 400, 0.995)
        assert out.valid and not out.vacuous
        assert abs(out.lower_bound - 0.50) < 0.01

    def test_order_two_is_vacuous(self):
        out = strip_bound(0.1, 2, 100, 0.9)
        assert out.vacuous
        assert out.lower_bound == 0.0

    def test_empty_delta_range_invalid(self):
        out = strip_bound(0.5, 4, 10, 0.9)
        assert not out.valid

    def test_monotone_in_delta(self):
        mu, s, m = 0.03, 4, 400
        deltas = (0.995, 0.997, 0.999)
        bounds = [strip_bound(mu, s, m, d) for d in deltas]
        assert all(b.valid for b in bounds)
        lows = [b.lower_bound for b in bounds]
        assert lows[0] <= lows[1] <= lows[2]


class TestEmpiricalStrip:
    def test_orthonormal_always_succeeds(self):
        out = empirical_strip(np.eye(6), 2, 0.0, 50, RandomStream(13))
        assert out.probability == 1.0

    def test_delta_at_exact_ric_succeeds(self):
        a = RandomStream(14).generator().standard_normal((4, 6))
        a /= np.linalg.norm(a, axis=0)
        delta = exact_ric(a, 2).delta
        out = empirical_strip(a, 2, delta + 1e-12, 300, RandomStream(15))
        assert out.probability == 1.0

    def test_dominates_bound_on_etf(self):
        a = icosahedral_etf()
        mu = mutual_coherence(a)
        bound = strip_bound(mu, 2, 3, 0.99)
        est = empirical_strip(a, 2, 0.99, 4000, RandomStream(16))
        # order-2 bound is vacuous, so the bar is trivially cleared; the
        # estimate itself must still be a high success probability
        assert est.probability >= bound.lower_bound - 3 * est.stderr
        assert est.probability > 0.9


class TestRsnr:
    def test_worked_ratio(self):
        assert abs(rsnr(np.array([1.0, 0.0]), np.array([0.9, 0.0])) - 9.0) < 1e-12

    def test_zero_reconstruction(self):
        assert rsnr(np.array([1.0, 2.0]), np.zeros(2)) == 0.0

    def test_perfect_reconstruction_is_infinite(self):
        f = np.array([1.0, 2.0])
        assert rsnr(f, f.copy()) == math.inf

    def test_db_conversion(self):
        assert abs(rsnr_db(np.array([1.0, 0.0]), np.array([0.9, 0.0])) - 20 * math.log10(9.0)) < 1e-12
        assert rsnr_db(np.array([1.0]), np.array([1.0])) == math.inf
