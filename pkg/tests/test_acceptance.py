"""End-to-end checks of the package's headline guarantees.

Each criterion is one test with its numeric tolerance stated inline and a
wall-clock budget asserted at the end, so the suite doubles as a regression
and performance guard. Everything is seeded; reruns are exact repeats.
"""

import itertools
import math
import time

import numpy as np
from scipy.linalg import hadamard, svdvals

from framesense.bench import (
    RATIO_LABEL,
    config_from_dict,
    run_dimension_ratio,
    run_energy_sweep,
    run_experiment,
)
from framesense.design import (
    design_gaussian,
    design_tf2,
    design_tf2_raw,
    gen_parseval_target,
    tightness_objective,
)
from framesense.metrics import (
    empirical_strip,
    exact_ric,
    mutual_coherence,
    oracle_mse_expected,
    oracle_mse_support,
    strip_bound,
)
from framesense.model import RandomStream, gen_gaussian_dictionary
from framesense.recovery import BpdnParams, bpdn, omp, oracle_ls


def paired_ratio(num, den):
    """Mean ratio of paired samples with a delta-method standard error."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    mn, md = num.mean(), den.mean()
    cov = np.cov(num, den, ddof=1)
    var = (
        cov[0, 0] / md**2
        + mn**2 * cov[1, 1] / md**4
        - 2.0 * mn * cov[0, 1] / md**3
    ) / num.size
    return mn / md, math.sqrt(max(var, 0.0))


def averaged_trace_inverse(q, s):
    """Mean of trace(inv(q[J, J])) over every size-s support J."""
    nhat = q.shape[0]
    supports = list(itertools.combinations(range(nhat), s))
    total = 0.0
    for support in supports:
        total += float(np.trace(np.linalg.inv(q[np.ix_(support, support)])))
    return total / len(supports)


def test_criterion_01_mode_inversion_satisfies_frame_constraint():
    # pre-normalization design rows are exactly orthonormal under psi psi^T
    start = time.monotonic()
    root = RandomStream(101)
    for i in range(100):
        psi = gen_gaussian_dictionary(64, 80, root.child("dict", i))
        phi_hat = design_tf2_raw(psi, 40, root.child("design", i))
        defect = phi_hat @ psi @ psi.T @ phi_hat.T - np.eye(40)
        assert np.linalg.norm(defect) <= 1e-8
    assert time.monotonic() - start < 10.0


def test_criterion_02_tightness_minimum_attained_by_parseval_frames():
    start = time.monotonic()
    root = RandomStream(102)
    for i in range(100):
        target = gen_parseval_target(40, 80, root.child("target", i))
        assert abs(tightness_objective(target, 40, 80) - 20.0) <= 1e-8
    gen = root.child("random").generator()
    for _ in range(1000):
        a = gen.standard_normal((4, 8))
        a *= math.sqrt(4.0 / np.sum(a * a))
        assert tightness_objective(a, 4, 8) >= 2.0 - 1e-9
    assert time.monotonic() - start < 10.0


def test_criterion_03_isotropic_gram_minimizes_averaged_trace_inverse():
    start = time.monotonic()
    nhat, m, s = 10, 5, 3
    bound = s * nhat / m
    assert averaged_trace_inverse((m / nhat) * np.eye(nhat), s) == 6.0
    # the scaled identity is its own matrix square root up to sqrt(m/nhat),
    # so the package's support enumeration must land on the same optimum
    report = oracle_mse_expected(math.sqrt(m / nhat) * np.eye(nhat), s, 1.0)
    assert abs(report.value - bound) <= 1e-12
    gen = RandomStream(103).generator()
    for _ in range(1000):
        w = gen.standard_normal((nhat, nhat))
        q = w @ w.T
        q *= m / np.trace(q)
        assert averaged_trace_inverse(q, s) >= bound - 1e-9
    assert time.monotonic() - start < 30.0


def test_criterion_04_oracle_formula_matches_monte_carlo():
    start = time.monotonic()
    root = RandomStream(104)
    psi = gen_gaussian_dictionary(64, 80, root.child("dict"))
    phi = design_gaussian(40, 64, root.child("design"))
    a = phi @ psi
    support = (3, 17, 29, 44, 61, 77)
    sigma2 = 1e-4
    predicted = oracle_mse_support(a, support, sigma2)

    sub = a[:, support]
    values = root.child("signs").generator().integers(0, 2, size=6) * 2.0 - 1.0
    y0 = sub @ values
    noise = math.sqrt(sigma2) * root.child("noise").generator().standard_normal(
        (100_000, 40)
    )
    # batched normal-equations least squares; spot-checked below to be the
    # same estimate the solver returns, draw for draw
    ginv = np.linalg.solve(sub.T @ sub, sub.T)
    coef = (y0 + noise) @ ginv.T
    for row, y in zip(coef[:200], y0 + noise[:200]):
        res = oracle_ls(a, y, support)
        assert np.max(np.abs(res.estimate[list(support)] - row)) <= 1e-10
    empirical = float(np.mean(np.sum((coef - values) ** 2, axis=1)))
    assert abs(empirical - predicted) <= 0.02 * predicted
    assert time.monotonic() - start < 30.0


def test_criterion_05_designed_matrix_beats_gaussian_on_fixed_dictionary():
    start = time.monotonic()
    m, n, nhat, s, sigma2, trials = 40, 64, 80, 6, 1e-4, 500
    root = RandomStream(105)
    psi = gen_gaussian_dictionary(n, nhat, root.child("dict"))
    a_tf2 = design_tf2(psi, m, root.child("tf2")) @ psi
    a_gauss = design_gaussian(m, n, root.child("gaussian")) @ psi
    gen = root.child("trials").generator()
    oracle_tf2, oracle_gauss = [], []
    omp_tf2, omp_gauss = [], []
    for _ in range(trials):
        support = np.sort(gen.choice(nhat, size=s, replace=False))
        # oracle losses use the closed-form noise average given the support,
        # so only support randomness contributes to the ratio's stderr
        oracle_tf2.append(oracle_mse_support(a_tf2, support, sigma2))
        oracle_gauss.append(oracle_mse_support(a_gauss, support, sigma2))
        x = np.zeros(nhat)
        x[support] = gen.integers(0, 2, size=s) * 2.0 - 1.0
        noise = math.sqrt(sigma2) * gen.standard_normal(m)
        for a, losses in ((a_tf2, omp_tf2), (a_gauss, omp_gauss)):
            res = omp(a, a @ x + noise, max_support=s)
            losses.append(float(np.sum((res.estimate - x) ** 2)))
    ratio, stderr = paired_ratio(oracle_tf2, oracle_gauss)
    assert ratio + 3 * stderr < 0.95
    ratio, stderr = paired_ratio(omp_tf2, omp_gauss)
    assert ratio + 3 * stderr < 1.0
    assert time.monotonic() - start < 300.0


def test_criterion_06_oracle_ratio_approaches_one_with_dimension():
    start = time.monotonic()
    cfg = config_from_dict(
        {
            "experiment": "dimension_ratio",
            "designs": ["tf2", "gaussian"],
            "dictionary_kind": "canonical",
            "m": 60,
            "s": 5,
            "sigma2": 1e-4,
            "dimension_grid": [100, 300, 600],
            "estimators": ["oracle"],
            "trials": 300,
            "base_seed": 106,
        }
    )
    rows = [r for r in run_dimension_ratio(cfg).rows if r.design == RATIO_LABEL]
    by_n = {r.n: r for r in rows}
    assert sorted(by_n) == [100, 300, 600]
    assert 0.9 <= by_n[600].mse_mean <= 1.05
    gaps = [(abs(by_n[n].mse_mean - 1.0), by_n[n].mse_stderr) for n in sorted(by_n)]
    for (gap_small_n, se1), (gap_large_n, se2) in zip(gaps, gaps[1:]):
        assert gap_large_n <= gap_small_n + 3 * (se1 + se2)
    assert time.monotonic() - start < 600.0


def test_criterion_07_designed_matrix_collects_more_energy_when_overcomplete():
    start = time.monotonic()
    base = {
        "experiment": "energy_sweep",
        "designs": ["gaussian", "tf2"],
        "m": 60,
        "dimension_grid": [100, 300, 600],
        "base_seed": 107,
    }
    over = config_from_dict(base | {"dictionary_kind": "gaussian", "trials": 100})
    rows = run_energy_sweep(over).rows
    for n in (100, 300, 600):
        cell = {r.design: r for r in rows if r.n == n}
        low_tf2 = cell["tf2"].sensed_energy_mean - 3 * cell["tf2"].mse_stderr
        high_gauss = cell["gaussian"].sensed_energy_mean + 3 * cell["gaussian"].mse_stderr
        assert low_tf2 > high_gauss
    canon = config_from_dict(base | {"dictionary_kind": "canonical", "trials": 10})
    for row in run_energy_sweep(canon).rows:
        assert abs(row.sensed_energy_mean - row.n) <= 1e-9
    assert time.monotonic() - start < 300.0


def test_criterion_08_exact_recovery_in_the_low_coherence_regime():
    start = time.monotonic()
    n = 32
    a = np.hstack([np.eye(n), hadamard(n) / math.sqrt(n)])
    mu = mutual_coherence(a, normalize_columns=True)
    gen = RandomStream(108).generator()
    omp_hits = bpdn_hits = 0
    for _ in range(200):
        s = int(gen.integers(1, 4))
        assert mu < 1.0 / (2 * s - 1)
        support = np.sort(gen.choice(2 * n, size=s, replace=False))
        x = np.zeros(2 * n)
        x[support] = gen.integers(0, 2, size=s) * 2.0 - 1.0
        y = a @ x
        if omp(a, y, max_support=s).support == tuple(int(i) for i in support):
            omp_hits += 1
        res = bpdn(a, y, BpdnParams(epsilon=0.0))
        if np.max(np.abs(res.estimate - x)) <= 1e-5:
            bpdn_hits += 1
    assert omp_hits == 200
    assert bpdn_hits >= 198
    assert time.monotonic() - start < 120.0


def test_criterion_09_ric_matches_independent_enumeration():
    start = time.monotonic()
    gen = RandomStream(109).generator()
    for _ in range(50):
        s = int(gen.integers(1, 5))
        nhat = int(gen.integers(s + 1, 13))
        m = int(gen.integers(2, nhat + 1))
        a = gen.standard_normal((m, nhat))
        a /= np.linalg.norm(a, axis=0)
        expected = 0.0
        for support in itertools.combinations(range(nhat), s):
            # rank-deficient restrictions contribute eigenvalue 0
            lam = np.zeros(s)
            sv = svdvals(a[:, support])
            lam[: sv.size] = sv**2
            expected = max(expected, lam.max() - 1.0, 1.0 - lam.min())
        assert abs(exact_ric(a, s).delta - expected) <= 1e-10
    e1, e2 = np.eye(2)
    worked = exact_ric(np.column_stack([e1, e2, (e1 + e2) / math.sqrt(2)]), 2)
    assert abs(worked.delta - 1.0 / math.sqrt(2)) <= 1e-12
    assert worked.support == (0, 2)
    assert time.monotonic() - start < 60.0


def test_criterion_10_strip_bound_value_and_empirical_dominance():
    start = time.monotonic()
    bound = strip_bound(0.03, 4, 400, 0.995)
    assert bound.valid and not bound.vacuous
    assert abs(bound.lower_bound - 0.50) <= 0.01
    exponent = (0.3894 * 0.995 - 4 / 400) ** 2 / (36 * 0.03**2 * 4 * math.log(3.0))
    assert abs(bound.lower_bound - (1.0 - 2.0 ** (-exponent))) <= 1e-12

    # unit-norm tight frame of 401 vectors in dimension 400 via the
    # rank-400 eigenspace of the centering matrix; coherence 1/400
    nhat = 401
    centering = np.eye(nhat) - np.full((nhat, nhat), 1.0 / nhat)
    lam, vec = np.linalg.eigh(centering)
    assert lam[0] <= 1e-8 and lam[1] >= 0.9
    a = math.sqrt(nhat / (nhat - 1)) * vec[:, 1:].T
    assert np.max(np.abs(np.sum(a * a, axis=0) - 1.0)) <= 1e-9
    assert np.linalg.norm(a @ a.T - (nhat / (nhat - 1)) * np.eye(nhat - 1)) <= 1e-8
    assert mutual_coherence(a) <= 0.03
    est = empirical_strip(a, 4, 0.995, 10_000, RandomStream(110))
    assert est.probability >= bound.lower_bound - 3 * est.stderr
    assert time.monotonic() - start < 120.0


def test_criterion_11_bench_runs_are_byte_identical(tmp_path):
    start = time.monotonic()
    payload = {
        "experiment": "recovery_sweep",
        "designs": ["gaussian", "tf1(alpha=1)", "tf2"],
        "dictionary_kind": "gaussian",
        "m": 12,
        "n": 16,
        "nhat": 20,
        "sigma2": 1e-4,
        "sparsity_grid": [2, 3],
        "estimators": ["oracle", "omp", "bpdn"],
        "trials": 6,
        "base_seed": 111,
    }
    blobs = []
    for tag, workers in (("a", 1), ("b", 1), ("c", 4)):
        cfg = config_from_dict(payload | {"workers": workers})
        paths = run_experiment(cfg, tmp_path / tag)
        blobs.append(b"".join(p.read_bytes() for p in paths))
    assert blobs[0] == blobs[1] == blobs[2]

    hist = {
        "experiment": "histogram",
        "designs": ["gaussian", "tf2"],
        "dictionary_kind": "gaussian",
        "m": 8,
        "n": 12,
        "nhat": 14,
        "bins": 10,
        "base_seed": 112,
    }
    pair = []
    for tag in ("h1", "h2"):
        paths = run_experiment(config_from_dict(hist), tmp_path / tag)
        assert len(paths) == 2
        pair.append(b"".join(p.read_bytes() for p in paths))
    assert pair[0] == pair[1]
    assert time.monotonic() - start < 120.0
