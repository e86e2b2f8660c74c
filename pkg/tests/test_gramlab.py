import math

import numpy as np
import pytest

from rankspectra.data import SampleMatrix, sample_matrix
from rankspectra.errors import (
    DomainError,
    MarginError,
    MemoryGuardError,
    ValidationError,
)
from rankspectra.gramlab import (
    SINGLETON_PATTERNS,
    TruncationConfig,
    build_feature_matrix,
    cross_moment_mc,
    feature_bound,
    gram_identity_residual,
    has_singleton_index,
    leading_matrix,
    resolvent_quadratic_gap,
    s_minus_identity_frobenius,
    truncated_matrix,
)
from rankspectra.limitlaw import g_closed

CFG10 = TruncationConfig(10)


def test_truncation_config_validation():
    with pytest.raises(ValidationError):
        TruncationConfig(0)
    with pytest.raises(ValidationError):
        TruncationConfig(3, "kendall")
    cfg = TruncationConfig(3, "bkr-r")
    assert cfg.order == 6 and cfg.h2_factor == 2
    assert cfg.sigma_T == pytest.approx(math.sqrt(2 * sum(3 / math.pi**4 / r**4 for r in (1, 2, 3))))


def test_leading_matrix_single_pair_formula():
    m = sample_matrix(2, 2, "uniform01", 4)
    lm = leading_matrix(m, "hoeffding-d")
    x = m.values
    expected = (5 * 4 / (2 * 1)) * g_closed(x[0, 0], x[1, 0]) * g_closed(x[0, 1], x[1, 1])
    assert lm.entries[0, 1] == pytest.approx(expected, rel=1e-14)
    assert lm.entries[0, 0] == 1.0


def test_leading_matrix_h2_scaling():
    m = sample_matrix(6, 2, "uniform01", 4)
    d = leading_matrix(m, "hoeffding-d").entries[0, 1]
    r = leading_matrix(m, "bkr-r").entries[0, 1]
    t = leading_matrix(m, "bdy-taustar").entries[0, 1]
    # off-diagonal scale: m(m-1) * h2_factor relative to the D system
    assert r / d == pytest.approx((30 * 2) / 20, rel=1e-12)
    assert t / d == pytest.approx((12 * 3) / 20, rel=1e-12)


def test_leading_matrix_equals_high_truncation():
    m = sample_matrix(10, 3, "uniform01", 9)
    a = leading_matrix(m, "hoeffding-d").entries
    b = truncated_matrix(m, TruncationConfig(5000)).entries
    assert np.abs(a - b).max() <= 1e-6


def test_leading_matrix_mean_zero_monte_carlo():
    vals = np.empty(500)
    for t in range(500):
        m = sample_matrix(40, 2, "uniform01", 1000 + t)
        vals[t] = leading_matrix(m, "hoeffding-d").entries[0, 1]
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean()) <= 4 * se


def test_leading_matrix_margin_error():
    m = sample_matrix(5, 2, "uniform01", 1)
    doctored = SampleMatrix(n=5, p=2, values=m.values + 3.0, margin="uniform01", seed=1)
    with pytest.raises(MarginError):
        leading_matrix(doctored, "hoeffding-d")


def test_leading_matrix_rank_maps_other_margins():
    m = sample_matrix(12, 3, "standard-normal", 6)
    lm = leading_matrix(m, "hoeffding-d")
    assert np.all(np.diag(lm.entries) == 1.0)
    # rank map makes the result invariant to the underlying margin scale
    doubled = SampleMatrix(n=12, p=3, values=2 * m.values, margin="standard-normal", seed=6)
    assert np.array_equal(leading_matrix(doubled, "hoeffding-d").entries, lm.entries)


def test_truncated_matrix_single_term():
    m = sample_matrix(5, 2, "uniform01", 13)
    cfg = TruncationConfig(1)
    tm = truncated_matrix(m, cfg)
    lam1 = float(cfg.lambdas()[0])
    psi1 = lambda v: math.sqrt(2) * np.cos(math.pi * v)
    acc = 0.0
    for i1 in range(5):
        for i2 in range(i1 + 1, 5):
            acc += (lam1 ** 2) * psi1(m.values[i1, 0]) * psi1(m.values[i2, 0]) * psi1(
                m.values[i1, 1]
            ) * psi1(m.values[i2, 1])
    expected = 5 * 4 / (5 * 4.0) * acc
    assert tm.entries[0, 1] == pytest.approx(expected, rel=1e-12)


def test_truncated_matrix_stabilizes_dyadically():
    m = sample_matrix(15, 4, "uniform01", 3)
    gaps = []
    for T in (2, 4, 8, 16, 32):
        a = truncated_matrix(m, TruncationConfig(T)).entries
        b = truncated_matrix(m, TruncationConfig(2 * T)).entries
        gaps.append(np.abs(a - b).max())
    assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_feature_matrix_shape_and_pairs():
    m = sample_matrix(3, 2, "uniform01", 5)
    fm = build_feature_matrix(m, CFG10)
    assert fm.M == 3 and fm.p == 2
    assert fm.pairs.tolist() == [[0, 1], [0, 2], [1, 2]]


def test_feature_matrix_column_locality():
    a = sample_matrix(8, 2, "uniform01", 21)
    b = sample_matrix(8, 5, "uniform01", 21)
    fa = build_feature_matrix(a, CFG10)
    fb = build_feature_matrix(b, CFG10)
    assert np.array_equal(fb.values[:, :2], fa.values)


def test_feature_entries_bounded():
    bound = feature_bound(CFG10)
    for seed in range(5):
        m = sample_matrix(20, 4, "uniform01", seed)
        fm = build_feature_matrix(m, CFG10)
        assert np.abs(fm.values).max() <= bound


@pytest.mark.parametrize("n,p,T", [(10, 5, 3), (20, 10, 10), (30, 20, 50)])
def test_gram_identity_sweep(n, p, T):
    m = sample_matrix(n, p, "uniform01", 42)
    assert gram_identity_residual(m, TruncationConfig(T)) <= 1e-10


def test_gram_identity_single_term():
    m = sample_matrix(8, 4, "uniform01", 2)
    assert gram_identity_residual(m, TruncationConfig(1)) <= 1e-12


def test_gram_identity_broken_scaling_control():
    # doubling the normalized features without touching sigma_T breaks the
    # identity: the Gram path scales by 4
    m = sample_matrix(8, 4, "uniform01", 2)
    cfg = TruncationConfig(3)
    n = m.n
    cm = truncated_matrix(m, cfg)
    path_a = math.sqrt(n) * (cm.entries - np.eye(cm.p))
    fm = build_feature_matrix(m, cfg)
    doubled = 2.0 * fm.values
    M, p = doubled.shape
    s = doubled.T @ doubled / M
    gram = math.sqrt(M / p) * (s - np.diag(np.diag(s)))
    coef = cfg.order * (cfg.order - 1) * math.sqrt(p * M) * cfg.sigma_T**2 / (math.sqrt(n) * (n - 1))
    assert np.abs(path_a - coef * gram).max() > 1e-3


def test_cross_moment_validation():
    with pytest.raises(IndexError):
        cross_moment_mc([(2, 1)], CFG10, 100, 0)
    with pytest.raises(IndexError):
        cross_moment_mc([(0, 1)], CFG10, 100, 0)
    with pytest.raises(IndexError):
        cross_moment_mc([], CFG10, 100, 0)
    with pytest.raises(ValidationError):
        cross_moment_mc([(1, 2)], CFG10, 1, 0)


def test_cross_moment_unit_square():
    est, se = cross_moment_mc([(1, 2), (1, 2)], TruncationConfig(3), 40000, 7)
    assert abs(est - 1.0) <= 4 * se


def test_cross_moment_disjoint_pairs_vanish():
    est, se = cross_moment_mc([(1, 2), (3, 4)], TruncationConfig(3), 40000, 7)
    assert abs(est) <= 4 * se


def test_cross_moment_triple_target():
    cfg = TruncationConfig(3)
    lam = cfg.lambdas()
    target = float((lam**3).sum()) / cfg.sigma_T**3
    est, se = cross_moment_mc([(1, 2), (2, 3), (1, 3)], cfg, 40000, 7)
    assert abs(est - target) <= 4 * se


def test_singleton_catalog():
    assert len(SINGLETON_PATTERNS) == 20
    assert all(has_singleton_index(pat) for pat in SINGLETON_PATTERNS)
    assert not has_singleton_index([(1, 2), (1, 2)])


def test_frobenius_p1_decreasing_in_n():
    vals = [s_minus_identity_frobenius(n, 1, CFG10, 60, 7)[0] for n in (20, 40, 80)]
    assert vals[0] > vals[1] > vals[2]


def test_frobenius_diag_plus_offdiag_decomposition():
    # E||S - I||_F^2 = p * diag-part + p(p-1)/M off-diagonal part
    n = 40
    M = n * (n - 1) // 2
    e1, s1 = s_minus_identity_frobenius(n, 1, CFG10, 60, 7)
    for p in (20, 40, 80):
        est, se = s_minus_identity_frobenius(n, p, CFG10, 60, 7)
        pred = p * e1 + p * (p - 1) / M
        combined = math.hypot(se, p * s1)
        assert abs(est - pred) <= 4 * combined


def test_frobenius_validation():
    with pytest.raises(ValidationError):
        s_minus_identity_frobenius(20, 20, CFG10, 10, 0)


def test_resolvent_gap_z_growth_shrinks():
    a, _ = resolvent_quadratic_gap(30, 30, CFG10, 1j, 300, 5)
    b, _ = resolvent_quadratic_gap(30, 30, CFG10, 2j, 300, 5)
    assert b <= a


def test_resolvent_control_trend():
    vals = [resolvent_quadratic_gap(n, n, CFG10, 1j, 300, 5, control=True)[0] for n in (20, 30, 40)]
    assert vals[0] > vals[1] > vals[2]


def test_resolvent_guards():
    with pytest.raises(MemoryGuardError):
        resolvent_quadratic_gap(120, 20, CFG10, 1j, 10, 0)
    with pytest.raises(DomainError):
        resolvent_quadratic_gap(20, 20, CFG10, 1.0 + 0j, 10, 0)
    with pytest.raises(ValidationError):
        resolvent_quadratic_gap(20, 20, CFG10, 1j, 1, 0)
