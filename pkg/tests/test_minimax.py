import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from trafoens.minimax import (
    integrated_quantile,
    regret_profile,
    score_entropy_and_divergence,
    verify_minimax_binary,
    verify_minimax_rps,
)
from trafoens.pooling import pool_linear, pool_transformation

from conftest import random_cdfs, random_weights


def _rps_oracle(F, y):
    K = len(F)
    return sum((F[k] - (1.0 if y <= k else 0.0)) ** 2 for k in range(K - 1)) / (K - 1)


def test_regret_trivial_member():
    F = np.array([[0.3, 0.6, 1.0]])
    prof = regret_profile(F[0], F, [1.0], "nll")
    np.testing.assert_array_equal(prof.regrets, 0.0)
    assert prof.max_regret == 0.0


def test_regret_equalizer_symmetric():
    members = np.array([[0.8, 1.0], [0.2, 1.0]])
    pooled = pool_transformation(members, [0.5, 0.5])
    assert pooled[0] == pytest.approx(0.5)
    prof = regret_profile(pooled, members, [0.5, 0.5], "nll")
    want = -math.log(0.5) - (-math.log(0.2) - math.log(0.8)) / 2
    np.testing.assert_allclose(prof.regrets, [want, want], atol=1e-12)


def test_regret_rps_against_oracle():
    rng = np.random.default_rng(0)
    F = random_cdfs(rng, 3, 1, 3)[:, 0]
    w = random_weights(rng, 3)
    pooled = pool_linear(F, w)
    prof = regret_profile(pooled, F, w, "rps")
    for y in range(3):
        want = _rps_oracle(pooled, y) - sum(w[m] * _rps_oracle(F[m], y) for m in range(3))
        assert prof.regrets[y] == pytest.approx(want, abs=1e-14)
    assert prof.max_regret == pytest.approx(max(prof.regrets))


def test_regret_undefined_cells():
    members = np.array([[1.0, 1.0], [0.5, 1.0]])
    pooled = np.array([1.0, 1.0])
    prof = regret_profile(pooled, members, [0.5, 0.5], "nll")
    assert prof.undefined.tolist() == [False, True]
    assert np.isnan(prof.regrets[1]) and prof.argmax == 0


def test_integrated_quantile():
    assert integrated_quantile("logistic", 0.5) == pytest.approx(math.log(0.5), abs=1e-15)
    assert integrated_quantile("logistic", 1.0) == 0.0
    assert integrated_quantile("logistic", 0.0) == 0.0
    # midpoint Riemann sum with 1e6 cells
    u = (np.arange(10**6) + 0.5) / 10**6 * 0.5
    oracle = float(np.sum(special.ndtri(u)) * 0.5 / 10**6)
    assert integrated_quantile("normal", 0.5) == pytest.approx(oracle, abs=1e-6)
    assert integrated_quantile("normal", 0.5) == pytest.approx(-1 / math.sqrt(2 * math.pi),
                                                              abs=1e-9)
    # the normal and MEV quantile functions integrate to the mean over (0, 1)
    assert integrated_quantile("normal", 1.0) == pytest.approx(0.0, abs=1e-9)
    assert integrated_quantile("mev", 1.0) == pytest.approx(-np.euler_gamma, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-9, 1 - 1e-9))
def test_logistic_integrated_quantile_is_negative_entropy(p):
    ent = -(p * math.log(p) + (1 - p) * math.log1p(-p))
    assert integrated_quantile("logistic", p) + ent == pytest.approx(0.0, abs=1e-12)


def test_binary_examples():
    res = verify_minimax_binary([0.3], [1.0])
    assert abs(res.scan_argmin - 0.3) <= 1e-3 and res.passed
    res = verify_minimax_binary([0.2, 0.8], [0.5, 0.5])
    assert abs(res.scan_argmin - 0.5) <= 1e-3 and res.passed
    res = verify_minimax_binary([0.2, 0.4], [0.5, 0.5])
    assert abs(res.scan_argmin - 0.289898) <= 1e-3 and res.passed
    assert res.pool_value == pytest.approx(0.2898979485566356, abs=1e-12)


def test_rps_examples():
    F = np.array([[0.3, 0.6, 1.0], [0.3, 0.6, 1.0]])
    res = verify_minimax_rps(F, [0.5, 0.5])
    assert res.passed and res.pool_max_regret == pytest.approx(0.0, abs=1e-15)
    F = np.array([[0.2, 0.7, 1.0], [0.5, 0.6, 1.0]])
    res = verify_minimax_rps(F, [1.0, 0.0])
    assert res.passed and res.pool_max_regret == 0.0
    np.testing.assert_array_equal(res.pool_cdf, F[0])


def test_rps_identical_members_strict():
    F = np.array([[0.3, 0.6, 1.0], [0.3, 0.6, 1.0]])
    for a, b in [(0.2, 0.6), (0.3, 0.7), (0.0, 1.0)]:
        prof = regret_profile(np.array([a, b, 1.0]), F, [0.5, 0.5], "rps")
        assert prof.max_regret > 0


def test_entropy_divergence_examples():
    assert score_entropy_and_divergence("brier", 0.5, 0.5) == (0.25, 0.0)
    ent, div = score_entropy_and_divergence("nll", 0.5, 0.5)
    assert ent == pytest.approx(math.log(2), abs=1e-15) and div == 0.0
    _, div = score_entropy_and_divergence("rps", np.array([0.2, 0.7, 1]), np.array([0.4, 0.7, 1]))
    assert div == pytest.approx(0.02, abs=1e-15)
    _, div = score_entropy_and_divergence("nll", np.array([0.5, 1.0]), np.array([0.0, 1.0]))
    assert div == math.inf


def _expected(score, p, q):
    # expected score of forecast q under truth p for a binary outcome
    if score == "brier":
        return p * (1 - q) ** 2 + (1 - p) * q ** 2
    return -(p * math.log(q) + (1 - p) * math.log1p(-q))


@settings(max_examples=500, deadline=None)
@given(st.floats(0.001, 0.999), st.floats(0.001, 0.999), st.sampled_from(["brier", "nll"]))
def test_expected_score_decomposition(p, q, score):
    ent, div = score_entropy_and_divergence(score, p, q)
    assert div >= 0
    assert _expected(score, p, q) - _expected(score, p, p) == pytest.approx(div, abs=1e-10)
    assert _expected(score, p, p) == pytest.approx(ent, abs=1e-12)


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["nll", "rps"]))
def test_divergence_nonnegative(seed, score):
    rng = np.random.default_rng(seed)
    F, G = random_cdfs(rng, 2, 1, 4)[:, 0]
    assert score_entropy_and_divergence(score, F, G)[1] >= 0
    assert score_entropy_and_divergence(score, F, F)[1] == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_binary_regret_equalization(p1, p2):
    if abs(p1 - p2) < 1e-3:
        return
    members = np.array([[1 - p1, 1.0], [1 - p2, 1.0]])
    pooled = pool_transformation(members, [0.5, 0.5])
    r = regret_profile(pooled, members, [0.5, 0.5], "nll").regrets
    assert r[0] == pytest.approx(r[1], abs=1e-9)
