import math

import numpy as np
import pytest

from trafoens.errors import InputError, OptimizationError
from trafoens.panel import MemberPanel, OrderedSampleSpace, Outcomes
from trafoens.pooling import pool
from trafoens.scoring import instance_scores
from trafoens.weights import TuneConfig, equal_weights, softmax_weights, tune_weights

from conftest import random_cdfs, random_panel


def _score(panel, w, kind, score):
    return float(np.mean(instance_scores(pool(panel.cdfs, w, kind), panel.outcomes, score)))


def _grid_best(panel, kind, score, points=1001):
    grid = np.linspace(0, 1, points)
    vals = [_score(panel, np.array([a, 1 - a]), kind, score) for a in grid]
    j = int(np.argmin(vals))
    return grid[j], vals[j]


def test_equal_weights():
    assert equal_weights(5).tolist() == [0.2] * 5
    assert equal_weights(1).tolist() == [1.0]
    for M in range(1, 50):
        assert math.fsum(equal_weights(M)) == 1.0
    with pytest.raises(InputError):
        equal_weights(0)


def test_softmax_first_logit_pinned():
    np.testing.assert_allclose(softmax_weights([0.0, 0.0]), np.full(3, 1 / 3))
    w = softmax_weights([800.0])
    assert w.sum() == pytest.approx(1.0) and np.all(np.isfinite(w))


def test_single_member():
    panel = random_panel(np.random.default_rng(0), M=1, n=30, K=4)
    res = tune_weights(panel, TuneConfig("nll", "linear"))
    assert res.weights.tolist() == [1.0]
    assert res.score == pytest.approx(_score(panel, [1.0], "linear", "nll"))


def test_identical_members():
    F = random_cdfs(np.random.default_rng(1), 1, 50, 4)[0]
    panel = MemberPanel(OrderedSampleSpace.of_size(4), ["a", "b"], np.stack([F, F]),
                        Outcomes.exact(np.random.default_rng(1).integers(0, 4, 50)))
    res = tune_weights(panel, TuneConfig("nll", "trafo:logistic"))
    assert res.weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert res.score == pytest.approx(_score(panel, [1.0, 0.0], "linear", "nll"), abs=1e-10)


def test_true_versus_noise_member():
    rng = np.random.default_rng(2)
    n, K = 2000, 4
    F_true = random_cdfs(rng, 1, n, K, alpha=0.4)[0]
    f = np.diff(F_true, axis=1, prepend=0.0)
    y = np.array([rng.choice(K, p=row / row.sum()) for row in f])
    F_noise = random_cdfs(rng, 1, n, K)[0]
    panel = MemberPanel(OrderedSampleSpace.of_size(K), ["true", "noise"],
                        np.stack([F_true, F_noise]), Outcomes.exact(y))
    res = tune_weights(panel, TuneConfig("nll", "linear"))
    a, _ = _grid_best(panel, "linear", "nll")
    assert abs(res.weights[0] - a) <= 0.02


@pytest.mark.parametrize("kind", ["linear", "log-cdf", "trafo:logistic"])
@pytest.mark.parametrize("score", ["nll", "rps"])
def test_grid_oracle_two_members(kind, score):
    rng = np.random.default_rng(3)
    for _ in range(20 // 6 + 1):
        panel = random_panel(rng, M=2, n=150, K=5, alpha=0.7)
        res = tune_weights(panel, TuneConfig(score, kind))
        _, best = _grid_best(panel, kind, score)
        assert res.score <= best + 1e-6


def test_not_worse_than_equal():
    rng = np.random.default_rng(4)
    for _ in range(5):
        panel = random_panel(rng, M=5, n=300, K=7)
        for kind in ("linear", "log-cdf", "trafo:logistic"):
            for score in ("nll", "rps"):
                res = tune_weights(panel, TuneConfig(score, kind, restarts=2))
                assert res.score <= _score(panel, equal_weights(5), kind, score) + 1e-8
                assert np.all(res.weights >= 0) and res.weights.sum() == pytest.approx(1, abs=1e-12)


def test_deterministic():
    panel = random_panel(np.random.default_rng(5), M=4, n=100, K=5)
    cfg = TuneConfig("rps", "log-cdf", seed=7)
    a, b = tune_weights(panel, cfg), tune_weights(panel, cfg)
    assert a.weights.tobytes() == b.weights.tobytes() and a.score == b.score


def test_snapping_excludes_useless_member():
    rng = np.random.default_rng(6)
    n, K = 500, 3
    F = random_cdfs(rng, 1, n, K, alpha=0.3)[0]
    f = np.diff(F, axis=1, prepend=0.0)
    y = np.array([rng.choice(K, p=row / row.sum()) for row in f])
    # a member that is certain of the wrong class gets weight exactly zero
    bad = np.zeros((n, K))
    bad[np.arange(n), :] = 1.0
    bad[y == 0] = [0.0, 1.0, 1.0]
    panel = MemberPanel(OrderedSampleSpace.of_size(K), ["good", "bad"], np.stack([F, bad]),
                        Outcomes.exact(y))
    res = tune_weights(panel, TuneConfig("nll", "linear"))
    assert res.weights.tolist() == [1.0, 0.0]


def test_config_validation():
    with pytest.raises(InputError):
        TuneConfig("nll", "linear", max_iterations=0)
    with pytest.raises(InputError):
        TuneConfig("nll", "linear", restarts=0)
    with pytest.raises(InputError):
        TuneConfig("crps", "linear")


def test_non_finite_everywhere():
    # both members put zero mass on the observed class even after clamping in log space
    F = np.array([[[1.0, 1.0]], [[1.0, 1.0]]])
    panel = MemberPanel(OrderedSampleSpace.of_size(2), ["a", "b"], F, Outcomes.exact([1]))
    res = tune_weights(panel, TuneConfig("nll", "linear"))
    assert res.score == np.inf
    with pytest.raises(OptimizationError):
        tune_weights(panel, TuneConfig("nll", "linear", eps=0.0))
