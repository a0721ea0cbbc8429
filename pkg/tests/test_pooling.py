import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from trafoens.errors import DegeneratePoolError, InputError, ShapeError, ValidationError
from trafoens.panel import CurveSet, pdf_from_cdf, validate_cdfs
from trafoens.pooling import (
    CoefficientBundle,
    as_simplex,
    average_coefficients,
    parse_pool_kind,
    pool,
    pool_continuous,
    pool_linear,
    pool_loglinear_cdf,
    pool_loglinear_pdf,
    pool_quasi_arithmetic,
    pool_transformation,
)
from trafoens.scoring import instance_scores

from conftest import random_cdfs, random_panel, random_weights

KINDS = ["linear", "log-cdf", "log-pdf", "trafo:logistic", "trafo:normal", "trafo:mev"]
EQ2 = np.array([0.5, 0.5])


def binary(*ps):
    return np.array([[p, 1.0] for p in ps])


def test_linear_examples():
    assert pool_linear(binary(0.2, 0.4), EQ2)[0] == pytest.approx(0.3, abs=1e-16)
    F = random_cdfs(np.random.default_rng(0), 3, 10, 4)
    w = np.array([0.2, 0.3, 0.5])
    want = np.array([[[sum(w[m] * F[m, i, k] for m in range(3)) for k in range(4)]
                      for i in range(10)]])[0]
    np.testing.assert_allclose(pool_linear(F, w), want, atol=1e-15)


def test_loglinear_cdf_examples():
    assert pool_loglinear_cdf(binary(0.2, 0.8), EQ2)[0] == pytest.approx(0.4, abs=1e-15)
    out = pool_loglinear_cdf(binary(0.0, 0.8), EQ2)
    assert out[0] == 0.0 and out[1] == 1.0


def test_loglinear_pdf_examples():
    d, c = pool_loglinear_pdf(np.array([[0.5, 0.5], [0.5, 0.5]]), EQ2)
    np.testing.assert_allclose(d, [0.5, 0.5])
    assert c == pytest.approx(1.0, abs=1e-15)
    d, c = pool_loglinear_pdf(np.array([[0.8, 0.2], [0.2, 0.8]]), EQ2)
    np.testing.assert_allclose(d, [0.5, 0.5], atol=1e-15)
    assert c == pytest.approx(1.25, abs=1e-14)
    with pytest.raises(DegeneratePoolError):
        pool_loglinear_pdf(np.array([[1.0, 0.0], [0.0, 1.0]]), EQ2)


def test_transformation_examples():
    assert pool_transformation(binary(0.2, 0.8), EQ2, "logistic")[0] == pytest.approx(0.5,
                                                                                       abs=1e-15)
    # frozen from expit((logit 0.2 + logit 0.4) / 2)
    assert special.logit(0.2) / 2 + special.logit(0.4) / 2 == pytest.approx(-0.895880, abs=1e-6)
    got = pool_transformation(binary(0.2, 0.4), EQ2, "logistic")[0]
    assert got == pytest.approx(0.289898, abs=1e-6)
    assert got == pytest.approx(0.2898979485566356, abs=1e-14)


@pytest.mark.parametrize("kind", KINDS)
def test_identical_members_unchanged(kind):
    F = random_cdfs(np.random.default_rng(1), 1, 20, 5)[0]
    out = pool(np.stack([F, F, F]), [0.2, 0.3, 0.5], kind)
    np.testing.assert_allclose(out, F, atol=1e-11)


@pytest.mark.parametrize("kind", KINDS)
def test_weight_degeneracy_exact(kind):
    F = random_cdfs(np.random.default_rng(2), 3, 20, 5)
    np.testing.assert_array_equal(pool(F, [1.0, 0.0, 0.0], kind), F[0])
    np.testing.assert_array_equal(pool(F, [0.0, 0.0, 1.0], kind), F[2])


@pytest.mark.parametrize("kind", KINDS)
def test_outputs_valid(kind):
    rng = np.random.default_rng(3)
    for _ in range(100):
        F = random_cdfs(rng, 4, 5, 6, alpha=0.3)
        out = pool(F, random_weights(rng, 4), kind)
        assert validate_cdfs(out) == []
        assert np.all(out[..., -1] == 1.0)


def test_quasi_arithmetic():
    w = np.array([0.3, 0.7])
    assert pool_quasi_arithmetic([0.2, 0.6], w) == pytest.approx(0.48, abs=1e-15)
    assert pool_quasi_arithmetic([0.2, 0.8], EQ2, "log") == pytest.approx(0.4, abs=1e-15)
    F = random_cdfs(np.random.default_rng(4), 2, 30, 4)
    tr = pool_transformation(F, w, "logistic")
    for i in range(30):
        for k in range(3):
            qa = pool_quasi_arithmetic(F[:, i, k], w, (special.logit, special.expit))
            assert qa == pytest.approx(tr[i, k], abs=1e-12)
    with pytest.raises(InputError):
        pool_quasi_arithmetic([0.0, 0.5], EQ2, "logistic")


def test_continuous_affine():
    y = np.linspace(-3, 3, 601)
    H = np.stack([y, 2 * y])
    curve, dens = pool_continuous(H, EQ2, "logistic", y)
    np.testing.assert_allclose(curve.h, 1.5 * y, atol=1e-15)
    assert dens[300] == pytest.approx(0.375, abs=1e-4)


def test_continuous_identical_and_integral():
    y = np.linspace(-6, 6, 1201)
    h = (y - 0.5) / 1.1
    cs = CurveSet(y, ["a", "b"], [h, h])
    curve, dens = pool_continuous(cs, EQ2, "logistic")
    want = special.expit(h) * (1 - special.expit(h)) / 1.1
    np.testing.assert_allclose(dens, want, atol=1e-8)
    mu = np.array([-2, -1, 0, 1, 2.0])
    s = np.array([0.8, 0.9, 1.0, 1.1, 1.2])
    y = np.linspace(-40, 40, 8001)
    H = (y[None, :] - mu[:, None]) / s[:, None]
    _, dens = pool_continuous(H, np.full(5, 0.2), "logistic", y)
    assert np.trapezoid(dens, y) == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ShapeError):
        pool_continuous(H[:, :-1], np.full(5, 0.2), "logistic", y)


def test_average_coefficients():
    b = CoefficientBundle(np.array([-1.0, 0.5]), np.array([0.5]))
    out = average_coefficients([b], [1.0])
    np.testing.assert_array_equal(out.theta, b.theta)
    b2 = CoefficientBundle(np.array([0.0, 1.0]), np.array([-0.5]))
    out = average_coefficients([b, b2], EQ2)
    assert out.beta[0] == 0.0
    np.testing.assert_allclose(out.theta, [-0.5, 0.75])
    with pytest.raises(ValidationError):
        average_coefficients([CoefficientBundle(np.array([1.0, 0.0]), np.zeros(1)), b], EQ2)
    with pytest.raises(ShapeError):
        average_coefficients([b, CoefficientBundle(np.zeros(3), np.zeros(1))], EQ2)


def test_weights_validation():
    with pytest.raises(ValidationError):
        as_simplex([0.5, 0.6])
    with pytest.raises(ValidationError):
        as_simplex([1.5, -0.5])
    with pytest.raises(ShapeError):
        pool_linear(random_cdfs(np.random.default_rng(0), 2, 3, 3), [1.0])
    with pytest.raises(InputError):
        parse_pool_kind("trafo")
    with pytest.raises(InputError):
        parse_pool_kind("median")
    assert str(parse_pool_kind("trafo:probit")) == "trafo:normal"


def _bound_gap(panel, w, kind, score):
    members = np.array([np.mean(instance_scores(panel.cdfs[m], panel.outcomes, score))
                        for m in range(panel.M)])
    ens = np.mean(instance_scores(pool(panel.cdfs, w, kind), panel.outcomes, score))
    return ens - float(w @ members)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(KINDS), st.booleans())
def test_nll_bound_property(seed, kind, censor):
    # the log-pdf bound is a statement about exact outcomes only
    rng = np.random.default_rng(seed)
    frac = 0.2 if censor and kind != "log-pdf" else 0.0
    panel = random_panel(rng, M=3, n=40, K=5, censored_frac=frac, alpha=0.5)
    assert _bound_gap(panel, random_weights(rng, 3), kind, "nll") <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_linear_rps_bound_property(seed):
    rng = np.random.default_rng(seed)
    panel = random_panel(rng, M=4, n=40, K=6)
    assert _bound_gap(panel, random_weights(rng, 4), "linear", "rps") <= 1e-10


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_loglinear_pdf_constant_at_least_one(seed):
    rng = np.random.default_rng(seed)
    F = random_cdfs(rng, 4, 10, 5, alpha=0.5)
    _, c = pool_loglinear_pdf(pdf_from_cdf(F), random_weights(rng, 4))
    assert np.all(c >= 1 - 1e-12)


def test_censored_log_pdf_counterexample_documented():
    # interval mass of the normalized geometric mean can fall below the
    # weighted member average, so the log-pdf bound is asserted for exact data only
    # densities (0.5, 0, 0.5) and (0, 0.9, 0.1): the pool puts all mass on class 2
    F = np.array([[[0.5, 0.5, 1.0]], [[0.0, 0.9, 1.0]]])
    from trafoens.panel import Outcomes

    obs = Outcomes.from_list([(None, 1)])
    pooled = pool(F, EQ2, "log-pdf")
    ens = instance_scores(pooled, obs, "nll")[0]
    avg = np.mean([instance_scores(F[m], obs, "nll")[0] for m in range(2)])
    assert np.isfinite(avg) and ens == np.inf
