"""Discrimination, calibration and bootstrap intervals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import special, stats

from .errors import DegenerateInputError, InputError, UndefinedMetricError, UnstableMetricError
from .panel import pdf_from_cdf

__all__ = [
    "classify",
    "accuracy",
    "auc",
    "probabilistic_index",
    "qwk",
    "CalibrationBin",
    "calibration_bins",
    "CalibrationFit",
    "citl_and_slope",
    "BootstrapConfig",
    "BootstrapResult",
    "bootstrap_ci",
    "exceedance",
    "DEFAULT_CUTS",
]

DEFAULT_CUTS = (0.5, 0.9, 0.99, 0.999)


def classify(cdf):
    """Mode of the predicted class density; ties go to the lowest class."""
    f = pdf_from_cdf(cdf)
    out = np.argmax(f, axis=-1)
    return int(out) if np.ndim(out) == 0 else out


def accuracy(cdfs, classes) -> float:
    y = np.asarray(classes)
    if y.dtype.kind not in "iu":
        raise InputError("accuracy needs exact integer class outcomes")
    return float(np.mean(classify(cdfs) == y))


def probabilistic_index(scores, events) -> float:
    """P(score of a positive > score of a negative) + 0.5 P(tie)."""
    s = np.asarray(scores, dtype=float)
    e = np.asarray(events).astype(bool)
    n1 = int(e.sum())
    n0 = e.size - n1
    if n1 == 0 or n0 == 0:
        raise UndefinedMetricError("AUC needs both outcome groups")
    ranks = stats.rankdata(s)
    u = ranks[e].sum() - n1 * (n1 + 1) / 2.0
    return float(u / (n1 * n0))


def auc(scores, events) -> float:
    """Folded probabilistic index ``max(PI, 1 - PI)``."""
    pi = probabilistic_index(scores, events)
    return max(pi, 1.0 - pi)


def qwk(predicted, observed, K: int) -> float:
    """Cohen's quadratic weighted kappa, ``1 - sum(w o) / sum(w e)``."""
    p = np.asarray(predicted, dtype=np.int64)
    o = np.asarray(observed, dtype=np.int64)
    if K < 2 or p.shape != o.shape:
        raise InputError("qwk needs K >= 2 and equally long label vectors")
    conf = np.zeros((K, K))
    np.add.at(conf, (o, p), 1.0)
    conf /= conf.sum()
    expected = np.outer(conf.sum(axis=1), conf.sum(axis=0))
    i, j = np.indices((K, K))
    wts = (i - j) ** 2 / (K - 1) ** 2
    denom = float(np.sum(wts * expected))
    if denom == 0.0:
        raise UndefinedMetricError("expected disagreement is zero")
    return 1.0 - float(np.sum(wts * conf)) / denom


class CalibrationBin(NamedTuple):
    lo: float
    hi: float
    count: int
    mean_pred: float
    obs_rate: float
    ci_lo: float
    ci_hi: float


def _clopper_pearson(k: int, n: int, level: float = 0.95):
    alpha = 1.0 - level
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def calibration_bins(predicted, events, cuts: Sequence[float] = DEFAULT_CUTS,
                     level: float = 0.95) -> list[CalibrationBin]:
    """Reliability table with bins split at empirical quantiles of the predictions.

    Bins are right-closed; the first one also holds its lower edge. Empty
    bins report count 0 and NaN statistics.
    """
    p = np.asarray(predicted, dtype=float)
    e = np.asarray(events, dtype=float)
    cuts = np.asarray(cuts, dtype=float)
    if cuts.size and (np.any(np.diff(cuts) <= 0) or cuts[0] <= 0 or cuts[-1] >= 1):
        raise InputError("cut points must be strictly increasing inside (0, 1)")
    edges = np.concatenate(([0.0], np.quantile(p, cuts) if cuts.size else [], [1.0]))
    which = np.clip(np.searchsorted(edges, p, side="left") - 1, 0, len(edges) - 2)
    out = []
    for b in range(len(edges) - 1):
        sel = which == b
        n = int(sel.sum())
        if n == 0:
            nan = float("nan")
            out.append(CalibrationBin(float(edges[b]), float(edges[b + 1]), 0, nan, nan, nan, nan))
            continue
        k = int(round(e[sel].sum()))
        lo, hi = _clopper_pearson(k, n, level)
        out.append(CalibrationBin(float(edges[b]), float(edges[b + 1]), n,
                                  float(p[sel].mean()), k / n, lo, hi))
    return out


def exceedance(cdfs, k: int):
    """Predicted ``P(Y > y_k)`` from CDF rows."""
    return 1.0 - np.asarray(cdfs, dtype=float)[..., k]


class CalibrationFit(NamedTuple):
    citl: float
    slope: float
    converged: bool
    diagnostic: str


def _irls(X, y, offset, max_iter=100, tol=1e-10, bound=20.0):
    beta = np.zeros(X.shape[1])
    for _ in range(max_iter):
        eta = offset + X @ beta
        mu = special.expit(eta)
        wt = np.maximum(mu * (1.0 - mu), 1e-300)
        z = eta - offset + (y - mu) / wt
        XtW = X.T * wt
        new = np.linalg.solve(XtW @ X, XtW @ z)
        if not np.all(np.isfinite(new)) or np.any(np.abs(new) > bound):
            return new, False, "separation: parameter diverged"
        if np.max(np.abs(new - beta)) < tol:
            return new, True, ""
        beta = new
    return beta, False, f"no convergence in {max_iter} iterations"


def citl_and_slope(predicted, events, eps: float = 1e-12) -> CalibrationFit:
    """Calibration-in-the-large and calibration slope on the log-odds scale.

    ``predicted`` are exceedance probabilities ``P(Y > y_k)``, ``events`` the
    indicators ``1(Y > y_k)``. Separation is reported, not raised.
    """
    p = np.clip(np.asarray(predicted, dtype=float), eps, 1.0 - eps)
    y = np.asarray(events, dtype=float)
    if y.min() == y.max():
        raise DegenerateInputError("both event classes must be present")
    r = special.logit(p)
    if np.ptp(r) == 0.0:
        raise DegenerateInputError("calibration slope undefined for constant predictions")
    X = np.column_stack([np.ones_like(r), r])
    (b0, b1), ok_slope, msg_slope = _irls(X, y, np.zeros_like(r))
    (a,), ok_citl, msg_citl = _irls(X[:, :1], y, r)
    diag = "; ".join(m for m in (msg_slope and f"slope: {msg_slope}",
                                 msg_citl and f"citl: {msg_citl}") if m)
    return CalibrationFit(float(a), float(b1), ok_slope and ok_citl, diag)


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 1000
    quantiles: tuple = (0.025, 0.975)
    seed: int = 0

    def __post_init__(self):
        if self.B < 1:
            raise InputError("B must be at least 1")


class BootstrapResult(NamedTuple):
    estimate: float
    lo: float
    hi: float
    skipped: int


def resample_indices(n: int, seed: int, b: int) -> np.ndarray:
    """Instance indices of resample ``b``; a pure function of ``(seed, b)``."""
    return np.random.default_rng([seed, b]).integers(0, n, size=n)


def bootstrap_ci(metric: Callable[[np.ndarray], float], n: int,
                 config: BootstrapConfig | None = None) -> BootstrapResult:
    """Percentile bootstrap over instances.

    ``metric`` maps an index array into the data to a number. Resamples on
    which it raises :class:`UndefinedMetricError` are skipped; more than half
    skipped raises :class:`UnstableMetricError`.
    """
    cfg = config or BootstrapConfig()
    point = float(metric(np.arange(n)))
    values = []
    skipped = 0
    for b in range(cfg.B):
        try:
            values.append(float(metric(resample_indices(n, cfg.seed, b))))
        except UndefinedMetricError:
            skipped += 1
    if skipped * 2 > cfg.B:
        raise UnstableMetricError(f"{skipped} of {cfg.B} resamples undefined")
    lo, hi = np.quantile(np.asarray(values), cfg.quantiles)
    return BootstrapResult(point, float(lo), float(hi), skipped)
