"""Proper scoring rules for discrete predictions.

Scores are negatively oriented. Nothing is clamped here: a prediction that
puts zero mass on the observation scores ``+inf``.
"""

from __future__ import annotations

import numpy as np

from .errors import ScoreKindError, ShapeError, UnsupportedObservationError
from .panel import Interval, MemberPanel, Outcomes, pdf_from_cdf

__all__ = ["SCORE_KINDS", "nll", "brier", "rps", "mean_score", "instance_scores",
           "check_score_kind"]

SCORE_KINDS = ("nll", "brier", "rps")


def check_score_kind(kind: str, K: int) -> str:
    if kind not in SCORE_KINDS:
        raise ScoreKindError(f"unknown score {kind!r}; choose one of {', '.join(SCORE_KINDS)}")
    if kind == "brier" and K != 2:
        raise ScoreKindError(f"the Brier score needs K = 2 classes, got K = {K}")
    if K < 2:
        raise ScoreKindError("scores need K >= 2 classes")
    return kind


def _bounds(obs):
    if isinstance(obs, Interval):
        return (-1 if obs.lower is None else int(obs.lower)), int(obs.upper), True
    k = int(obs)
    return k - 1, k, False


def _interval_mass(F, lower, upper):
    """``F(y_upper) - F(y_lower)`` row-wise with ``F(y_{-1}) = 0``."""
    rows = np.arange(F.shape[0])
    up = F[rows, upper]
    lo = np.where(lower >= 0, F[rows, np.maximum(lower, 0)], 0.0)
    return up - lo


def nll(cdf, obs) -> float:
    """Log-score of one CDF at an exact class index or a censored :class:`Interval`."""
    F = np.asarray(cdf, dtype=float)
    lower, upper, censored = _bounds(obs)
    if censored:
        mass = F[upper] - (F[lower] if lower >= 0 else 0.0)
    else:
        mass = pdf_from_cdf(F)[upper]
    with np.errstate(divide="ignore"):
        return float(-np.log(mass)) if mass > 0 else float("inf")


def brier(p, y):
    """``(y - p)^2`` for the probability ``p`` of the second class."""
    p = np.asarray(p, dtype=float)
    y = np.asarray(y, dtype=float)
    out = (y - p) ** 2
    return out.item() if out.ndim == 0 else out


def rps(cdf, obs) -> float:
    """Ranked probability score: mean squared CDF error over the first K-1 classes."""
    if isinstance(obs, Interval):
        raise UnsupportedObservationError("RPS is not defined for censored observations")
    F = np.asarray(cdf, dtype=float)
    K = F.shape[-1]
    k = int(obs)
    step = (np.arange(K - 1) >= k).astype(float)
    return float(np.sum((F[: K - 1] - step) ** 2) / (K - 1))


def instance_scores(cdfs, outcomes: Outcomes, kind: str) -> np.ndarray:
    """Per-instance scores for an ``(n, K)`` array of CDFs."""
    F = np.asarray(cdfs, dtype=float)
    if F.ndim != 2 or F.shape[0] != outcomes.n:
        raise ShapeError("expected an (n, K) CDF array matching the outcomes")
    K = F.shape[1]
    check_score_kind(kind, K)
    if kind == "nll":
        exact = ~outcomes.censored
        mass = np.empty(outcomes.n)
        if exact.any():
            f = pdf_from_cdf(F[exact])
            mass[exact] = f[np.arange(f.shape[0]), outcomes.upper[exact]]
        if (~exact).any():
            mass[~exact] = _interval_mass(F[~exact], outcomes.lower[~exact],
                                          outcomes.upper[~exact])
        with np.errstate(divide="ignore"):
            return np.where(mass > 0, -np.log(np.where(mass > 0, mass, 1.0)), np.inf)
    if not outcomes.all_exact:
        raise UnsupportedObservationError(f"{kind} is not defined for censored observations")
    y = outcomes.upper
    if kind == "brier":
        return brier(1.0 - F[:, 0], (y == 1).astype(float))
    from .kernels import rps_rows

    return rps_rows(F, y)


def mean_score(data, kind: str | None = None, outcomes: Outcomes | None = None):
    """Empirical mean score.

    ``data`` is either a :class:`MemberPanel` (returns one mean per member),
    an ``(n, K)`` CDF array together with ``outcomes``, or a plain sequence
    of per-instance scores (``kind`` is then unused).
    """
    if kind is None and (isinstance(data, MemberPanel) or outcomes is not None):
        raise ScoreKindError("a score kind is required to score predictions")
    if isinstance(data, MemberPanel):
        return np.array([
            float(np.mean(instance_scores(data.cdfs[m], data.outcomes, kind)))
            for m in range(data.M)
        ])
    if outcomes is not None:
        return float(np.mean(instance_scores(data, outcomes, kind)))
    return float(np.mean(np.asarray(data, dtype=float)))
