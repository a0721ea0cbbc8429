"""Ensemble weight tuning on hold-out predictions.

Weights are parameterized through a softmax with the first logit pinned at
zero, so every iterate lies on the simplex. Each restart runs gradient
descent with central finite-difference gradients and a backtracking line
search until the step or the relative decrease is negligible; the best
restart wins, ties going to the lowest restart index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InputError, OptimizationError
from .panel import MemberPanel, pdf_from_cdf
from .pooling import CLAMP, PoolKind, parse_pool_kind, pool
from .scoring import check_score_kind, instance_scores

__all__ = ["TuneConfig", "TuneResult", "tune_weights", "equal_weights", "softmax_weights"]

SNAP = 1e-10
_FD_STEP = 1e-6
_ARMIJO = 1e-4
_FTOL = 1e-14


def equal_weights(M: int) -> np.ndarray:
    """``1/M`` each; if needed the last entry absorbs rounding so the sum is exactly one."""
    if M < 1:
        raise InputError("need at least one member")
    w = np.full(M, 1.0 / M)
    if math.fsum(w) != 1.0:
        w[-1] = 1.0 - math.fsum(w[:-1])
    return w


def softmax_weights(theta) -> np.ndarray:
    z = np.concatenate(([0.0], np.asarray(theta, dtype=float)))
    z = np.exp(z - z.max())
    return z / z.sum()


@dataclass(frozen=True)
class TuneConfig:
    score: str = "nll"
    pool: PoolKind = field(default_factory=lambda: PoolKind("linear"))
    max_iterations: int = 500
    restarts: int = 5
    step_tol: float = 1e-8
    eps: float = CLAMP
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pool", parse_pool_kind(self.pool))
        if self.max_iterations < 1 or self.restarts < 1:
            raise InputError("max_iterations and restarts must be at least 1")
        if self.score not in ("nll", "rps", "brier"):
            raise InputError(f"unknown score {self.score!r}")


class TuneResult(NamedTuple):
    weights: np.ndarray
    score: float


class _Objective:
    """Mean clamped score of the pooled prediction as a function of weights.

    Member-wise transforms are computed once so each evaluation is a single
    contraction over the member axis.
    """

    def __init__(self, panel: MemberPanel, kind: PoolKind, score: str, eps: float):
        check_score_kind(score, panel.K)
        self.kind, self.score, self.eps = kind, score, eps
        self.outcomes = panel.outcomes
        F = panel.cdfs
        if kind.name == "linear":
            self.base = F
        elif kind.name == "log-cdf":
            self.base = np.log(np.maximum(F, 1e-300))
        elif kind.name == "log-pdf":
            self.base = np.log(np.maximum(pdf_from_cdf(F), 1e-300))
        else:
            self.base = np.asarray(kind.dist.quantile(np.clip(F[..., :-1], CLAMP, 1.0 - CLAMP)))
        y = self.outcomes
        self.rows = np.arange(y.n)
        self.upper = y.upper
        self.lower = np.maximum(y.lower, 0)
        self.has_lower = y.lower >= 0

    def pooled(self, w) -> np.ndarray:
        t = np.tensordot(w, self.base, axes=1)
        name = self.kind.name
        if name == "linear":
            return t
        if name == "log-cdf":
            return np.exp(t)
        if name == "log-pdf":
            g = np.exp(t - t.max(axis=-1, keepdims=True))
            return np.cumsum(g / g.sum(axis=-1, keepdims=True), axis=-1)
        out = np.ones(t.shape[:-1] + (t.shape[-1] + 1,))
        out[..., :-1] = self.kind.dist.cdf(t)
        return out

    def __call__(self, w) -> float:
        F = self.pooled(w)
        F[..., -1] = 1.0
        if self.score == "nll":
            up = F[self.rows, self.upper]
            lo = np.where(self.has_lower, F[self.rows, self.lower], 0.0)
            with np.errstate(divide="ignore"):
                return float(np.mean(-np.log(np.maximum(up - lo, self.eps))))
        return float(np.mean(instance_scores(F, self.outcomes, self.score)))


def _descend(obj, theta, cfg: TuneConfig):
    f = obj(softmax_weights(theta))
    if not np.isfinite(f):
        return theta, f
    step = 1.0
    for _ in range(cfg.max_iterations):
        grad = np.empty_like(theta)
        for j in range(theta.size):
            e = np.zeros_like(theta)
            e[j] = _FD_STEP
            grad[j] = (obj(softmax_weights(theta + e)) - obj(softmax_weights(theta - e))) / (
                2 * _FD_STEP
            )
        gg = float(grad @ grad)
        if not np.isfinite(gg) or gg == 0.0:
            break
        t = 2.0 * step
        accepted = False
        while t > 1e-14:
            cand = theta - t * grad
            fc = obj(softmax_weights(cand))
            if fc <= f - _ARMIJO * t * gg:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        moved = float(np.max(np.abs(cand - theta)))
        gain = f - fc
        theta, f, step = cand, fc, t
        if moved < cfg.step_tol or gain <= _FTOL * max(1.0, abs(f)):
            break
    return theta, f


def tune_weights(panel: MemberPanel, config: TuneConfig | None = None) -> TuneResult:
    """Minimize the mean validation score of the pooled prediction over the simplex."""
    cfg = config or TuneConfig()
    kind = cfg.pool
    M = panel.M
    final = _Scorer(panel, kind, cfg.score)
    if M == 1:
        w = np.ones(1)
        return TuneResult(w, final(w))

    obj = _Objective(panel, kind, cfg.score, cfg.eps)
    rng = np.random.default_rng(cfg.seed)
    starts = [np.zeros(M - 1)] + [rng.normal(0.0, 1.0, M - 1) for _ in range(cfg.restarts - 1)]
    best_theta, best_f = None, np.inf
    any_finite = False
    for theta0 in starts:
        theta, f = _descend(obj, theta0, cfg)
        any_finite |= bool(np.isfinite(obj(softmax_weights(theta0))))
        if f < best_f:
            best_theta, best_f = theta, f
    if not any_finite or best_theta is None:
        raise OptimizationError("objective is not finite at any restart initialization")

    w = softmax_weights(best_theta)
    for m in range(M):
        vertex = np.zeros(M)
        vertex[m] = 1.0
        fv = obj(vertex)
        if fv < best_f:
            w, best_f = vertex, fv
    w = np.where(w < SNAP, 0.0, w)
    w = w / w.sum()

    score = final(w)
    w_eq = equal_weights(M)
    if not score <= final(w_eq):
        w, score = w_eq, final(w_eq)
    return TuneResult(w, score)


class _Scorer:
    """Unclamped mean score of the pooled prediction."""

    def __init__(self, panel, kind, score):
        self.panel, self.kind, self.score = panel, kind, score

    def __call__(self, w) -> float:
        F = pool(self.panel.cdfs, w, self.kind)
        return float(np.mean(instance_scores(F, self.panel.outcomes, self.score)))
