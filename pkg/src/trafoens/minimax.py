"""Regret of pooled predictions and brute-force minimax checks.

Regret of a pooled prediction at outcome ``y`` is its score minus the
weighted average of the member scores at ``y``. The checks below scan a
grid of candidate predictions and compare the best worst-case regret to the
one attained by the closed-form pool.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy import integrate

from . import kernels
from .dist import get_dist
from .errors import InputError, ScoreKindError, ShapeError
from .panel import pdf_from_cdf
from .pooling import as_simplex, pool_linear, pool_transformation
from .scoring import check_score_kind

__all__ = [
    "RegretProfile",
    "regret_profile",
    "integrated_quantile",
    "BinaryCheck",
    "verify_minimax_binary",
    "RpsCheck",
    "verify_minimax_rps",
    "score_entropy_and_divergence",
]


class RegretProfile(NamedTuple):
    regrets: np.ndarray
    max_regret: float
    argmax: int
    undefined: np.ndarray


def _score_table(cdf, kind: str) -> np.ndarray:
    """Score of one CDF at every exact outcome ``y_0 .. y_{K-1}``."""
    F = np.asarray(cdf, dtype=float)
    K = F.shape[-1]
    if kind == "nll":
        f = pdf_from_cdf(F)
        with np.errstate(divide="ignore"):
            return -np.log(f)
    if kind == "rps":
        step = (np.arange(K - 1)[np.newaxis, :] >= np.arange(K)[:, np.newaxis]).astype(float)
        return np.sum((F[:K - 1][np.newaxis, :] - step) ** 2, axis=1) / (K - 1)
    p = 1.0 - F[0]
    return np.array([p ** 2, (1.0 - p) ** 2])


def _avg_member_table(member_cdfs, w, kind) -> np.ndarray:
    tables = np.stack([_score_table(F, kind) for F in np.asarray(member_cdfs, dtype=float)])
    keep = w > 0
    return np.sum(w[keep, np.newaxis] * tables[keep], axis=0)


def regret_profile(pool_cdf, member_cdfs, w, score: str) -> RegretProfile:
    """Per-outcome regret of ``pool_cdf``; ``inf - inf`` cells are flagged and skipped."""
    P = np.asarray(pool_cdf, dtype=float)
    members = np.asarray(member_cdfs, dtype=float)
    if members.ndim != 2 or members.shape[1] != P.shape[0]:
        raise ShapeError("member CDFs must be an (M, K) array matching the pool")
    check_score_kind(score, P.shape[0])
    w = as_simplex(w, members.shape[0])
    own = _score_table(P, score)
    avg = _avg_member_table(members, w, score)
    undefined = np.isinf(own) & np.isinf(avg)
    with np.errstate(invalid="ignore"):
        reg = np.where(undefined, np.nan, own - avg)
    if np.all(undefined):
        return RegretProfile(reg, float("nan"), -1, undefined)
    masked = np.where(undefined, -np.inf, reg)
    k = int(np.argmax(masked))
    return RegretProfile(reg, float(masked[k]), k, undefined)


def integrated_quantile(dist, p: float) -> float:
    """``G(p) = int_0^p F_Z^{-1}(u) du`` with ``G(0) = 0``."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InputError("p must lie in [0, 1]")
    d = get_dist(dist)
    if p == 0.0:
        return 0.0
    if d.kind == "logistic":
        return 0.0 if p == 1.0 else float(p * np.log(p) + (1.0 - p) * np.log1p(-p))
    # substitute u = F_Z(z): G(p) = int_{-inf}^{q} z f_Z(z) dz, smooth for quad
    upper = np.inf if p == 1.0 else d.quantile(p)
    val, _ = integrate.quad(lambda z: z * d.density(z), -np.inf, upper,
                            epsabs=1e-12, epsrel=1e-12, limit=200)
    return float(val)


class BinaryCheck(NamedTuple):
    scan_argmin: float
    pool_value: float
    scan_min: float
    pool_max_regret: float
    passed: bool
    undefined_cells: int


def verify_minimax_binary(members, w, resolution: float = 1e-3) -> BinaryCheck:
    """Grid-scan the NLL minimax problem for success probabilities ``members``.

    Passes iff the logistic transformation pool attains the scan minimum of
    the worst-case regret (to 1e-9) and lies within one grid step of the
    scan argmin.
    """
    p = np.asarray(members, dtype=float).reshape(-1)
    if np.any((p < 0) | (p > 1)):
        raise InputError("member probabilities must lie in [0, 1]")
    if resolution > 1e-3 or resolution <= 0:
        raise InputError("resolution must be in (0, 1e-3]")
    w = as_simplex(w, p.size)
    cdfs = np.column_stack([1.0 - p, np.ones_like(p)])
    avg = _avg_member_table(cdfs, w, "nll")
    count = int(round(1.0 / resolution)) - 1
    j, scan_min = kernels.binary_regret_scan(avg[0], avg[1], count, resolution)
    pooled = pool_transformation(cdfs, w, "logistic")
    pool_value = float(1.0 - pooled[0])
    prof = regret_profile(pooled, cdfs, w, "nll")
    arg = (j + 1) * resolution
    ok = (prof.max_regret <= scan_min + 1e-9) and abs(arg - pool_value) <= resolution + 1e-12
    return BinaryCheck(arg, pool_value, float(scan_min), prof.max_regret, bool(ok),
                       int(prof.undefined.sum()))


class RpsCheck(NamedTuple):
    passed: bool
    pool_max_regret: float
    scan_min: float
    scan_argmin: tuple
    pool_cdf: np.ndarray


def verify_minimax_rps(members, w, step: float = 0.005) -> RpsCheck:
    """Exhaustive K = 3 grid check that the linear pool minimizes worst-case RPS regret."""
    F = np.asarray(members, dtype=float)
    if F.ndim != 2 or F.shape[1] != 3:
        raise ShapeError("the RPS check is defined for K = 3 member CDFs")
    if step > 0.01 or step <= 0:
        raise InputError("grid step must be in (0, 0.01]")
    n_steps = int(round(1.0 / step))
    w = as_simplex(w, F.shape[0])
    avg = _avg_member_table(F, w, "rps")
    i, j, scan_min = kernels.rps3_regret_scan(avg, n_steps)
    pooled = pool_linear(F, w)
    prof = regret_profile(pooled, F, w, "rps")
    ok = prof.max_regret <= scan_min + 1e-9
    return RpsCheck(bool(ok), prof.max_regret, float(scan_min),
                    (i / n_steps, j / n_steps, 1.0), pooled)


def _binary_kl(p, q):
    def term(a, b):
        if a == 0.0:
            return 0.0
        if b == 0.0:
            return float("inf")
        return a * np.log(a / b)

    return float(term(p, q) + term(1.0 - p, 1.0 - q))


def _xlogx(a):
    a = np.asarray(a, dtype=float)
    return np.where(a > 0, a * np.log(np.where(a > 0, a, 1.0)), 0.0)


def score_entropy_and_divergence(score: str, P, Q):
    """Entropy of ``P`` and divergence ``D(P || Q)`` induced by a proper score.

    Scalars are success probabilities of a binary outcome; arrays are
    discrete CDFs. ``brier`` takes scalars, ``rps`` takes CDFs, and ``nll``
    takes either (binary vs. nominal).
    """
    scalar = np.ndim(P) == 0 and np.ndim(Q) == 0
    if score == "brier":
        if not scalar:
            P = 1.0 - np.asarray(P, dtype=float)[0]
            Q = 1.0 - np.asarray(Q, dtype=float)[0]
        p, q = float(P), float(Q)
        return p * (1.0 - p), (p - q) ** 2
    if score == "nll" and scalar:
        p, q = float(P), float(Q)
        ent = -float(_xlogx(p) + _xlogx(1.0 - p))
        return ent, _binary_kl(p, q)
    F = np.asarray(P, dtype=float)
    G = np.asarray(Q, dtype=float)
    if F.shape != G.shape:
        raise ShapeError("P and Q must share a sample space")
    K = F.shape[-1]
    if score == "rps":
        ent = float(np.sum(F[: K - 1] * (1.0 - F[: K - 1])) / (K - 1))
        return ent, float(np.sum((F[: K - 1] - G[: K - 1]) ** 2) / (K - 1))
    if score == "nll":
        f, g = pdf_from_cdf(F), pdf_from_cdf(G)
        ent = -float(np.sum(_xlogx(f)))
        if np.any((f > 0) & (g == 0)):
            return ent, float("inf")
        pos = f > 0
        return ent, float(np.sum(f[pos] * np.log(f[pos] / g[pos])))
    raise ScoreKindError(f"unknown score {score!r}")
