"""Ensemble operators: linear, log-linear (CDF and PDF), transformation.

Member predictions are stacked along the first axis, so ``cdfs`` has shape
``(M, ..., K)`` and every pool returns an array of shape ``(..., K)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .dist import TargetDistribution, get_dist
from .errors import DegeneratePoolError, DomainError, InputError, ShapeError, ValidationError
from .panel import ContinuousCurve, CurveSet, MemberPanel, pdf_from_cdf

__all__ = [
    "CLAMP",
    "PoolKind",
    "parse_pool_kind",
    "as_simplex",
    "pool_linear",
    "pool_loglinear_cdf",
    "pool_loglinear_pdf",
    "pool_transformation",
    "pool_quasi_arithmetic",
    "pool_continuous",
    "average_coefficients",
    "CoefficientBundle",
    "pool",
    "pool_panel",
]

CLAMP = 1e-12
WEIGHT_TOL = 1e-12


def as_simplex(w, M: int | None = None) -> np.ndarray:
    """Validate ``w`` as non-negative weights summing to one."""
    w = np.asarray(w, dtype=float).reshape(-1)
    if M is not None and w.size != M:
        raise ShapeError(f"{w.size} weights for {M} members")
    if w.size == 0 or not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValidationError("weights must be finite and non-negative")
    if abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise ValidationError(f"weights sum to {w.sum()!r}, not 1")
    return w


@dataclass(frozen=True)
class PoolKind:
    name: str
    dist: TargetDistribution | None = None

    def __post_init__(self):
        if self.name not in ("linear", "log-cdf", "log-pdf", "trafo"):
            raise InputError(f"unknown pool kind {self.name!r}")
        if (self.name == "trafo") != (self.dist is not None):
            raise InputError("the transformation pool carries exactly one target distribution")

    def __str__(self):
        return f"trafo:{self.dist.kind}" if self.name == "trafo" else self.name


def parse_pool_kind(text) -> PoolKind:
    """Parse ``linear | log-cdf | log-pdf | trafo:<dist>``."""
    if isinstance(text, PoolKind):
        return text
    text = str(text)
    if text.startswith("trafo:"):
        return PoolKind("trafo", get_dist(text.split(":", 1)[1]))
    if text == "trafo":
        raise InputError("transformation pool needs a distribution, e.g. trafo:logistic")
    return PoolKind(text)


def _prepare(cdfs, w):
    F = np.asarray(cdfs, dtype=float)
    if F.ndim < 2:
        raise ShapeError("member predictions must be stacked along the first axis")
    w = as_simplex(w, F.shape[0])
    keep = w > 0
    return F[keep], w[keep]


def _finish(out):
    out = np.clip(out, 0.0, 1.0)
    out[..., -1] = 1.0
    return out


def pool_linear(cdfs, w):
    F, w = _prepare(cdfs, w)
    if w.size == 1:
        return F[0].copy()
    return _finish(np.tensordot(w, F, axes=1))


def pool_loglinear_cdf(cdfs, w):
    """Weighted geometric mean of the member CDFs (zero wherever any member is zero)."""
    F, w = _prepare(cdfs, w)
    if w.size == 1:
        return F[0].copy()
    with np.errstate(divide="ignore"):
        logF = np.log(F)
    return _finish(np.exp(np.tensordot(w, logF, axes=1)))


def pool_loglinear_pdf(pdfs, w):
    """Normalized weighted geometric mean of class densities.

    Returns ``(density, c)`` where ``c`` is the normalizing constant, one per
    prediction; ``c >= 1`` always holds.
    """
    f, w = _prepare(pdfs, w)
    if w.size == 1:
        return f[0].copy(), np.ones(f.shape[1:-1]) if f.ndim > 2 else 1.0
    with np.errstate(divide="ignore"):
        g = np.exp(np.tensordot(w, np.log(f), axes=1))
    total = g.sum(axis=-1, keepdims=True)
    if np.any(total <= 0):
        raise DegeneratePoolError("every class has zero density under some member")
    c = 1.0 / total[..., 0]
    return g / total, (c.item() if c.ndim == 0 else c)


def pool_transformation(cdfs, w, dist="logistic"):
    """``F_Z(sum_m w_m F_Z^{-1}(F_m))`` on the interior classes; last class stays 1."""
    F, w = _prepare(cdfs, w)
    if w.size == 1:
        return F[0].copy()
    d = get_dist(dist)
    inner = np.clip(F[..., :-1], CLAMP, 1.0 - CLAMP)
    h = np.tensordot(w, np.asarray(d.quantile(inner)), axes=1)
    out = np.empty(F.shape[1:])
    out[..., :-1] = d.cdf(h)
    out[..., -1] = 1.0
    return out


_QA_TRANSFORMS: dict[str, tuple[Callable, Callable]] = {
    "identity": (lambda v: v, lambda u: u),
    "log": (np.log, np.exp),
}


def pool_quasi_arithmetic(values, w, g="identity"):
    """Generalized mean ``g^{-1}(sum_m w_m g(v_m))``.

    ``g`` is a name (``identity``, ``log``, or a target distribution name,
    which uses its quantile function) or a ``(g, g_inverse)`` pair.
    """
    v = np.asarray(values, dtype=float)
    w = as_simplex(w, v.shape[0])
    if isinstance(g, tuple):
        fwd, inv = g
    elif g in _QA_TRANSFORMS:
        fwd, inv = _QA_TRANSFORMS[g]
    else:
        d = get_dist(g)
        fwd, inv = d.quantile, d.cdf
    with np.errstate(divide="ignore", invalid="ignore"):
        gv = np.asarray(fwd(v), dtype=float)
    if not np.all(np.isfinite(gv)):
        raise DomainError("values outside the domain of the transform")
    out = np.asarray(inv(np.tensordot(w, gv, axes=1)), dtype=float)
    return out.item() if out.ndim == 0 else out


def pool_continuous(curves, w, dist="logistic", grid=None):
    """Average member transformation curves and evaluate the pooled density.

    ``curves`` is a :class:`CurveSet` or an ``(M, G)`` array with ``grid``.
    Returns ``(ContinuousCurve, density)``; the derivative of the averaged
    curve uses central differences with one-sided ends.
    """
    if isinstance(curves, CurveSet):
        grid, H = curves.grid, curves.h
    else:
        if grid is None:
            raise ShapeError("a grid is required with raw curve arrays")
        H = np.atleast_2d(np.asarray(curves, dtype=float))
        grid = np.asarray(grid, dtype=float)
        if H.shape[1] != grid.size:
            raise ShapeError("curve length differs from the grid")
        for row in H:
            ContinuousCurve(grid, row)
    w = as_simplex(w, H.shape[0])
    hbar = np.tensordot(w, H, axes=1)
    slope = np.gradient(hbar, grid)
    d = get_dist(dist)
    dens = np.exp(np.asarray(d.log_density(hbar))) * slope
    return ContinuousCurve(grid, hbar), dens


class CoefficientBundle(NamedTuple):
    """Intercepts ``theta`` (non-decreasing) and shift coefficients ``beta``."""

    theta: np.ndarray
    beta: np.ndarray


def average_coefficients(bundles, w) -> CoefficientBundle:
    """Weighted mean of member intercepts and shifts."""
    thetas = [np.asarray(b[0], dtype=float) for b in bundles]
    betas = [np.asarray(b[1], dtype=float) for b in bundles]
    if len({t.shape for t in thetas}) != 1 or len({b.shape for b in betas}) != 1:
        raise ShapeError("coefficient bundles differ in dimension")
    for m, t in enumerate(thetas):
        if np.any(np.diff(t) < 0):
            raise ValidationError(f"intercepts of member {m} are not non-decreasing")
    w = as_simplex(w, len(thetas))
    return CoefficientBundle(np.tensordot(w, np.stack(thetas), axes=1),
                             np.tensordot(w, np.stack(betas), axes=1))


def pool(cdfs, w, kind) -> np.ndarray:
    """Dispatch on ``kind`` and always return pooled CDFs."""
    kind = parse_pool_kind(kind)
    if kind.name == "linear":
        return pool_linear(cdfs, w)
    if kind.name == "log-cdf":
        return pool_loglinear_cdf(cdfs, w)
    if kind.name == "log-pdf":
        F, wk = _prepare(cdfs, w)
        if wk.size == 1:
            return F[0].copy()
        dens, _ = pool_loglinear_pdf(pdf_from_cdf(F), wk)
        return _finish(np.cumsum(dens, axis=-1))
    return pool_transformation(cdfs, w, kind.dist)


def pool_panel(panel: MemberPanel, w, kind) -> MemberPanel:
    """Single-member panel holding the ensemble prediction."""
    kind = parse_pool_kind(kind)
    return panel.with_cdfs(pool(panel.cdfs, w, kind)[np.newaxis], (str(kind),))
