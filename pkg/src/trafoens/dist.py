"""Reference distributions with log-concave densities.

Three standard targets are supported: ``logistic``, ``normal`` (standard
normal) and ``mev`` (minimum extreme value, ``F(z) = 1 - exp(-exp(z))``).
All functions accept scalars or arrays and return the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, InputError

__all__ = [
    "TargetDistribution",
    "KINDS",
    "get_dist",
    "cdf_value",
    "quantile",
    "log_density",
    "density",
    "density_derivative",
    "log_cdf",
    "normal_ppf",
]

KINDS = ("logistic", "normal", "mev")

_ALIASES = {
    "logistic": "logistic",
    "logit": "logistic",
    "normal": "normal",
    "standard-normal": "normal",
    "probit": "normal",
    "mev": "mev",
    "minimum-extreme-value": "mev",
    "cloglog": "mev",
}

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Acklam's rational approximation to the normal quantile (|rel err| < 1.2e-9).
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _as_finite(z):
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise InputError("argument must be finite")
    return z


def _as_open_prob(p):
    p = np.asarray(p, dtype=float)
    if not np.all((p > 0.0) & (p < 1.0)):
        raise DomainError("quantile requires probabilities strictly inside (0, 1)")
    return p


def _out(x):
    return x.item() if np.ndim(x) == 0 else x


def _acklam_lower(p):
    """Initial approximation for p <= 0.5 (returns non-positive values)."""
    x = np.empty_like(p)
    tail = p < _P_LOW
    if np.any(tail):
        q = np.sqrt(-2.0 * np.log(p[tail]))
        c, d = _C, _D
        x[tail] = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    mid = ~tail
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        a, b = _A, _B
        x[mid] = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / (
            ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
        )
    return x


def normal_ppf(p):
    """Standard normal quantile: rational approximation plus one Newton step.

    The upper half is obtained by symmetry so the Newton residual is always
    evaluated in the well-conditioned lower tail.
    """
    p = _as_open_prob(p)
    flat = np.atleast_1d(p).astype(float)
    upper = flat > 0.5
    lo = np.where(upper, 1.0 - flat, flat)
    x = _acklam_lower(lo)
    resid = special.ndtr(x) - lo
    x = x - resid / np.exp(-0.5 * x * x - _HALF_LOG_2PI)
    x = np.where(upper, -x, x)
    return _out(x.reshape(np.shape(p)))


@dataclass(frozen=True)
class TargetDistribution:
    """Standard reference CDF ``F_Z`` selected by name."""

    kind: str = "logistic"

    def __post_init__(self):
        try:
            canonical = _ALIASES[self.kind]
        except KeyError:
            raise InputError(
                f"unknown distribution {self.kind!r}; choose one of {', '.join(KINDS)}"
            ) from None
        object.__setattr__(self, "kind", canonical)

    def cdf(self, z):
        z = _as_finite(z)
        if self.kind == "logistic":
            out = special.expit(z)
        elif self.kind == "normal":
            out = special.ndtr(z)
        else:
            out = -np.expm1(-np.exp(z))
        return _out(out)

    def sf(self, z):
        """Survival function ``1 - F_Z(z)`` without cancellation."""
        z = _as_finite(z)
        if self.kind == "logistic":
            out = special.expit(-z)
        elif self.kind == "normal":
            out = special.ndtr(-z)
        else:
            out = np.exp(-np.exp(z))
        return _out(out)

    def quantile(self, p):
        p = _as_open_prob(p)
        if self.kind == "logistic":
            out = special.logit(p)
        elif self.kind == "normal":
            return normal_ppf(p)
        else:
            out = np.log(-np.log1p(-p))
        return _out(out)

    def isf(self, q):
        """Inverse survival function, ``z`` with ``1 - F_Z(z) = q``."""
        q = _as_open_prob(q)
        if self.kind == "logistic":
            out = -special.logit(q)
        elif self.kind == "normal":
            return _out(-np.asarray(normal_ppf(q)))
        else:
            out = np.log(-np.log(q))
        return _out(out)

    def log_density(self, z):
        z = _as_finite(z)
        if self.kind == "logistic":
            a = np.abs(z)
            out = -a - 2.0 * np.log1p(np.exp(-a))
        elif self.kind == "normal":
            out = -0.5 * z * z - _HALF_LOG_2PI
        else:
            with np.errstate(over="ignore"):
                out = z - np.exp(z)
        return _out(out)

    def density(self, z):
        return _out(np.exp(np.asarray(self.log_density(z))))

    def density_derivative(self, z):
        """``f_Z'(z) = f_Z(z) * d/dz log f_Z(z)``."""
        z = _as_finite(z)
        if self.kind == "logistic":
            score = -np.tanh(0.5 * z)
        elif self.kind == "normal":
            score = -z
        else:
            score = -np.expm1(z)
        return _out(np.asarray(self.density(z)) * score)

    def log_cdf(self, z):
        z = _as_finite(z)
        if self.kind == "logistic":
            out = -np.logaddexp(0.0, -z)
        elif self.kind == "normal":
            out = special.log_ndtr(z)
        else:
            out = np.log(-np.expm1(-np.exp(z)))
        return _out(out)


def get_dist(dist) -> TargetDistribution:
    """Coerce a name or an existing instance to a :class:`TargetDistribution`."""
    if isinstance(dist, TargetDistribution):
        return dist
    return TargetDistribution(str(dist))


def cdf_value(dist, z):
    return get_dist(dist).cdf(z)


def quantile(dist, p):
    return get_dist(dist).quantile(p)


def log_density(dist, z):
    return get_dist(dist).log_density(z)


def density(dist, z):
    return get_dist(dist).density(z)


def density_derivative(dist, z):
    return get_dist(dist).density_derivative(z)


def log_cdf(dist, z):
    return get_dist(dist).log_cdf(z)
