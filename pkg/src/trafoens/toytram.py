"""Small ordinal transformation models used as ensemble members.

The model is ``P(Y <= y_k | x) = F_Z(theta_k - x @ beta)`` with monotone
intercepts ``theta = cumulative_softplus(gamma)``. ``simple-intercept``
models have no covariates. Fitting is full-batch gradient descent with a
backtracking line search on the mean NLL or mean RPS, keeping the epoch with
the smallest validation loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .dist import TargetDistribution, get_dist
from .errors import DegenerateDataError, InputError, ShapeError, TrainingError, UndefinedBandError
from .panel import MemberPanel, OrderedSampleSpace, Outcomes
from .pooling import CLAMP, as_simplex

__all__ = [
    "ToyModelSpec",
    "ToyModelParams",
    "TrainConfig",
    "Dataset",
    "Split",
    "MemberSet",
    "TrainTrace",
    "PRESETS",
    "cumulative_softplus",
    "inverse_cumulative_softplus",
    "predict",
    "transformation",
    "simulate_ordinal",
    "simulate_preset",
    "split_dataset",
    "loss_and_grad",
    "train",
    "make_members",
    "member_seed",
    "epistemic_band",
    "quantile_predict",
    "structure_check_pairs",
]

_ARMIJO = 1e-4


@dataclass(frozen=True)
class ToyModelSpec:
    kind: str = "si-ls"
    K: int = 7
    P: int = 10
    target: TargetDistribution = TargetDistribution("logistic")

    def __post_init__(self):
        kind = {"simple-intercept": "si", "simple-intercept-linear-shift": "si-ls"}.get(
            self.kind, self.kind
        )
        if kind not in ("si", "si-ls"):
            raise InputError(f"unknown model kind {self.kind!r}")
        if self.K < 2:
            raise InputError("need K >= 2 classes")
        if (kind == "si-ls") != (self.P >= 1):
            raise InputError("P >= 1 exactly when the model has a linear shift")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "target", get_dist(self.target))


class ToyModelParams(NamedTuple):
    gamma: np.ndarray
    beta: np.ndarray

    @property
    def theta(self) -> np.ndarray:
        return cumulative_softplus(self.gamma)


@dataclass(frozen=True)
class TrainConfig:
    loss: str = "nll"
    learning_rate: float = 0.1
    epochs: int = 500
    val_fraction: float = 0.2
    init: str = "empirical"
    seed: int = 0
    beta_init_range: float = 0.1

    def __post_init__(self):
        if self.loss not in ("nll", "rps"):
            raise InputError("loss must be 'nll' or 'rps'")
        if self.learning_rate <= 0 or self.epochs < 0:
            raise InputError("learning rate must be positive and epochs non-negative")


class Dataset(NamedTuple):
    x: np.ndarray
    y: np.ndarray

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    def take(self, idx) -> "Dataset":
        return Dataset(self.x[idx], self.y[idx])


class Split(NamedTuple):
    train: Dataset
    valid: Dataset
    test: Dataset


class TrainTrace(NamedTuple):
    train_loss: list
    valid_loss: list
    best_epoch: int


def _utk_gamma() -> np.ndarray:
    # age-group counts 0-3, 4-12, 13-19, 20-30, 31-45, 46-61, >61
    counts = np.array([1894, 1519, 1180, 8068, 5433, 3216, 2395], dtype=float)
    cum = np.cumsum(counts)[:-1] / counts.sum()
    return inverse_cumulative_softplus(special.logit(cum))


def _utk_beta() -> np.ndarray:
    beta = np.zeros(10)
    beta[[1, 2]] = math.log(1.2), -math.log(1.2)
    beta[[4, 5]] = math.log(1.5), -math.log(1.5)
    return beta


def cumulative_softplus(gamma) -> np.ndarray:
    """``theta_1 = gamma_1``, ``theta_k = gamma_1 + sum_{j=2..k} softplus(gamma_j)``."""
    g = np.asarray(gamma, dtype=float)
    if g.ndim != 1 or g.size < 1:
        raise ShapeError("gamma must be a non-empty vector (K - 1 entries)")
    out = np.empty_like(g)
    out[0] = g[0]
    out[1:] = g[0] + np.cumsum(np.logaddexp(0.0, g[1:]))
    return out


def inverse_cumulative_softplus(theta) -> np.ndarray:
    """Raw intercepts for strictly increasing ``theta``."""
    t = np.asarray(theta, dtype=float)
    d = np.diff(t)
    if np.any(d <= 0):
        raise InputError("intercepts must be strictly increasing")
    # log(expm1(d)) written to stay finite for large d
    return np.concatenate(([t[0]], d + np.log(-np.expm1(-d))))


PRESETS = {
    "utk-sim": {"K": 7, "beta": _utk_beta(), "gamma": _utk_gamma()},
}


def _check_params(spec: ToyModelSpec, params: ToyModelParams):
    if np.size(params.gamma) != spec.K - 1:
        raise ShapeError(f"gamma needs {spec.K - 1} entries")
    if np.size(params.beta) != (spec.P if spec.kind == "si-ls" else 0):
        raise ShapeError("beta length does not match the model spec")


def _shift(spec, params, x, n):
    if spec.kind == "si":
        return np.zeros(n)
    X = np.atleast_2d(np.asarray(x, dtype=float))
    if X.shape[1] != spec.P:
        raise ShapeError(f"expected {spec.P} covariates, got {X.shape[1]}")
    return X @ np.asarray(params.beta, dtype=float)


def transformation(spec: ToyModelSpec, params: ToyModelParams, x=None) -> np.ndarray:
    """``theta_k - x @ beta`` for the first ``K - 1`` classes, shape ``(n, K-1)``."""
    _check_params(spec, params)
    n = 1 if x is None else np.atleast_2d(x).shape[0]
    eta = _shift(spec, params, x, n)
    return params.theta[np.newaxis, :] - eta[:, np.newaxis]


def predict(spec: ToyModelSpec, params: ToyModelParams, x=None) -> np.ndarray:
    """Predicted CDF rows; a single covariate vector gives a single row."""
    single = x is None or np.ndim(x) == 1
    h = transformation(spec, params, x)
    F = np.ones((h.shape[0], spec.K))
    F[:, :-1] = spec.target.cdf(h)
    return F[0] if single else F


def simulate_ordinal(n: int, K: int, beta, gamma, seed: int = 0, dist="logistic") -> Dataset:
    """Standard-normal covariates pushed through the cumulative model."""
    if n < 1:
        raise InputError("n must be at least 1")
    beta = np.asarray(beta, dtype=float).reshape(-1)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, beta.size))
    kind = "si-ls" if beta.size else "si"
    spec = ToyModelSpec(kind, K, beta.size, dist)
    F = predict(spec, ToyModelParams(np.asarray(gamma, dtype=float), beta), x)
    u = rng.random(n)
    y = np.sum(u[:, np.newaxis] > F[:, :-1], axis=1).astype(np.int64)
    return Dataset(x, y)


def simulate_preset(name: str, n: int, seed: int = 0) -> Dataset:
    try:
        p = PRESETS[name]
    except KeyError:
        raise InputError(f"unknown preset {name!r}") from None
    return simulate_ordinal(n, p["K"], p["beta"], p["gamma"], seed)


def split_dataset(data: Dataset, sizes, seed: int = 0) -> Split:
    """Random train/valid/test split with the given sizes (or fractions)."""
    sizes = np.asarray(sizes, dtype=float)
    if np.all(sizes <= 1.0):
        counts = np.floor(sizes * data.n).astype(int)
        counts[-1] = data.n - counts[:-1].sum()
    else:
        counts = sizes.astype(int)
    if counts.sum() > data.n or np.any(counts < 0):
        raise InputError("split sizes exceed the data")
    perm = np.random.default_rng(seed).permutation(data.n)
    a, b = counts[0], counts[0] + counts[1]
    return Split(data.take(perm[:a]), data.take(perm[a:b]), data.take(perm[b:b + counts[2]]))


def _unpack(vec, K):
    return ToyModelParams(vec[: K - 1], vec[K - 1:])


def loss_and_grad(spec: ToyModelSpec, params: ToyModelParams, data: Dataset, loss: str):
    """Mean loss and its analytic gradient with respect to ``(gamma, beta)``."""
    K = spec.K
    d = spec.target
    y = np.asarray(data.y, dtype=np.int64)
    n = y.size
    theta = params.theta
    eta = _shift(spec, params, data.x, n)
    h = theta[np.newaxis, :] - eta[:, np.newaxis]
    g_theta = np.zeros((n, K - 1))

    if loss == "nll":
        rows = np.arange(n)
        has_up = y < K - 1
        has_lo = y > 0
        a = h[rows, np.minimum(y, K - 2)]
        b = h[rows, np.maximum(y - 1, 0)]
        Fa = np.where(has_up, d.cdf(a), 1.0)
        Fb = np.where(has_lo, d.cdf(b), 0.0)
        Sa = np.where(has_up, d.sf(a), 0.0)
        Sb = np.where(has_lo, d.sf(b), 1.0)
        mass = np.where(has_lo & (b > 0), Sb - Sa, Fa - Fb)
        fa = np.where(has_up, d.density(a), 0.0)
        fb = np.where(has_lo, d.density(b), 0.0)
        with np.errstate(divide="ignore"):
            value = float(np.mean(-np.log(mass)))
        safe = np.where(mass > 0, mass, np.inf)
        g_theta[rows[has_up], y[has_up]] -= fa[has_up] / safe[has_up]
        g_theta[rows[has_lo], y[has_lo] - 1] += fb[has_lo] / safe[has_lo]
        g_eta = (fa - fb) / safe
    else:
        F = d.cdf(h)
        ind = (np.arange(K - 1)[np.newaxis, :] >= y[:, np.newaxis]).astype(float)
        resid = F - ind
        value = float(np.mean(np.sum(resid ** 2, axis=1)) / (K - 1))
        g_theta = 2.0 * resid * d.density(h) / (K - 1)
        g_eta = -g_theta.sum(axis=1)

    gt = g_theta.mean(axis=0)
    # chain rule through the cumulative softplus
    tail = np.cumsum(gt[::-1])[::-1]
    g_gamma = np.empty(K - 1)
    g_gamma[0] = tail[0]
    g_gamma[1:] = special.expit(params.gamma[1:]) * tail[1:]
    if spec.kind == "si-ls":
        g_beta = np.asarray(data.x, dtype=float).T @ g_eta / n
    else:
        g_beta = np.zeros(0)
    return value, np.concatenate([g_gamma, g_beta])


def _empirical_gamma(spec: ToyModelSpec, y) -> np.ndarray:
    counts = np.bincount(np.asarray(y, dtype=np.int64), minlength=spec.K)
    if np.any(counts == 0):
        missing = np.nonzero(counts == 0)[0].tolist()
        raise DegenerateDataError(f"classes {missing} not observed in the training split")
    cum = np.cumsum(counts)[:-1] / counts.sum()
    return inverse_cumulative_softplus(spec.target.quantile(cum))


def initial_params(spec: ToyModelSpec, train_y, seed: int, beta_range: float = 0.1):
    gamma = _empirical_gamma(spec, train_y)
    if spec.kind == "si":
        return ToyModelParams(gamma, np.zeros(0))
    beta = np.random.default_rng(seed).uniform(-beta_range, beta_range, spec.P)
    return ToyModelParams(gamma, beta)


def train(data: Dataset, spec: ToyModelSpec, config: TrainConfig | None = None,
          valid: Dataset | None = None, init: ToyModelParams | None = None):
    """Fit ``(gamma, beta)``; returns ``(params, TrainTrace)``.

    Without ``valid`` a seeded ``val_fraction`` of ``data`` is held out; with
    ``val_fraction = 0`` the training loss doubles as selection criterion.
    """
    cfg = config or TrainConfig()
    if valid is None and cfg.val_fraction > 0:
        perm = np.random.default_rng(cfg.seed).permutation(data.n)
        n_val = int(round(cfg.val_fraction * data.n))
        valid, data = data.take(perm[:n_val]), data.take(perm[n_val:])
    if init is None:
        init = initial_params(spec, data.y, cfg.seed, cfg.beta_init_range)
    else:
        _empirical_gamma(spec, data.y)
    _check_params(spec, init)
    K = spec.K
    vec = np.concatenate([np.asarray(init.gamma, float), np.asarray(init.beta, float)])

    def objective(v, ds):
        return loss_and_grad(spec, _unpack(v, K), ds, cfg.loss)

    value, grad = objective(vec, data)
    if not np.isfinite(value):
        raise TrainingError("non-finite training loss at initialization")
    val_loss = objective(vec, valid)[0] if valid is not None and valid.n else value
    trace_train, trace_valid = [value], [val_loss]
    best_vec, best_val, best_epoch = vec.copy(), val_loss, 0
    step = cfg.learning_rate
    for epoch in range(1, cfg.epochs + 1):
        gg = float(grad @ grad)
        if gg == 0.0 or not np.isfinite(gg):
            break
        t = 2.0 * step
        while True:
            cand = vec - t * grad
            cval, cgrad = objective(cand, data)
            if np.isfinite(cval) and cval <= value - _ARMIJO * t * gg:
                break
            t *= 0.5
            if t < 1e-16:
                cand = None
                break
        if cand is None or cval >= value:
            break
        vec, value, grad, step = cand, cval, cgrad, t
        val_loss = objective(vec, valid)[0] if valid is not None and valid.n else value
        trace_train.append(value)
        trace_valid.append(val_loss)
        if val_loss < best_val:
            best_vec, best_val, best_epoch = vec.copy(), val_loss, epoch
    return _unpack(best_vec, K), TrainTrace(trace_train, trace_valid, best_epoch)


def member_seed(seed: int, index: int) -> int:
    """Deterministic per-member sub-seed derived from ``(seed, index)``."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


class MemberSet(NamedTuple):
    test_panel: MemberPanel
    valid_panel: MemberPanel
    params: list
    traces: list


def _panel(spec, params_list, data: Dataset, ids):
    cdfs = np.stack([predict(spec, p, data.x) if spec.kind == "si-ls"
                     else np.repeat(predict(spec, p)[np.newaxis], data.n, axis=0)
                     for p in params_list])
    return MemberPanel(OrderedSampleSpace.of_size(spec.K), ids, cdfs, Outcomes.exact(data.y))


def make_members(split: Split, spec: ToyModelSpec, config: TrainConfig | None, M: int,
                 seed: int = 0, subseeds=None) -> MemberSet:
    """Train ``M`` members that differ only in their initialization sub-seed."""
    if M < 2:
        raise InputError("an ensemble needs M >= 2 members")
    cfg = config or TrainConfig()
    seeds = list(subseeds) if subseeds is not None else [member_seed(seed, m) for m in range(M)]
    params, traces = [], []
    for m, s in enumerate(seeds):
        init = initial_params(spec, split.train.y, s, cfg.beta_init_range)
        try:
            p, tr = train(split.train, spec, cfg, valid=split.valid, init=init)
        except TrainingError as exc:
            raise type(exc)(f"member {m}: {exc}") from exc
        params.append(p)
        traces.append(tr)
    ids = [f"m{m + 1}" for m in range(M)]
    return MemberSet(_panel(spec, params, split.test, ids), _panel(spec, params, split.valid, ids),
                     params, traces)


class EpistemicBand(NamedTuple):
    hbar: np.ndarray
    h_lower: np.ndarray
    h_upper: np.ndarray
    cdf: np.ndarray
    cdf_lower: np.ndarray
    cdf_upper: np.ndarray


def epistemic_band(member_h, w, dist="logistic") -> EpistemicBand:
    """``F_Z(hbar -/+ 2 sd(h_m))`` with the member sd using divisor ``M - 1``."""
    H = np.asarray(member_h, dtype=float)
    if H.shape[0] < 2:
        raise UndefinedBandError("the epistemic band needs at least two members")
    w = as_simplex(w, H.shape[0])
    d = get_dist(dist)
    hbar = np.tensordot(w, H, axes=1)
    sd = H.std(axis=0, ddof=1)
    lo, hi = hbar - 2.0 * sd, hbar + 2.0 * sd
    return EpistemicBand(hbar, lo, hi, np.asarray(d.cdf(hbar)), np.asarray(d.cdf(lo)),
                         np.asarray(d.cdf(hi)))


def quantile_predict(hbar, dist, alpha: float, grid=None):
    """Conditional ``alpha``-quantile from a pooled transformation function.

    With ``grid`` the curve is inverted by linear interpolation. Without it
    ``hbar`` holds discrete values ``h(y_k)`` and the smallest class index
    with ``h(y_k) >= F_Z^{-1}(alpha)`` is returned (the last class if none).
    """
    if not 0.0 < alpha < 1.0:
        raise InputError("alpha must lie in (0, 1)")
    z = get_dist(dist).quantile(alpha)
    h = np.asarray(hbar, dtype=float)
    if grid is not None:
        return float(np.interp(z, h, np.asarray(grid, dtype=float)))
    hit = np.nonzero(h >= z)[0]
    return int(hit[0]) if hit.size else h.size


def structure_check_pairs(member_cdfs, ensemble_cdf, classes, dist="logistic") -> np.ndarray:
    """Member and ensemble CDFs at the observed class on the ``F_Z^{-1}`` scale.

    Returns an ``(M, n, 2)`` array of ``(member, ensemble)`` coordinates.
    """
    F = np.asarray(member_cdfs, dtype=float)
    E = np.asarray(ensemble_cdf, dtype=float)
    y = np.asarray(classes, dtype=np.int64)
    if F.ndim != 3 or E.shape != F.shape[1:] or y.shape != (F.shape[1],):
        raise ShapeError("expected (M, n, K) members, (n, K) ensemble and n classes")
    d = get_dist(dist)
    rows = np.arange(y.size)
    mem = np.asarray(d.quantile(np.clip(F[:, rows, y], CLAMP, 1.0 - CLAMP)))
    ens = np.asarray(d.quantile(np.clip(E[rows, y], CLAMP, 1.0 - CLAMP)))
    return np.stack([mem, np.broadcast_to(ens, mem.shape)], axis=-1)
