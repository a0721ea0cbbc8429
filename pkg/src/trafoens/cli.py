"""Command-line entry point.

Every file written gets a ``<out>.manifest.json`` sidecar recording the
command, its flags, seeds, input digests and the package version. Outputs
are deterministic functions of the manifest and are written atomically.

Exit codes: 0 success, 2 input or usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .dist import get_dist
from .errors import (
    DegenerateInputError,
    InputError,
    TrafoEnsError,
    UndefinedMetricError,
    ValidationError,
)
from .evalmetrics import (
    BootstrapConfig,
    auc,
    bootstrap_ci,
    calibration_bins,
    citl_and_slope,
    classify,
    exceedance,
    qwk,
)
from .io_utils import atomic_write, file_digest
from .minimax import verify_minimax_binary, verify_minimax_rps
from .panel import (
    dump_panel,
    format_float,
    load_panel,
    pdf_from_cdf,
    read_panel,
)
from .pooling import parse_pool_kind, pool, pool_continuous, pool_panel
from .scoring import check_score_kind, instance_scores
from .toytram import (
    PRESETS,
    Dataset,
    ToyModelSpec,
    TrainConfig,
    make_members,
    simulate_preset,
    split_dataset,
    structure_check_pairs,
)
from .weights import TuneConfig, equal_weights, tune_weights

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class UsageError(InputError):
    """Bad command-line arguments detected after parsing."""


# ---------------------------------------------------------------- plumbing


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dumps(obj) -> str:
    # repr floats are shortest round-trip strings, hence deterministic
    return json.dumps(_json_safe(obj), indent=1, allow_nan=False) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v) if math.isfinite(v) else ("nan" if v != v else str(float(v)))
    return str(v)


def _manifest(args, inputs) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    return {
        "command": args.command,
        "flags": _json_safe(flags),
        "seeds": {"seed": args.seed},
        "inputs": {p: file_digest(p) for p in sorted(set(inputs))},
        "version": __version__,
    }


def _write(args, path, text, inputs):
    """Write ``text`` to ``path`` (or stdout) with its manifest beside it."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    atomic_write(path, text)
    atomic_write(path + ".manifest.json", _dumps(_manifest(args, inputs)))


def _out_format(args, default="json"):
    if args.format:
        return args.format
    if args.out and args.out.endswith(".csv"):
        return "csv"
    return default


def _floats(text, name):
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated numbers") from None


def _read_json(path):
    try:
        with open(path, "rb") as fh:
            return json.loads(fh.read().decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from None


def _load_weights(spec, M, inputs):
    if spec in (None, "equal"):
        return equal_weights(M)
    inputs.append(spec)
    doc = _read_json(spec)
    w = doc["weights"] if isinstance(doc, dict) else doc
    w = np.asarray(w, dtype=float)
    if w.shape != (M,):
        raise ValidationError(f"{spec}: {w.size} weights for {M} members")
    return w


def _load_panel_arg(args, path, inputs):
    inputs.append(path)
    outcomes = getattr(args, "outcomes", None)
    if outcomes:
        inputs.append(outcomes)
    return read_panel(path, outcomes)


def _seed_note(args):
    print(f"seed: {args.seed}", file=sys.stderr)


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    inputs = [args.input]
    with open(args.input, "rb") as fh:
        text = fh.read()
    outcomes = None
    if args.outcomes:
        with open(args.outcomes, "rb") as fh:
            outcomes = fh.read()
    if args.outcomes:
        inputs.append(args.outcomes)
    fmt = "csv" if args.input.endswith(".csv") else "json"
    try:
        panel = load_panel(text, fmt, outcomes)
        violations, shape = [], [panel.M, panel.n, panel.K]
    except ValidationError as exc:
        violations = [v._asdict() for v in exc.violations] or [
            {"kind": "format", "member": None, "instance": None, "cls": None, "message": str(exc)}
        ]
        shape = None
    report = {"valid": not violations, "shape": shape, "violations": violations}
    _write(args, args.out, _dumps(report), inputs)
    for v in violations[:20]:
        print(f"violation: {v['message']}", file=sys.stderr)
    return EXIT_OK if not violations else EXIT_INPUT


def cmd_pool(args) -> int:
    inputs = []
    kind = parse_pool_kind(args.pool)
    panel = _load_panel_arg(args, args.input, inputs)
    w = _load_weights(args.weights, panel.M, inputs)
    ens = pool_panel(panel, w, kind)
    if _out_format(args) == "csv":
        body, outs = dump_panel(ens, "csv")
        if args.out:
            stem = args.out[:-4] if args.out.endswith(".csv") else args.out
            _write(args, stem + ".outcomes.csv", outs, inputs)
        _write(args, args.out, body, inputs)
    else:
        _write(args, args.out, dump_panel(ens, "json"), inputs)
    return EXIT_OK


def cmd_tune(args) -> int:
    _seed_note(args)
    inputs = []
    panel = _load_panel_arg(args, args.input, inputs)
    cfg = TuneConfig(score=args.score, pool=parse_pool_kind(args.pool),
                     max_iterations=args.max_iterations, restarts=args.restarts, seed=args.seed)
    res = tune_weights(panel, cfg)
    _write(args, args.out, _dumps({"weights": res.weights, "score": res.score}), inputs)
    return EXIT_OK


def _score_list(text):
    kinds = [s.strip() for s in str(text).split(",") if s.strip()]
    if not kinds:
        raise UsageError("at least one score kind is required")
    for k in kinds:
        if k not in ("nll", "rps", "brier"):
            raise UsageError(f"unknown score kind {k!r}")
    return kinds


def cmd_score(args) -> int:
    inputs = []
    panel = _load_panel_arg(args, args.input, inputs)
    kinds = _score_list(args.score)
    rows = []
    for kind in kinds:
        check_score_kind(kind, panel.K)
        for m, mid in enumerate(panel.member_ids):
            rows.append((mid, kind, float(np.mean(instance_scores(panel.cdfs[m], panel.outcomes,
                                                                  kind)))))
    if _out_format(args) == "csv":
        text = _csv_text(["member", "metric", "value"], rows)
    else:
        text = _dumps({"scores": [{"member": a, "metric": b, "value": c} for a, b, c in rows]})
    _write(args, args.out, text, inputs)
    return EXIT_OK


def _metric_fns(F, outcomes, kinds, K, calib_fit):
    """Per-model metric evaluators on instance index arrays."""
    fns = {}
    for kind in kinds:
        s = instance_scores(F, outcomes, kind)
        fns[kind] = (lambda s: lambda idx: float(np.mean(s[idx])))(s)
    if outcomes.all_exact:
        y = outcomes.upper
        pred = classify(F)
        hit = (pred == y).astype(float)
        fns["acc"] = lambda idx: float(np.mean(hit[idx]))
        if K == 2:
            risk = exceedance(F, 0)
            fns["auc"] = lambda idx: auc(risk[idx], y[idx] == 1)
        else:
            fns["qwk"] = lambda idx: qwk(pred[idx], y[idx], K)
        if calib_fit:
            for k in range(K - 1):
                r, e = exceedance(F, k), (y > k).astype(float)
                fns[f"citl[{k}]"] = _calib_fn(r, e, "citl")
                fns[f"slope[{k}]"] = _calib_fn(r, e, "slope")
    return fns


def _calib_fn(r, e, field):
    def fn(idx):
        try:
            return getattr(citl_and_slope(r[idx], e[idx]), field)
        except DegenerateInputError as exc:
            raise UndefinedMetricError(str(exc)) from None

    return fn


def cmd_evaluate(args) -> int:
    _seed_note(args)
    inputs = []
    kinds = _score_list(args.scores)
    panel = _load_panel_arg(args, args.input, inputs)
    w = _load_weights(args.weights, panel.M, inputs)
    for kind in kinds:
        check_score_kind(kind, panel.K)

    models = []
    for text in [p for p in (args.pools or "").split(",") if p.strip()]:
        kind = parse_pool_kind(text.strip())
        models.append((str(kind), pool(panel.cdfs, w, kind)))
    for path in args.ensemble or []:
        inputs.append(path)
        ens = read_panel(path)
        if ens.K != panel.K or ens.n != panel.n:
            raise ValidationError(f"{path}: ensemble does not match the member panel")
        if not np.array_equal(ens.outcomes.upper, panel.outcomes.upper):
            raise ValidationError(f"{path}: outcomes differ from the member panel")
        for m, mid in enumerate(ens.member_ids):
            models.append((mid, ens.cdfs[m]))
    if not models:
        raise UsageError("nothing to evaluate: give --pools and/or --ensemble")

    cfg = BootstrapConfig(B=args.B, seed=args.seed)
    rows = []
    member_fns = [_metric_fns(panel.cdfs[m], panel.outcomes, kinds, panel.K, args.calibration_fit)
                  for m in range(panel.M)]
    keep = np.nonzero(w > 0)[0]
    for name, F in models:
        for metric, fn in _metric_fns(F, panel.outcomes, kinds, panel.K,
                                      args.calibration_fit).items():
            rows.append(_row(name, metric, bootstrap_ci(fn, panel.n, cfg), cfg))
    # weighted mean of member metrics, resampled on the same stream
    for metric in member_fns[0]:
        def avg(idx, metric=metric):
            return float(sum(w[m] * member_fns[m][metric](idx) for m in keep))

        rows.append(_row("avg", metric, bootstrap_ci(avg, panel.n, cfg), cfg))

    if _out_format(args) == "csv":
        text = _csv_text(["model", "metric", "estimate", "ci_lo", "ci_hi", "B", "seed"],
                         [(r["model"], r["metric"], r["estimate"], r["ci"][0], r["ci"][1],
                           r["B"], r["seed"]) for r in rows])
    else:
        text = _dumps({"rows": rows})
    _write(args, args.out, text, inputs)

    if args.calibration_out:
        if not panel.outcomes.all_exact:
            raise UsageError("calibration bins need exact outcomes")
        y = panel.outcomes.upper
        brows = []
        for name, F in models:
            f = pdf_from_cdf(F)
            for k in range(panel.K):
                for b in calibration_bins(f[:, k], y == k):
                    brows.append((name, k, b.lo, b.hi, b.count, b.mean_pred, b.obs_rate,
                                  b.ci_lo, b.ci_hi))
        header = ["model", "class", "bin_lo", "bin_hi", "count", "mean_pred", "obs_rate",
                  "ci_lo", "ci_hi"]
        _write(args, args.calibration_out, _csv_text(header, brows), inputs)
    return EXIT_OK


def _row(model, metric, res, cfg):
    return {"model": model, "metric": metric, "estimate": res.estimate, "ci": [res.lo, res.hi],
            "B": cfg.B, "seed": cfg.seed}


def _members_from_json(doc):
    items = doc["members"] if isinstance(doc, dict) else doc
    out = []
    for it in items:
        if isinstance(it, dict):
            it = it["cdf"] if "cdf" in it else [1.0 - float(it["p"]), 1.0]
        if isinstance(it, (int, float)):
            it = [1.0 - float(it), 1.0]
        out.append([float(v) for v in it])
    try:
        return np.array(out, dtype=float)
    except ValueError:
        raise ValidationError("member CDFs differ in length") from None


def cmd_minimax_check(args) -> int:
    inputs = [args.members]
    F = _members_from_json(_read_json(args.members))
    if F.ndim != 2:
        raise ValidationError("members must be a list of CDFs or success probabilities")
    w = _load_weights(args.weights, F.shape[0], inputs)
    if args.score == "nll":
        if F.shape[1] != 2:
            raise UsageError("the NLL check is for binary outcomes")
        res = verify_minimax_binary(1.0 - F[:, 0], w, args.resolution or 1e-3)
        out = {"pass": res.passed, "scan_argmin": res.scan_argmin, "pool_value": res.pool_value,
               "max_regret": res.pool_max_regret, "scan_min": res.scan_min}
    else:
        res = verify_minimax_rps(F, w, args.resolution or 0.005)
        out = {"pass": res.passed, "scan_argmin": list(res.scan_argmin),
               "pool_value": res.pool_cdf, "max_regret": res.pool_max_regret,
               "scan_min": res.scan_min}
    _write(args, args.out, _dumps(out), inputs)
    return EXIT_OK


def _dataset_csv(data: Dataset) -> str:
    P = data.x.shape[1]
    header = [f"x_{j + 1}" for j in range(P)] + ["y"]
    rows = (list(map(float, xr)) + [int(yv)] for xr, yv in zip(data.x, data.y))
    return _csv_text(header, rows)


def _read_dataset(path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[-1] != "y":
            raise ValidationError(f"{path}: expected columns x_1..x_P,y")
        rows = list(reader)
    try:
        arr = np.array([[float(v) for v in r] for r in rows], dtype=float)
    except ValueError:
        raise ValidationError(f"{path}: non-numeric entry") from None
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValidationError(f"{path}: no data rows")
    y = arr[:, -1]
    if np.any(y != np.round(y)) or np.any(y < 0):
        raise ValidationError(f"{path}: y must hold 0-based class indices")
    return Dataset(arr[:, :-1], y.astype(np.int64))


def cmd_simulate(args) -> int:
    _seed_note(args)
    if args.preset not in PRESETS:
        raise UsageError(f"unknown preset {args.preset!r}")
    data = simulate_preset(args.preset, args.n, args.seed)
    if _out_format(args, "csv") == "json":
        text = _dumps({"x": data.x, "y": data.y})
    else:
        text = _dataset_csv(data)
    _write(args, args.out, text, [])
    return EXIT_OK


def cmd_train_toy(args) -> int:
    _seed_note(args)
    inputs = []
    if args.input:
        inputs.append(args.input)
        data = _read_dataset(args.input)
    else:
        data = simulate_preset(args.preset, args.n, args.seed)
    outs = [p for p in (args.out or "").split(",") if p]
    if len(outs) != 2:
        raise UsageError("--out takes two paths: panel.json,params.json")
    K = int(data.y.max()) + 1 if args.classes is None else args.classes
    P = data.x.shape[1] if args.spec == "si-ls" else 0
    spec = ToyModelSpec(args.spec, K, P, args.dist)
    split = split_dataset(data, _floats(args.split, "split"), args.seed)
    cfg = TrainConfig(loss=args.loss, learning_rate=args.learning_rate, epochs=args.epochs,
                      seed=args.seed)
    ms = make_members(split, spec, cfg, args.members, args.seed)
    _write(args, outs[0], dump_panel(ms.test_panel, "json"), inputs)
    params = {"spec": {"kind": spec.kind, "K": spec.K, "P": spec.P, "dist": spec.target.kind},
              "members": [{"gamma": p.gamma, "beta": p.beta} for p in ms.params]}
    _write(args, outs[1], _dumps(params), inputs)
    if args.valid_out:
        _write(args, args.valid_out, dump_panel(ms.valid_panel, "json"), inputs)
    return EXIT_OK


def figure2_table(locations, scales, grid, w=None, dist="logistic"):
    """Member and ensemble densities plus pointwise negative log-densities.

    Members are location-scale shifts of ``dist``. Returns ``(header, table)``
    with one row per grid point.
    """
    mu = np.asarray(locations, dtype=float)
    s = np.asarray(scales, dtype=float)
    if mu.size < 2 or mu.shape != s.shape:
        raise UsageError("need at least two members with one scale per location")
    if np.any(s <= 0):
        raise UsageError("scales must be positive")
    y = np.asarray(grid, dtype=float)
    d = get_dist(dist)
    M = mu.size
    w = equal_weights(M) if w is None else np.asarray(w, dtype=float)
    z = (y[np.newaxis, :] - mu[:, np.newaxis]) / s[:, np.newaxis]
    logf = np.asarray(d.log_density(z)) - np.log(s)[:, np.newaxis]
    logF = np.asarray(d.log_cdf(z))
    lw = np.log(w)[:, np.newaxis]

    def lse(a):
        top = a.max(axis=0)
        return top + np.log(np.sum(np.exp(a - top), axis=0))

    log_lin = lse(lw + logf)
    # d/dy exp(sum w log F) = Fbar * sum w f / F
    log_log = np.tensordot(w, logF, axes=1) + lse(lw + logf - logF)
    _, trafo = pool_continuous(z, w, d, y)
    log_trafo = np.log(trafo)
    avg_nld = -np.tensordot(w, logf, axes=1)
    cols = [y] + list(np.exp(logf)) + [np.exp(log_lin), np.exp(log_log), trafo,
                                        avg_nld, -log_lin, -log_log, -log_trafo]
    header = (["y"] + [f"member_{m + 1}" for m in range(M)]
              + ["lin", "log", "trafo", "avg_nld", "lin_nld", "log_nld", "trafo_nld"])
    return header, np.column_stack(cols)


def _grid(text):
    lo, hi, step = _floats(text, "grid")
    if step <= 0 or hi <= lo:
        raise UsageError("--grid is lo,hi,step with lo < hi and step > 0")
    return np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)


def cmd_figure2(args) -> int:
    mu = _floats(args.locations, "locations")
    s = _floats(args.scales, "scales")
    inputs = []
    w = None if args.weights in (None, "equal") else _load_weights(args.weights, len(mu), inputs)
    header, table = figure2_table(mu, s, _grid(args.grid), w, args.dist)
    if _out_format(args, "csv") == "json":
        text = _dumps({h: table[:, j] for j, h in enumerate(header)})
    else:
        text = _csv_text(header, table.tolist())
    _write(args, args.out, text, inputs)
    return EXIT_OK


def cmd_structure_check(args) -> int:
    inputs = []
    panel = _load_panel_arg(args, args.input, inputs)
    if args.ensemble:
        inputs.append(args.ensemble)
        E = read_panel(args.ensemble).cdfs[0]
        if E.shape != panel.cdfs.shape[1:]:
            raise ValidationError("ensemble does not match the member panel")
    else:
        w = _load_weights(args.weights, panel.M, inputs)
        E = pool(panel.cdfs, w, parse_pool_kind(f"trafo:{get_dist(args.dist).kind}"))
    pairs = structure_check_pairs(panel.cdfs, E, panel.outcomes.classes, args.dist)
    rows = [(panel.member_ids[m], i, pairs[m, i, 0], pairs[m, i, 1])
            for m in range(panel.M) for i in range(panel.n)]
    header = ["member", "instance", "member_h", "ensemble_h"]
    if _out_format(args, "csv") == "json":
        text = _dumps({"pairs": [dict(zip(header, r)) for r in rows]})
    else:
        text = _csv_text(header, rows)
    _write(args, args.out, text, inputs)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default from --out extension)")
    common.add_argument("--out", default=None, help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="trafoens",
                                description="Ensembles of probabilistic predictions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    def panel_args(sp):
        sp.add_argument("--in", dest="input", required=True, help="panel (.json or long .csv)")
        sp.add_argument("--outcomes", default=None, help="outcomes CSV for a CSV panel")

    sp = add("validate", cmd_validate, "check a panel against its invariants")
    panel_args(sp)

    sp = add("pool", cmd_pool, "pool member predictions into one ensemble")
    panel_args(sp)
    sp.add_argument("--pool", required=True, help="linear | log-cdf | log-pdf | trafo:<dist>")
    sp.add_argument("--weights", default="equal", help='weights JSON or "equal"')

    sp = add("tune", cmd_tune, "tune ensemble weights on validation predictions")
    panel_args(sp)
    sp.add_argument("--score", required=True, choices=("nll", "rps", "brier"))
    sp.add_argument("--pool", required=True)
    sp.add_argument("--restarts", type=int, default=5)
    sp.add_argument("--max-iterations", type=int, default=500)

    sp = add("score", cmd_score, "mean score of every member in a panel")
    panel_args(sp)
    sp.add_argument("--score", required=True, help="comma-separated: nll,rps,brier")

    sp = add("evaluate", cmd_evaluate, "bootstrap report for ensembles and the member average")
    panel_args(sp)
    sp.add_argument("--scores", required=True, help="comma-separated: nll,rps,brier")
    sp.add_argument("--pools", default=None, help="comma-separated pool kinds to build")
    sp.add_argument("--ensemble", action="append", help="pre-pooled panel (repeatable)")
    sp.add_argument("--weights", default="equal")
    sp.add_argument("--B", type=int, default=1000, help="bootstrap resamples")
    sp.add_argument("--calibration-out", default=None, help="CSV of calibration bins")
    sp.add_argument("--calibration-fit", action="store_true",
                    help="also report per-class CITL and calibration slope")

    sp = add("minimax-check", cmd_minimax_check, "brute-force minimax regret check")
    sp.add_argument("--score", required=True, choices=("nll", "rps"))
    sp.add_argument("--members", required=True, help="JSON with member CDFs or probabilities")
    sp.add_argument("--weights", default="equal")
    sp.add_argument("--resolution", type=float, default=None,
                    help="grid step (default 0.001 for nll, 0.005 for rps)")

    sp = add("simulate", cmd_simulate, "simulate tabular ordinal data")
    sp.add_argument("--preset", default="utk-sim")
    sp.add_argument("--n", type=int, required=True)

    sp = add("train-toy", cmd_train_toy, "train an ensemble of toy transformation models")
    sp.add_argument("--in", dest="input", default=None, help="data CSV (x_1..x_P,y)")
    sp.add_argument("--preset", default="utk-sim", help="simulate data when --in is absent")
    sp.add_argument("--n", type=int, default=5000)
    sp.add_argument("--spec", choices=("si", "si-ls"), default="si-ls")
    sp.add_argument("--loss", choices=("nll", "rps"), default="nll")
    sp.add_argument("--members", type=int, default=5)
    sp.add_argument("--classes", type=int, default=None)
    sp.add_argument("--dist", default="logistic")
    sp.add_argument("--split", default="0.6,0.2,0.2", help="train,valid,test fractions or sizes")
    sp.add_argument("--epochs", type=int, default=500)
    sp.add_argument("--learning-rate", type=float, default=0.1)
    sp.add_argument("--valid-out", default=None, help="also write the validation panel")

    sp = add("figure2", cmd_figure2, "density and negative log-density curves as CSV")
    sp.add_argument("--locations", default="-2,-1,0,1,2")
    sp.add_argument("--scales", default="0.8,0.9,1.0,1.1,1.2")
    sp.add_argument("--grid", default="-6,6,0.01", help="lo,hi,step")
    sp.add_argument("--weights", default="equal")
    sp.add_argument("--dist", default="logistic")

    sp = add("structure-check", cmd_structure_check,
             "member vs ensemble predictions on the latent scale")
    panel_args(sp)
    sp.add_argument("--ensemble", default=None, help="pooled panel (default: trafo pool)")
    sp.add_argument("--weights", default="equal")
    sp.add_argument("--dist", default="logistic")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (TrafoEnsError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
