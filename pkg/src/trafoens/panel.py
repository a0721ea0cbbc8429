"""Member predictions, outcomes and transformation curves, plus file I/O.

A :class:`MemberPanel` stores the predicted CDFs of ``M`` members for ``n``
instances over ``K`` ordered classes as an ``(M, n, K)`` array, together
with one observation per instance. Class indices are 0-based everywhere.

Observations are stored as half-open index intervals ``(lower, upper]``:
an exact observation of class ``k`` is ``(k - 1, k]`` and ``lower = -1``
stands for minus infinity, so ``F(y_lower)`` is read as zero.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ShapeError, ValidationError

__all__ = [
    "OrderedSampleSpace",
    "Interval",
    "Outcomes",
    "MemberPanel",
    "ContinuousCurve",
    "CurveSet",
    "Violation",
    "pdf_from_cdf",
    "validate_cdfs",
    "validate_panel",
    "load_panel",
    "dump_panel",
    "read_panel",
    "write_panel",
    "load_curves",
    "dump_curves",
]

MONOTONE_TOL = 1e-12
LAST_TOL = 1e-6


class Interval(NamedTuple):
    """Censored observation ``(y_lower, y_upper]``; ``lower=None`` is minus infinity."""

    lower: int | None
    upper: int


class Violation(NamedTuple):
    kind: str
    member: int | None
    instance: int | None
    cls: int | None
    message: str

    def __str__(self):
        return self.message


@dataclass(frozen=True)
class OrderedSampleSpace:
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) < 2:
            raise ValidationError("sample space needs at least two classes")
        if len(set(labels)) != len(labels):
            raise ValidationError("class labels must be distinct")
        object.__setattr__(self, "labels", labels)

    @property
    def K(self) -> int:
        return len(self.labels)

    @classmethod
    def of_size(cls, K: int) -> "OrderedSampleSpace":
        return cls(tuple(str(k) for k in range(K)))


def _readonly(a):
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Outcomes:
    """Observed outcomes for ``n`` instances."""

    lower: np.ndarray
    upper: np.ndarray
    censored: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.int64)
        upper = np.asarray(self.upper, dtype=np.int64)
        censored = np.asarray(self.censored, dtype=bool)
        if not (lower.shape == upper.shape == censored.shape) or lower.ndim != 1:
            raise ShapeError("outcome arrays must be one-dimensional and of equal length")
        object.__setattr__(self, "lower", _readonly(lower))
        object.__setattr__(self, "upper", _readonly(upper))
        object.__setattr__(self, "censored", _readonly(censored))

    @classmethod
    def exact(cls, classes) -> "Outcomes":
        y = np.asarray(classes, dtype=np.int64).reshape(-1)
        return cls(y - 1, y, np.zeros(y.shape, dtype=bool))

    @classmethod
    def from_list(cls, items: Sequence) -> "Outcomes":
        """Build from ints (exact) and :class:`Interval` or ``(lower, upper)`` pairs."""
        lower, upper, cens = [], [], []
        for item in items:
            if isinstance(item, (tuple, list, Interval)):
                lo, up = item
                lower.append(-1 if lo is None else int(lo))
                upper.append(int(up))
                cens.append(True)
            else:
                k = int(item)
                lower.append(k - 1)
                upper.append(k)
                cens.append(False)
        return cls(np.array(lower, dtype=np.int64), np.array(upper, dtype=np.int64),
                   np.array(cens, dtype=bool))

    @property
    def n(self) -> int:
        return int(self.upper.shape[0])

    @property
    def all_exact(self) -> bool:
        return not bool(self.censored.any())

    @property
    def classes(self) -> np.ndarray:
        """Exact class indices; raises if any observation is censored."""
        from .errors import UnsupportedObservationError

        if not self.all_exact:
            raise UnsupportedObservationError("censored observations have no single class")
        return self.upper

    def take(self, idx) -> "Outcomes":
        return Outcomes(self.lower[idx], self.upper[idx], self.censored[idx])

    def to_list(self) -> list:
        out = []
        for lo, up, c in zip(self.lower.tolist(), self.upper.tolist(), self.censored.tolist()):
            out.append(Interval(None if lo < 0 else lo, up) if c else up)
        return out


@dataclass(frozen=True)
class MemberPanel:
    space: OrderedSampleSpace
    member_ids: tuple
    cdfs: np.ndarray
    outcomes: Outcomes

    def __post_init__(self):
        cdfs = np.asarray(self.cdfs, dtype=float)
        if cdfs.ndim == 2:
            cdfs = cdfs[np.newaxis]
        if cdfs.ndim != 3:
            raise ShapeError("cdfs must have shape (M, n, K)")
        M, n, K = cdfs.shape
        ids = tuple(str(i) for i in self.member_ids)
        if len(ids) != M:
            raise ShapeError(f"{len(ids)} member ids for {M} members")
        if K != self.space.K:
            raise ShapeError(f"cdfs have {K} classes, sample space has {self.space.K}")
        if self.outcomes.n != n:
            raise ShapeError(f"{self.outcomes.n} outcomes for {n} instances")
        object.__setattr__(self, "member_ids", ids)
        object.__setattr__(self, "cdfs", _readonly(cdfs))

    @property
    def M(self) -> int:
        return self.cdfs.shape[0]

    @property
    def n(self) -> int:
        return self.cdfs.shape[1]

    @property
    def K(self) -> int:
        return self.cdfs.shape[2]

    def take(self, idx) -> "MemberPanel":
        """Panel restricted (or resampled) to instance indices ``idx``."""
        idx = np.asarray(idx)
        return MemberPanel(self.space, self.member_ids, self.cdfs[:, idx, :],
                           self.outcomes.take(idx))

    def with_cdfs(self, cdfs, member_ids) -> "MemberPanel":
        return MemberPanel(self.space, tuple(member_ids), cdfs, self.outcomes)


def pdf_from_cdf(cdf):
    """Class probabilities from a CDF by first differences along the last axis.

    Rounding residue in ``[-1e-12, 0)`` is clipped to zero and the affected
    rows renormalized.
    """
    F = np.asarray(cdf, dtype=float)
    if F.shape[-1] < 2:
        raise ShapeError("a discrete CDF needs K >= 2 classes")
    f = np.diff(F, axis=-1, prepend=0.0)
    tiny = (f < 0.0) & (f >= -MONOTONE_TOL)
    if np.any(tiny):
        f = np.where(tiny, 0.0, f)
        rows = np.any(tiny, axis=-1, keepdims=True)
        f = np.where(rows, f / f.sum(axis=-1, keepdims=True), f)
    return f


def validate_cdfs(cdfs, *, last_tol: float = LAST_TOL) -> list[Violation]:
    """Check every CDF row in an ``(M, n, K)`` (or ``(n, K)``) array."""
    F = np.asarray(cdfs, dtype=float)
    if F.ndim == 2:
        F = F[np.newaxis]
    out: list[Violation] = []
    bad_range = ~np.isfinite(F) | (F < 0.0) | (F > 1.0)
    for m, i, k in zip(*np.nonzero(bad_range)):
        out.append(Violation("range", int(m), int(i), int(k),
                             f"value {F[m, i, k]!r} outside [0, 1] "
                             f"(member {m}, instance {i}, class {k})"))
    drops = np.diff(F, axis=-1) < -MONOTONE_TOL
    for m, i, k in zip(*np.nonzero(drops)):
        out.append(Violation("non-monotone", int(m), int(i), int(k) + 1,
                             f"non-monotone CDF at member {m}, instance {i}, class {k + 1}"))
    last_off = np.abs(F[..., -1] - 1.0) > last_tol
    for m, i in zip(*np.nonzero(last_off)):
        out.append(Violation("last-not-one", int(m), int(i), F.shape[-1] - 1,
                             f"F(y_K) = {F[m, i, -1]!r} differs from 1 "
                             f"(member {m}, instance {i})"))
    return out


def _validate_outcomes(outcomes: Outcomes, K: int) -> list[Violation]:
    out = []
    lo, up = outcomes.lower, outcomes.upper
    for i in np.nonzero((up < 0) | (up >= K))[0]:
        out.append(Violation("outcome-range", None, int(i), int(up[i]),
                             f"outcome upper index {up[i]} outside 0..{K - 1} (instance {i})"))
    for i in np.nonzero((lo < -1) | (lo >= up))[0]:
        out.append(Violation("interval-order", None, int(i), int(lo[i]),
                             f"interval lower {lo[i]} not below upper {up[i]} (instance {i})"))
    return out


def validate_panel(panel: MemberPanel) -> list[Violation]:
    """All invariant violations with coordinates; empty iff the panel is valid."""
    return validate_cdfs(panel.cdfs) + _validate_outcomes(panel.outcomes, panel.K)


def _finalize(space, ids, cdfs, outcomes) -> MemberPanel:
    cdfs = np.asarray(cdfs, dtype=float)
    last = cdfs[..., -1:]
    close = np.abs(last - 1.0) <= LAST_TOL
    cdfs = np.where(close & (last > 0), cdfs / np.where(close, last, 1.0), cdfs)
    panel = MemberPanel(space, ids, cdfs, outcomes)
    problems = validate_panel(panel)
    if problems:
        head = "; ".join(str(v) for v in problems[:5])
        more = f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""
        raise ValidationError(f"invalid panel: {head}{more}", problems)
    return panel


def _text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _panel_from_json(doc) -> MemberPanel:
    try:
        classes = doc["classes"]
        members = doc["members"]
        raw_outcomes = doc["outcomes"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"panel JSON missing field {exc}") from None
    space = OrderedSampleSpace(tuple(classes))
    if not members:
        raise ValidationError("panel needs at least one member")
    ids = [m["id"] for m in members]
    try:
        cdfs = np.array([m["cdf"] for m in members], dtype=float)
    except ValueError:
        raise ValidationError("member cdf arrays are ragged") from None
    if cdfs.ndim != 3 or cdfs.shape[2] != space.K:
        raise ValidationError(f"cdf arrays must be n x {space.K} for every member")
    n = cdfs.shape[1]
    if n < 1:
        raise ValidationError("panel needs at least one instance")
    if len(raw_outcomes) != n:
        raise ValidationError(f"missing outcome: {len(raw_outcomes)} outcomes for {n} instances")
    items = []
    for i, o in enumerate(raw_outcomes):
        if o is None:
            raise ValidationError(f"missing outcome for instance {i}")
        if isinstance(o, dict):
            if "upper" not in o or o["upper"] is None:
                raise ValidationError(f"interval outcome for instance {i} lacks an upper index")
            items.append(Interval(o.get("lower"), int(o["upper"])))
        else:
            items.append(int(o))
    return _finalize(space, ids, cdfs, Outcomes.from_list(items))


def _panel_from_csv(text: str, outcomes_text: str) -> MemberPanel:
    rows = list(csv.DictReader(io.StringIO(text)))
    need = {"member_id", "instance_id", "class_index", "cdf_value"}
    if not rows or not need <= set(rows[0]):
        raise ValidationError(f"CSV panel needs header {','.join(sorted(need))}")
    members: dict[str, int] = {}
    instances: dict[str, int] = {}
    K = 0
    for r in rows:
        members.setdefault(r["member_id"], len(members))
        instances.setdefault(r["instance_id"], len(instances))
        K = max(K, int(r["class_index"]) + 1)
    cdfs = np.full((len(members), len(instances), K), np.nan)
    for r in rows:
        cdfs[members[r["member_id"]], instances[r["instance_id"]], int(r["class_index"])] = float(
            r["cdf_value"]
        )
    if np.isnan(cdfs).any():
        m, i, k = (int(v[0]) for v in np.nonzero(np.isnan(cdfs)))
        raise ValidationError(f"missing cdf value (member {m}, instance {i}, class {k})")

    orows = list(csv.DictReader(io.StringIO(outcomes_text)))
    by_id = {}
    for r in orows:
        exact = (r.get("outcome_index") or "").strip()
        if exact:
            by_id[r["instance_id"]] = int(exact)
        elif (r.get("upper") or "").strip():
            lo = (r.get("lower") or "").strip()
            by_id[r["instance_id"]] = Interval(int(lo) if lo else None, int(r["upper"]))
    items = []
    for iid in instances:
        if iid not in by_id:
            raise ValidationError(f"missing outcome for instance {iid!r}")
        items.append(by_id[iid])
    space = OrderedSampleSpace.of_size(K)
    return _finalize(space, list(members), cdfs, Outcomes.from_list(items))


def load_panel(source, format: str = "json", outcomes=None) -> MemberPanel:
    """Parse a panel from bytes, text or a file object.

    CSV panels are in long form and need a second ``outcomes`` source.
    Raises :class:`ValidationError` listing every violated invariant.
    """
    if format == "json":
        try:
            doc = json.loads(_text(source))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON: {exc}") from None
        return _panel_from_json(doc)
    if format == "csv":
        if outcomes is None:
            raise ValidationError("CSV panels need a separate outcomes file")
        return _panel_from_csv(_text(source), _text(outcomes))
    raise ValidationError(f"unknown panel format {format!r}")


def _outcome_json(item):
    if isinstance(item, Interval):
        return {"lower": item.lower, "upper": item.upper}
    return int(item)


def panel_to_dict(panel: MemberPanel) -> dict:
    return {
        "classes": list(panel.space.labels),
        "members": [
            {"id": mid, "cdf": panel.cdfs[m].tolist()} for m, mid in enumerate(panel.member_ids)
        ],
        "outcomes": [_outcome_json(o) for o in panel.outcomes.to_list()],
    }


def dump_panel(panel: MemberPanel, format: str = "json"):
    """Serialize losslessly; CSV returns ``(panel_csv, outcomes_csv)``."""
    if format == "json":
        return json.dumps(panel_to_dict(panel), separators=(",", ":")) + "\n"
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["member_id", "instance_id", "class_index", "cdf_value"])
        for m, mid in enumerate(panel.member_ids):
            for i in range(panel.n):
                for k in range(panel.K):
                    w.writerow([mid, i, k, format_float(panel.cdfs[m, i, k])])
        obuf = io.StringIO()
        ow = csv.writer(obuf, lineterminator="\n")
        ow.writerow(["instance_id", "outcome_index", "lower", "upper"])
        for i, o in enumerate(panel.outcomes.to_list()):
            if isinstance(o, Interval):
                ow.writerow([i, "", "" if o.lower is None else o.lower, o.upper])
            else:
                ow.writerow([i, o, "", ""])
        return buf.getvalue(), obuf.getvalue()
    raise ValidationError(f"unknown panel format {format!r}")


def format_float(x: float) -> str:
    """Fixed 17-significant-digit rendering used for all CSV output."""
    return format(float(x), ".17g")


def read_panel(path, outcomes_path=None) -> MemberPanel:
    fmt = "csv" if str(path).endswith(".csv") else "json"
    with open(path, "rb") as fh:
        if fmt == "csv":
            if outcomes_path is None:
                raise ValidationError("CSV panels need --outcomes")
            with open(outcomes_path, "rb") as oh:
                return load_panel(fh, "csv", oh)
        return load_panel(fh, "json")


def write_panel(panel: MemberPanel, path) -> None:
    from .io_utils import atomic_write

    atomic_write(path, dump_panel(panel, "json"))


@dataclass(frozen=True)
class ContinuousCurve:
    """Strictly increasing transformation function sampled on a grid."""

    grid: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        h = np.asarray(self.h, dtype=float)
        if grid.ndim != 1 or grid.shape != h.shape or grid.size < 2:
            raise ShapeError("grid and h must be equal-length vectors with >= 2 points")
        if not np.all(np.diff(grid) > 0):
            raise ValidationError("grid must be strictly increasing")
        if not np.all(np.isfinite(h)) or not np.all(np.diff(h) > 0):
            raise ValidationError("transformation function must be strictly increasing")
        object.__setattr__(self, "grid", _readonly(grid))
        object.__setattr__(self, "h", _readonly(h))


@dataclass(frozen=True)
class CurveSet:
    """Member curves sharing one grid."""

    grid: np.ndarray
    member_ids: tuple
    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.atleast_2d(np.asarray(self.h, dtype=float))
        for row in h:
            ContinuousCurve(self.grid, row)
        if len(self.member_ids) != h.shape[0]:
            raise ShapeError("one id per member curve required")
        object.__setattr__(self, "grid", _readonly(np.asarray(self.grid, dtype=float)))
        object.__setattr__(self, "member_ids", tuple(str(i) for i in self.member_ids))
        object.__setattr__(self, "h", _readonly(h))

    def curves(self) -> list[ContinuousCurve]:
        return [ContinuousCurve(self.grid, row) for row in self.h]


def load_curves(source) -> CurveSet:
    doc = json.loads(_text(source))
    try:
        grid = doc["grid"]
        members = doc["members"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"curves JSON missing field {exc}") from None
    lengths = {len(m["h"]) for m in members}
    if lengths != {len(grid)}:
        raise ShapeError("every member curve must match the grid length")
    return CurveSet(grid, tuple(m["id"] for m in members), [m["h"] for m in members])


def dump_curves(curves: CurveSet) -> str:
    doc = {
        "grid": curves.grid.tolist(),
        "members": [{"id": i, "h": row.tolist()} for i, row in zip(curves.member_ids, curves.h)],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"
