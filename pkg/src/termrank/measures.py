"""Association measures over 2x2 co-occurrence tables and feature-matrix assembly.

Thirteen statistical criteria are supported. Twelve are scalar formulas of
the contingency counts; the thirteenth (``OccL``) is an ordering (occurrence
count, ties broken by log-likelihood) and is always rank-encoded when it
enters a feature matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    DegenerateDataset,
    EmptyInput,
    MarginViolation,
    UnknownMeasure,
    UnsupportedMeasure,
)


@dataclass(frozen=True)
class ContingencyTable:
    """Validated 2x2 co-occurrence counts for one candidate pair.

    ``n11`` joint occurrences, ``n_x``/``n_y`` marginal occurrences of the
    first/second word over pattern instances, ``n_total`` total instances.
    """

    n11: int
    n_x: int
    n_y: int
    n_total: int

    def __post_init__(self):
        n11, n_x, n_y, n = self.n11, self.n_x, self.n_y, self.n_total
        if min(n11, n_x, n_y, n) < 0:
            raise MarginViolation("counts must be non-negative")
        if n11 < 1:
            raise MarginViolation("joint count n11 must be at least 1")
        if n11 > n_x or n11 > n_y:
            raise MarginViolation(
                f"n11={n11} exceeds a margin (n_x={n_x}, n_y={n_y})"
            )
        if n_x + n_y - n11 > n:
            raise MarginViolation(
                f"margins overflow the total: n_x+n_y-n11={n_x + n_y - n11} > {n}"
            )

    @property
    def n12(self) -> int:
        return self.n_x - self.n11

    @property
    def n21(self) -> int:
        return self.n_y - self.n11

    @property
    def n22(self) -> int:
        return self.n_total - self.n_x - self.n_y + self.n11

    def cells(self) -> tuple[int, int, int, int]:
        return self.n11, self.n12, self.n21, self.n22

    def transposed(self) -> "ContingencyTable":
        """Swap the roles of the two words."""
        return ContingencyTable(self.n11, self.n_y, self.n_x, self.n_total)


def contingency(n11: int, n_x: int, n_y: int, n_total: int) -> ContingencyTable:
    """Build a validated contingency table from the four observed counts."""
    return ContingencyTable(n11, n_x, n_y, n_total)


class MeasureId(str, Enum):
    """The 13 supported measures, in feature-column order."""

    MI = "MI"
    MI3 = "MI3"
    Dice = "Dice"
    L = "L"
    OccL = "OccL"
    Ass = "Ass"
    SeSc = "SeSc"
    J = "J"
    Conv = "Conv"
    LC = "LC"
    CM = "CM"
    Khi2 = "Khi2"
    Ttest = "Ttest"


MEASURE_ORDER: tuple[MeasureId, ...] = tuple(MeasureId)
MEASURE_NAMES: tuple[str, ...] = tuple(m.value for m in MEASURE_ORDER)
N_MEASURES = len(MEASURE_ORDER)
OCCL_COLUMN = MEASURE_ORDER.index(MeasureId.OccL)
LOGLIK_COLUMN = MEASURE_ORDER.index(MeasureId.L)


def measure_from_name(name: str) -> MeasureId:
    try:
        return MeasureId(name)
    except ValueError:
        raise UnknownMeasure(
            f"unknown measure {name!r}; expected one of {', '.join(MEASURE_NAMES)}"
        ) from None


def _nz(count: float) -> float:
    # Smoothing rule: a zero cell count appearing in a denominator is
    # replaced by 0.5 (denominator only).
    return count if count != 0 else 0.5


def _mi(t: ContingencyTable) -> float:
    return math.log2(t.n11 * t.n_total / (t.n_x * t.n_y))


def _mi3(t: ContingencyTable) -> float:
    return math.log2(t.n11 ** 3 * t.n_total / (t.n_x * t.n_y))


def _dice(t: ContingencyTable) -> float:
    return 2 * t.n11 / (t.n_x + t.n_y)


def _loglik(t: ContingencyTable) -> float:
    # Dunning's G^2 over the four cells; zero cells contribute nothing.
    n = t.n_total
    rows = (t.n_x, n - t.n_x)
    cols = (t.n_y, n - t.n_y)
    cells = ((t.n11, t.n12), (t.n21, t.n22))
    total = 0.0
    for i in range(2):
        for j in range(2):
            c = cells[i][j]
            if c > 0:
                total += c * math.log(c * n / (rows[i] * cols[j]))
    return 2.0 * total


def _ass(t: ContingencyTable) -> float:
    return t.n11 ** 2 / (t.n_x * t.n_y)


def _sesc(t: ContingencyTable) -> float:
    return t.n11 / _nz(t.n12)


def _jmeasure(t: ContingencyTable) -> float:
    n = t.n_total
    p_x = t.n_x / n
    p_y = t.n_y / n
    p_y_given_x = t.n11 / t.n_x
    total = p_y_given_x * math.log2(p_y_given_x / p_y)
    p_noty_given_x = t.n12 / t.n_x
    if p_noty_given_x > 0:
        total += p_noty_given_x * math.log2(p_noty_given_x / (1.0 - p_y))
    return p_x * total


def _conviction(t: ContingencyTable) -> float:
    return t.n_x * (t.n_total - t.n_y) / (t.n_total * _nz(t.n12))


def _least_contradiction(t: ContingencyTable) -> float:
    return (t.n11 - t.n12) / t.n_y


def _odds_multiplier(t: ContingencyTable) -> float:
    return t.n11 * (t.n_total - t.n_y) / (t.n_y * _nz(t.n12))


def _chi2(t: ContingencyTable) -> float:
    n = t.n_total
    num = n * (t.n11 * t.n22 - t.n12 * t.n21) ** 2
    den = _nz(t.n_x) * _nz(n - t.n_x) * _nz(t.n_y) * _nz(n - t.n_y)
    return num / den


def _ttest(t: ContingencyTable) -> float:
    n = t.n_total
    p_xy = t.n11 / n
    return (p_xy - (t.n_x / n) * (t.n_y / n)) / math.sqrt(p_xy / n)


_FORMULAS = {
    MeasureId.MI: _mi,
    MeasureId.MI3: _mi3,
    MeasureId.Dice: _dice,
    MeasureId.L: _loglik,
    MeasureId.Ass: _ass,
    MeasureId.SeSc: _sesc,
    MeasureId.J: _jmeasure,
    MeasureId.Conv: _conviction,
    MeasureId.LC: _least_contradiction,
    MeasureId.CM: _odds_multiplier,
    MeasureId.Khi2: _chi2,
    MeasureId.Ttest: _ttest,
}


def compute_measure(m: MeasureId | str, t: ContingencyTable) -> float:
    """Evaluate one scalar measure on a contingency table.

    ``OccL`` is rejected: it denotes an ordering, not a formula (see
    :func:`occl_compare`).
    """
    m = measure_from_name(m) if not isinstance(m, MeasureId) else m
    if m is MeasureId.OccL:
        raise UnsupportedMeasure("OccL is an ordering; use occl_compare / rank encoding")
    return _FORMULAS[m](t)


def occl_compare(
    a: tuple[ContingencyTable, float], b: tuple[ContingencyTable, float]
) -> int:
    """Order two candidates by occurrence count, ties broken by log-likelihood.

    Returns -1 if ``a`` ranks first, 1 if ``b`` ranks first, 0 on equal keys.
    """
    key_a = (a[0].n11, a[1])
    key_b = (b[0].n11, b[1])
    if key_a > key_b:
        return -1
    if key_a < key_b:
        return 1
    return 0


def raw_measure_vector(t: ContingencyTable) -> np.ndarray:
    """All 13 raw column values for one candidate.

    The ``OccL`` column stores the occurrence count itself; rank encoding
    happens at normalization time, with ties broken via the ``L`` column.
    """
    out = np.empty(N_MEASURES)
    for j, m in enumerate(MEASURE_ORDER):
        out[j] = t.n11 if m is MeasureId.OccL else _FORMULAS[m](t)
    return out


def _midrank_encode(sorted_less: np.ndarray, sorted_leq: np.ndarray, m: int) -> np.ndarray:
    # Mid-rank of each query among m sorted reference values, mapped to [0,1].
    rank = (sorted_less + sorted_leq - 1) / 2.0
    return np.clip(rank / (m - 1), 0.0, 1.0)


class Normalization:
    """Per-column normalization fitted on a training matrix.

    Modes: ``minmax`` (affine map of the observed range, clamped on unseen
    data) or ``rank`` (mid-rank against the training values). A column whose
    training values are all equal maps everything to 0.5. The ``OccL``
    column, when present, is always rank-encoded on (count, log-likelihood)
    keys regardless of mode.
    """

    def __init__(self, mode: str, columns: list[dict]):
        if mode not in ("minmax", "rank"):
            raise ValueError(f"unknown normalization mode {mode!r}")
        self.mode = mode
        self.columns = columns

    @classmethod
    def fit(
        cls,
        raw: np.ndarray,
        mode: str = "minmax",
        occl_col: int | None = None,
        tie_col: int | None = None,
    ) -> "Normalization":
        raw = np.asarray(raw, dtype=float)
        if raw.ndim != 2 or raw.shape[0] == 0:
            raise EmptyInput("normalization needs a non-empty 2-D matrix")
        columns: list[dict] = []
        for j in range(raw.shape[1]):
            col = raw[:, j]
            if occl_col is not None and j == occl_col:
                tie = raw[:, tie_col] if tie_col is not None else np.zeros_like(col)
                order = np.lexsort((tie, col))
                occ_s, tie_s = col[order], tie[order]
                if occ_s[0] == occ_s[-1] and tie_s[0] == tie_s[-1]:
                    columns.append({"kind": "const"})
                else:
                    columns.append(
                        {
                            "kind": "occl",
                            "tie_col": int(tie_col) if tie_col is not None else None,
                            "occ": occ_s.tolist(),
                            "tie": tie_s.tolist(),
                        }
                    )
            elif col.min() == col.max():
                columns.append({"kind": "const"})
            elif mode == "minmax":
                columns.append({"kind": "minmax", "lo": float(col.min()), "hi": float(col.max())})
            else:
                columns.append({"kind": "rank", "values": np.sort(col).tolist()})
        return cls(mode, columns)

    def apply(self, raw: np.ndarray) -> np.ndarray:
        raw = np.atleast_2d(np.asarray(raw, dtype=float))
        if raw.shape[1] != len(self.columns):
            raise DegenerateDataset(
                f"matrix has {raw.shape[1]} columns, normalizer expects {len(self.columns)}"
            )
        out = np.empty_like(raw)
        for j, spec in enumerate(self.columns):
            col = raw[:, j]
            kind = spec["kind"]
            if kind == "const":
                out[:, j] = 0.5
            elif kind == "minmax":
                lo, hi = spec["lo"], spec["hi"]
                out[:, j] = np.clip((col - lo) / (hi - lo), 0.0, 1.0)
            elif kind == "rank":
                vals = np.asarray(spec["values"])
                less = np.searchsorted(vals, col, side="left")
                leq = np.searchsorted(vals, col, side="right")
                out[:, j] = _midrank_encode(less, leq, len(vals))
            elif kind == "occl":
                occ_s = np.asarray(spec["occ"])
                tie_s = np.asarray(spec["tie"])
                tc = spec["tie_col"]
                tie_q = raw[:, tc] if tc is not None else np.zeros_like(col)
                m = len(occ_s)
                less = np.empty(len(col))
                leq = np.empty(len(col))
                for i, (o, l) in enumerate(zip(col, tie_q)):
                    blk_lo = np.searchsorted(occ_s, o, side="left")
                    blk_hi = np.searchsorted(occ_s, o, side="right")
                    less[i] = blk_lo + np.searchsorted(tie_s[blk_lo:blk_hi], l, side="left")
                    leq[i] = blk_lo + np.searchsorted(tie_s[blk_lo:blk_hi], l, side="right")
                out[:, j] = _midrank_encode(less, leq, m)
            else:
                raise ValueError(f"corrupt normalizer column kind {kind!r}")
        return out

    def to_dict(self) -> dict:
        return {"mode": self.mode, "columns": self.columns}

    @classmethod
    def from_dict(cls, d: dict) -> "Normalization":
        return cls(d["mode"], d["columns"])


def occl_rank_scores(raw: np.ndarray) -> np.ndarray:
    """Mid-rank [0,1] encoding of the OccL ordering within the given rows.

    Uses the OccL (count) column with the log-likelihood column as
    tie-breaker; higher is better.
    """
    norm = Normalization.fit(
        np.asarray(raw, dtype=float), "rank", occl_col=OCCL_COLUMN, tie_col=LOGLIK_COLUMN
    )
    return norm.apply(raw)[:, OCCL_COLUMN]


@dataclass
class FeatureMatrix:
    """Candidate ids, raw measure values, normalized features, optional labels."""

    ids: list[str]
    raw: np.ndarray
    labels: np.ndarray | None
    mode: str
    normalization: Normalization
    features: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.raw.shape[0]

    @property
    def d(self) -> int:
        return self.raw.shape[1]

    @classmethod
    def from_raw(
        cls,
        ids,
        raw: np.ndarray,
        labels=None,
        mode: str = "minmax",
        occl_col="auto",
    ) -> "FeatureMatrix":
        raw = np.asarray(raw, dtype=float)
        ids = [str(i) for i in ids]
        if raw.ndim != 2 or len(ids) != raw.shape[0]:
            raise DegenerateDataset("ids and raw matrix row counts differ")
        if len(ids) == 0:
            raise EmptyInput("no candidates")
        if len(ids) == 1:
            raise DegenerateDataset("need at least 2 candidates")
        if labels is not None:
            labels = np.asarray(labels, dtype=int)
            if labels.shape != (raw.shape[0],):
                raise DegenerateDataset("labels length does not match candidates")
            if not np.all(np.isin(labels, (-1, 1))):
                raise DegenerateDataset("labels must be -1 or +1")
        if occl_col == "auto":
            occl_col = OCCL_COLUMN if raw.shape[1] == N_MEASURES else None
        tie_col = LOGLIK_COLUMN if occl_col is not None else None
        norm = Normalization.fit(raw, mode, occl_col=occl_col, tie_col=tie_col)
        return cls(ids, raw, labels, mode, norm, norm.apply(raw))

    @classmethod
    def from_tables(cls, candidates, mode: str = "minmax") -> "FeatureMatrix":
        """Assemble the 13-column matrix from (id, table[, label]) triples."""
        candidates = list(candidates)
        if not candidates:
            raise EmptyInput("no candidates")
        ids, rows, labels = [], [], []
        any_label = False
        for item in candidates:
            cid, table = item[0], item[1]
            label = item[2] if len(item) > 2 else None
            ids.append(str(cid))
            rows.append(raw_measure_vector(table))
            labels.append(label)
            any_label = any_label or label is not None
        if any_label and any(l is None for l in labels):
            raise DegenerateDataset("either all candidates carry a label or none do")
        return cls.from_raw(
            ids,
            np.vstack(rows),
            np.asarray(labels, dtype=int) if any_label else None,
            mode=mode,
        )

    def subset(self, indices) -> "FeatureMatrix":
        """Slice candidates and refit normalization on the slice."""
        indices = np.asarray(indices)
        return FeatureMatrix.from_raw(
            [self.ids[i] for i in indices],
            self.raw[indices],
            None if self.labels is None else self.labels[indices],
            mode=self.mode,
            occl_col="auto",
        )


def build_feature_matrix(candidates, mode: str = "minmax") -> FeatureMatrix:
    """Alias for :meth:`FeatureMatrix.from_tables`."""
    return FeatureMatrix.from_tables(candidates, mode=mode)
