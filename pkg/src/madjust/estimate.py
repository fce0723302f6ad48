"""Effect estimation from discrete data with missing cells and selection.

Data live in a :class:`Dataset`: one integer code array per column, with
``-1`` marking NA. All probabilities are empirical frequencies over the
rows where the relevant partially observed variables are present
(the *manifest* rows), optionally with additive smoothing.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .criteria import check_m_criterion, check_ms_criterion, make_query
from .exceptions import CriterionError, DataFormatError, EstimationError, PositivityError
from .mgraph import NodeKind, indicator_name

__all__ = [
    "Dataset",
    "DistTable",
    "EffectEstimate",
    "load_csv",
    "to_csv",
    "manifest_freq",
    "estimate_m_adjustment",
    "estimate_ipw",
    "estimate_ms_adjustment",
]

NA_TOKENS = ("NA", "")
NA_CODE = -1


def _domain_order(tokens):
    tokens = set(tokens)
    try:
        return tuple(sorted(tokens, key=int))
    except ValueError:
        return tuple(sorted(tokens))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Discrete table with NA cells and an optional selection column.

    ``codes[c][i]`` is the index of row ``i``'s value in ``domains[c]``, or
    ``-1`` when the cell is NA. ``selected`` is a boolean row mask (all
    True when there is no selection column).
    """

    columns: tuple
    domains: dict
    codes: dict
    selected: np.ndarray
    selection_column: str | None = None

    @property
    def n_rows(self):
        return len(self.selected)

    @property
    def n_selected(self):
        return int(self.selected.sum())

    def observed(self, column):
        return self.codes[column] != NA_CODE

    def code_of(self, column, value):
        value = str(value)
        try:
            return self.domains[column].index(value)
        except ValueError:
            return None

    def check_columns(self, names):
        missing = [n for n in names if n not in self.codes]
        if missing:
            raise DataFormatError(f"dataset has no column(s) {missing}")


def load_csv(text, selection="S"):
    """Parse CSV text into a :class:`Dataset`.

    NA is spelled ``NA`` or left empty. A column named ``selection`` (pass
    None to disable) becomes the selection mask; its rows with value 0
    must be NA everywhere else. Columns named ``R_<v>`` are missingness
    indicators; they are redundant, so they are only checked against the
    NA pattern of ``v`` (a mismatch is an error) and kept as ordinary
    columns.
    """
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise DataFormatError("empty file")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header) or any(not h for h in header):
        raise DataFormatError("header has duplicate or empty column names")
    body = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataFormatError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        body.append([c.strip() for c in row])
    cols = {h: [r[j] for r in body] for j, h in enumerate(header)}

    sel_col = selection if selection in cols else None
    if sel_col is not None:
        bad = sorted({v for v in cols[sel_col] if v not in ("0", "1")})
        if bad:
            raise DataFormatError(f"selection column {sel_col!r} must be 0/1, got {bad}")
        selected = np.array([v == "1" for v in cols[sel_col]], dtype=bool)
    else:
        selected = np.ones(len(body), dtype=bool)

    indicator_cols = [h for h in header if h.startswith("R_") and h != sel_col]
    data_cols = tuple(h for h in header if h != sel_col)
    for i in np.flatnonzero(~selected):
        stray = [h for h in header if h != sel_col and cols[h][i] not in NA_TOKENS]
        if stray:
            raise DataFormatError(f"line {i + 2}: unselected row has values in {stray}")

    domains, codes = {}, {}
    for h in data_cols:
        domain = _domain_order(v for v in cols[h] if v not in NA_TOKENS)
        lookup = {v: k for k, v in enumerate(domain)}
        domains[h] = domain
        codes[h] = np.array([lookup.get(v, NA_CODE) for v in cols[h]], dtype=np.int64)

    for r in indicator_cols:
        target = r[2:]
        if target not in codes:
            raise DataFormatError(f"indicator column {r} has no variable column {target}")
        for i, token in enumerate(cols[r]):
            if not selected[i]:
                continue
            expect = "1" if codes[target][i] != NA_CODE else "0"
            if token != expect:
                raise DataFormatError(
                    f"line {i + 2}: {r}={token or 'NA'} disagrees with the NA pattern of {target}"
                )
    return Dataset(data_cols, domains, codes, selected, sel_col)


def to_csv(d):
    """Write ``d`` in the format read by :func:`load_csv` (NA as ``NA``)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = list(d.columns) + ([d.selection_column] if d.selection_column else [])
    writer.writerow(header)
    table = []
    for c in d.columns:
        dom = np.array(list(d.domains[c]) + ["NA"], dtype=object)
        table.append(dom[d.codes[c]])  # code -1 picks the trailing "NA"
    if d.selection_column:
        table.append(np.where(d.selected, "1", "0"))
    for row in zip(*table):
        writer.writerow(row)
    return out.getvalue()


@dataclass(frozen=True)
class DistTable:
    """Probabilities over every joint assignment of ``scope``.

    ``entries`` maps value tuples (in ``scope`` order) to probabilities.
    """

    scope: tuple
    entries: dict

    def __getitem__(self, assignment):
        if isinstance(assignment, dict):
            assignment = tuple(str(assignment[v]) for v in self.scope)
        elif not isinstance(assignment, tuple):
            assignment = (str(assignment),)
        return self.entries[tuple(str(a) for a in assignment)]

    def total(self):
        return math.fsum(self.entries.values())

    def to_list(self):
        return [
            {**dict(zip(self.scope, key)), "p": p} for key, p in self.entries.items()
        ]


def _joint_index(d, variables, rows):
    """Mixed-radix index of each row's joint value of ``variables``."""
    idx = np.zeros(int(rows.sum()), dtype=np.int64)
    for v in variables:
        idx = idx * len(d.domains[v]) + d.codes[v][rows]
    return idx


def _manifest_rows(d, w, require_selection):
    rows = d.selected.copy() if require_selection else np.ones(d.n_rows, dtype=bool)
    for v in w:
        rows &= d.observed(v)
    return rows


def manifest_freq(d, scope, w=(), require_selection=False):
    """Empirical joint of ``scope`` over rows where every ``w`` variable is present.

    With ``require_selection`` only selected rows count.

    Raises
    ------
    EstimationError
        If no row qualifies, or a scope variable is NA in a qualifying row.
    """
    scope, w = tuple(scope), tuple(w)
    d.check_columns(scope + w)
    if require_selection and d.selection_column is None:
        raise EstimationError("dataset has no selection column")
    rows = _manifest_rows(d, w, require_selection)
    n = int(rows.sum())
    if n == 0:
        raise EstimationError(f"no rows with {list(w)} all observed")
    for v in scope:
        if (d.codes[v][rows] == NA_CODE).any():
            raise EstimationError(f"{v} is NA in some rows where {list(w)} are observed")
    sizes = [len(d.domains[v]) for v in scope]
    counts = np.bincount(_joint_index(d, scope, rows), minlength=math.prod(sizes))
    keys = itertools.product(*(d.domains[v] for v in scope))
    return DistTable(scope, {k: int(c) / n for k, c in zip(keys, counts)})


@dataclass(frozen=True)
class EffectEstimate:
    """Estimated interventional distribution ``P(y | do(x))``.

    ``n_effective`` is the number of rows the frequencies were computed
    from. ``forced`` records that the criterion check was bypassed (or
    failed and was overridden).
    """

    method: str
    x: dict
    y: tuple
    z: tuple
    distribution: DistTable
    n_effective: int
    w: tuple = ()
    forced: bool = False
    criterion_valid: bool | None = None
    smoothing: float = 0.0
    notes: dict = field(default_factory=dict)

    def value(self, assignment):
        return self.distribution[assignment]

    def to_dict(self):
        return {
            "method": self.method,
            "x": dict(self.x),
            "y": list(self.y),
            "z": list(self.z),
            "W": list(self.w),
            "distribution": self.distribution.to_list(),
            "n_effective": self.n_effective,
            "forced": self.forced,
            "criterion_valid": self.criterion_valid,
            "smoothing": self.smoothing,
        }


class _Strata:
    """Count tables shared by the three estimators."""

    def __init__(self, d, g, x, y_vars, z, selection, force, smooth, method):
        if smooth < 0:
            raise ValueError("smoothing must be nonnegative")
        x = {str(k): str(v) for k, v in dict(x).items()}
        y_vars = tuple(y_vars)
        z = tuple(sorted(z))
        q = make_query(g, x.keys(), y_vars, z)
        d.check_columns(tuple(x) + y_vars + z)
        if selection and d.selection_column is None:
            raise EstimationError("ms-adjustment needs a dataset with a selection column")
        if not selection and not d.selected.all():
            raise EstimationError("dataset contains unselected rows; use ms-adjustment")

        if selection:
            valid = check_ms_criterion(g, q).valid
        elif g.selection is None:
            valid = check_m_criterion(g, q).valid
        else:
            valid = None  # the m-criterion is undefined with a selection node
        if not valid and not force:
            which = "ms" if selection else "m"
            raise CriterionError(f"{sorted(z)} is not a valid {which}-adjustment set; use force")

        self.valid = valid
        self.forced = bool(force and not valid)
        self.method, self.smooth = method, smooth
        self.x, self.y, self.z = x, y_vars, z
        self.w = tuple(sorted(g.partial & (q.x | q.y | q.z)))
        self.x_vars = tuple(sorted(x))

        rows = _manifest_rows(d, self.w, selection)
        self.n = int(rows.sum())
        if self.n == 0:
            raise EstimationError(f"no rows with {list(self.w)} all observed")
        for v in self.x_vars + y_vars + z:
            if g.kind(v) is NodeKind.OBSERVED and (d.codes[v][rows] == NA_CODE).any():
                raise EstimationError(
                    f"{v} is declared fully observed but has NA cells (missing {indicator_name(v)}?)"
                )
        x_codes = []
        for v in self.x_vars:
            c = d.code_of(v, x[v])
            if c is None:
                raise PositivityError(f"value {v}={x[v]} never occurs in the data")
            x_codes.append(c)

        self.y_size = math.prod(len(d.domains[v]) for v in y_vars)
        self.z_size = math.prod(len(d.domains[v]) for v in z)
        self.y_keys = list(itertools.product(*(d.domains[v] for v in y_vars)))
        self.z_keys = list(itertools.product(*(d.domains[v] for v in z)))
        zi = _joint_index(d, z, rows)
        yi = _joint_index(d, y_vars, rows)
        is_x = np.ones(self.n, dtype=bool)
        for v, c in zip(self.x_vars, x_codes):
            is_x &= d.codes[v][rows] == c
        self.row_z, self.row_y, self.row_x = zi, yi, is_x
        self.c_z = np.bincount(zi, minlength=self.z_size)
        self.c_xz = np.bincount(zi[is_x], minlength=self.z_size)
        self.c_yxz = np.bincount(
            zi[is_x] * self.y_size + yi[is_x], minlength=self.z_size * self.y_size
        ).reshape(self.z_size, self.y_size)
        self.x_size = math.prod(len(d.domains[v]) for v in self.x_vars)

        if smooth == 0:
            empty = np.flatnonzero((self.c_z > 0) & (self.c_xz == 0))
            if empty.size:
                cells = [dict(zip(z, self.z_keys[i])) for i in empty[:5]]
                raise PositivityError(f"no rows with {x} in covariate strata {cells}")

    def result(self, probs):
        probs = [float(p) for p in probs]
        table = DistTable(self.y, dict(zip(self.y_keys, probs)))
        total = table.total()
        if abs(total - 1) > 1e-9:
            raise EstimationError(f"estimate sums to {total}")
        return EffectEstimate(
            self.method, self.x, self.y, self.z, table, self.n, self.w,
            self.forced, self.valid, self.smooth,
        )


def _adjustment(s):
    a = s.smooth
    p_z = (s.c_z + a) / (s.n + a * s.z_size)
    denom = s.c_xz + a * s.y_size
    keep = p_z > 0
    p_y = np.zeros_like(s.c_yxz, dtype=float)
    p_y[keep] = (s.c_yxz[keep] + a) / denom[keep, None]
    out = []
    for j in range(s.y_size):
        out.append(math.fsum((p_y[keep, j] * p_z[keep]).tolist()))
    return s.result(out)


def _ipw(s):
    a = s.smooth
    if a == 0:
        # per-row weights 1 / P(x | z) over the treated rows
        weight = s.c_z / np.where(s.c_xz > 0, s.c_xz, 1)
        w_rows = weight[s.row_z[s.row_x]]
        y_rows = s.row_y[s.row_x]
        out = [math.fsum(w_rows[y_rows == j].tolist()) / s.n for j in range(s.y_size)]
        return s.result(out)
    p_yxz = (s.c_yxz + a) / (s.n + a * s.z_size * s.x_size * s.y_size)
    p_x_given_z = (s.c_xz + a) / (s.c_z + a * s.x_size)
    out = [math.fsum((p_yxz[:, j] / p_x_given_z).tolist()) for j in range(s.y_size)]
    total = math.fsum(out)
    return s.result([v / total for v in out])


def estimate_m_adjustment(d, g, x, y_vars, z=(), force=False, smooth=0.0):
    """Estimate ``P(y | do(x))`` by the m-adjustment formula.

    Computes ``sum_z P(y | x, z, R_W=1) P(z | R_W=1)`` where ``W`` holds the
    partially observed members of x, y and z, all frequencies taken over
    the rows where ``W`` is observed.

    Parameters
    ----------
    d : Dataset
    g : MGraph
    x : mapping
        Treatment assignment, e.g. ``{"X": 1}``.
    y_vars : sequence of str
    z : iterable of str
    force : bool
        Estimate even if ``z`` fails the m-adjustment criterion.
    smooth : float
        Additive (Laplace) smoothing for every count; 0 disables it.

    Raises
    ------
    CriterionError
        ``z`` is not valid and ``force`` is false.
    PositivityError
        A covariate stratum present in the data has no row with ``x``.
    """
    return _adjustment(_Strata(d, g, x, y_vars, z, False, force, smooth, "m-adjustment"))


def estimate_ipw(d, g, x, y_vars, z=(), force=False, smooth=0.0):
    """Inverse-probability-weighted form of :func:`estimate_m_adjustment`.

    Each treated manifest row is weighted by ``1 / P(x | z, R_W=1)``.
    Without smoothing the result equals the m-adjustment estimate up to
    rounding.
    """
    return _ipw(_Strata(d, g, x, y_vars, z, False, force, smooth, "ipw"))


def estimate_ms_adjustment(d, g, x, y_vars, z=(), force=False, smooth=0.0):
    """m-adjustment restricted to selected rows (``S = 1``).

    Requires a dataset with a selection column; the covariate set is
    checked against the ms-adjustment criterion.
    """
    return _adjustment(_Strata(d, g, x, y_vars, z, True, force, smooth, "ms-adjustment"))
