"""Graphical criteria for covariate adjustment under missing data and selection.

Every checker returns a :class:`Verdict` naming the conditions that
failed, so callers can explain *why* a set is rejected, not just that it
is.

Condition labels follow the usual lettering:

======  ===================  =====================  ==============================
label   adjustment           m-adjustment           sufficient (simple) condition
======  ===================  =====================  ==============================
a       no forbidden         no forbidden           z is a valid adjustment set
        descendants          descendants
b       non-causal paths     non-causal paths       y independent of R_W given x,z
        blocked              blocked by z and R_W
c       --                   y independent of R_W   z independent of R_W
                             given x, edges into x
                             cut
d       --                   treatments that are    --
                             ancestors of R_W do
                             not reach y without
                             their own out-edges
======  ===================  =====================  ==============================
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dsep import d_separated
from .exceptions import QueryError
from .mgraph import NodeKind, _causal_starts, dpcp, mutilate, proper_backdoor

__all__ = [
    "Query",
    "Verdict",
    "make_query",
    "check_backdoor",
    "check_adjustment",
    "check_m_sufficient",
    "check_m_criterion",
    "check_m_criterion_math",
    "check_ms_criterion",
]


@dataclass(frozen=True)
class Query:
    """Treatments ``x``, outcomes ``y`` and candidate covariates ``z``."""

    x: frozenset
    y: frozenset
    z: frozenset = frozenset()


def make_query(g, x, y, z=()):
    """Validate and build a :class:`Query` against ``g``.

    Raises
    ------
    QueryError
        If the sets overlap, ``x`` or ``y`` is empty, or any member is not a
        (fully or partially) observed variable.
    """
    x, y, z = (g.check_nodes(s) for s in (x, y, z))
    if not x or not y:
        raise QueryError("treatment and outcome sets must be nonempty")
    if (x & y) or (x & z) or (y & z):
        raise QueryError("treatment, outcome and covariate sets must be disjoint")
    bad = sorted(n for n in x | y | z if g.kind(n) not in (NodeKind.OBSERVED, NodeKind.PARTIAL))
    if bad:
        raise QueryError(f"only observed or partially observed variables allowed, got {bad}")
    return Query(x, y, z)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a criterion check.

    ``failed`` lists condition labels in alphabetical order; ``notes`` holds
    human-readable evidence per failed condition. ``w`` and ``rw`` are the
    partially observed members of x, y, z and their indicators (plus the
    selection node where the ms-criterion applies).
    """

    criterion: str
    failed: tuple = ()
    notes: dict = field(default_factory=dict)
    w: frozenset = frozenset()
    rw: frozenset = frozenset()

    @property
    def valid(self):
        return not self.failed

    def __bool__(self):
        return self.valid

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "valid": self.valid,
            "failed": list(self.failed),
            "notes": dict(self.notes),
            "W": sorted(self.w),
            "R_W": sorted(self.rw),
        }


def _verdict(name, checks, w=frozenset(), rw=frozenset()):
    notes = {label: msg for label, msg in checks if msg}
    return Verdict(name, tuple(sorted(notes)), notes, frozenset(w), frozenset(rw))


def _coerce(g, q):
    return make_query(g, q.x, q.y, q.z)


def _fmt(nodes):
    return "{" + ", ".join(sorted(nodes)) + "}"


def _descendant_condition(g, q):
    forbidden = q.z & dpcp(g, q.x, q.y)
    if forbidden:
        return f"{_fmt(forbidden)} descend from a proper causal path"
    return None


def _proper_path_condition(g, q):
    # descendants (edges into x cut) of the non-x nodes lying on a proper
    # causal path, found as "reachable from x avoiding x" and "reaches y
    # avoiding x"
    from_x = set()
    stack = [c for n in q.x for c in g.children_map[n] if c not in q.x]
    while stack:
        n = stack.pop()
        if n not in from_x:
            from_x.add(n)
            stack.extend(c for c in g.children_map[n] if c not in q.x)
    on_path = from_x & _causal_starts(g, q.x, q.y)
    forbidden = q.z & mutilate(g, remove_in=q.x).descendants(on_path)
    if forbidden:
        return f"{_fmt(forbidden)} descend from a node on a proper causal path"
    return None


def _separation(g, a, b, given, what):
    a, b = frozenset(a), frozenset(b)
    if not a or not b:
        return None
    if d_separated(g, a, b, given):
        return None
    return f"{_fmt(a)} and {_fmt(b)} are d-connected given {_fmt(given)} in {what}"


def check_backdoor(g, q):
    """Backdoor criterion: no descendants of x in z, and z blocks backdoor paths."""
    q = _coerce(g, q)
    desc = q.z & (g.descendants(q.x) - q.x)
    a = f"{_fmt(desc)} are descendants of the treatment" if desc else None
    b = _separation(mutilate(g, remove_out=q.x), q.x, q.y, q.z, "the graph without treatment out-edges")
    return _verdict("backdoor", [("a", a), ("b", b)])


def check_adjustment(g, q):
    """Generalized adjustment criterion (complete for plain adjustment)."""
    q = _coerce(g, q)
    a = _descendant_condition(g, q)
    b = _separation(proper_backdoor(g, q.x, q.y), q.x, q.y, q.z, "the proper backdoor graph")
    return _verdict("adjustment", [("a", a), ("b", b)])


def _indicator_sets(g, q, with_selection):
    w = g.partial & (q.x | q.y | q.z)
    rw = g.indicators_of(w)
    if with_selection and g.selection is not None:
        rw = rw | {g.selection}
    return w, rw


def check_m_sufficient(g, q):
    """Simple sufficient condition for m-adjustment.

    (a) z is a valid adjustment set, (b) ``y`` is separated from ``R_W``
    given ``x`` and ``z``, (c) ``z`` is separated from ``R_W``. Not
    necessary: valid m-adjustment sets can fail it.
    """
    q = _coerce(g, q)
    w, rw = _indicator_sets(g, q, with_selection=False)
    adj = check_adjustment(g, q)
    a = None if adj.valid else "not an adjustment set: " + "; ".join(adj.notes.values())
    b = _separation(g, q.y, rw, q.x | q.z, "the graph")
    c = _separation(g, q.z, rw, (), "the graph")
    return _verdict("m-sufficient", [("a", a), ("b", b), ("c", c)], w, rw)


def _missing_conditions(g, q, rw, b_check):
    gbar = mutilate(g, remove_in=q.x)
    gunder = mutilate(g, remove_out=q.x)
    a = _proper_path_condition(g, q)
    b = b_check()
    c = _separation(gbar, q.y, rw, q.x, "the graph without treatment in-edges")
    xa = q.x & g.ancestors(rw) if rw else frozenset()
    d = _separation(gunder, xa, q.y, (), "the graph without treatment out-edges")
    return [("a", a), ("b", b), ("c", c), ("d", d)]


def _require_no_selection(g):
    if g.selection is not None:
        raise QueryError("graph has a selection node; use check_ms_criterion")


def check_m_criterion(g, q):
    """m-adjustment criterion: necessary and sufficient for the m-adjustment formula.

    Condition (b) is checked as separation of x and y given ``z | R_W`` in
    the proper backdoor graph, where every remaining x-y path is
    non-causal.
    """
    q = _coerce(g, q)
    _require_no_selection(g)
    w, rw = _indicator_sets(g, q, with_selection=False)
    pbd = proper_backdoor(g, q.x, q.y)
    checks = _missing_conditions(
        g, q, rw, lambda: _separation(pbd, q.x, q.y, q.z | rw, "the proper backdoor graph")
    )
    return _verdict("m-adjustment", checks, w, rw)


def check_m_criterion_math(g, q):
    """Set-algebraic restatement of :func:`check_m_criterion`.

    Kept as an independent implementation for cross-checking: condition
    (b) separates ``y`` from ``x`` (argument order swapped) and (a) reads
    the descendant condition straight off ``dpcp``.
    """
    q = _coerce(g, q)
    _require_no_selection(g)
    w, rw = _indicator_sets(g, q, with_selection=False)
    pbd = proper_backdoor(g, q.x, q.y)
    gbar = mutilate(g, remove_in=q.x)
    gunder = mutilate(g, remove_out=q.x)
    checks = [
        ("a", "z intersects Dpcp" if q.z & dpcp(g, q.x, q.y) else None),
        ("b", None if d_separated(pbd, q.y, q.x, q.z | rw) else "y, x connected in pbd graph"),
        ("c", None if not rw or d_separated(gbar, q.y, rw, q.x) else "y, R_W connected"),
    ]
    xa = q.x & g.ancestors(rw)
    checks.append(("d", None if not xa or d_separated(gunder, xa, q.y) else "x & An(R_W) connected to y"))
    return _verdict("m-adjustment (set form)", checks, w, rw)


def check_ms_criterion(g, q):
    """ms-adjustment criterion for missing data plus selection bias.

    Identical to :func:`check_m_criterion` with the selection node (when
    present) added to ``R_W`` in conditions (b)-(d). On a graph without a
    selection node the two checks coincide.
    """
    q = _coerce(g, q)
    w, rw = _indicator_sets(g, q, with_selection=True)
    pbd = proper_backdoor(g, q.x, q.y)
    checks = _missing_conditions(
        g, q, rw, lambda: _separation(pbd, q.x, q.y, q.z | rw, "the proper backdoor graph")
    )
    return _verdict("ms-adjustment", checks, w, rw)
