"""Finding and listing m-/ms-adjustment sets.

* :func:`find_sep` decides whether a separator ``Z`` with ``I <= Z <= E``
  exists, using the ancestral candidate ``An(X | Y | I) & E``.
* :func:`iter_madj` / :func:`list_madj` list every valid covariate set with
  polynomial delay by backtracking over the candidate variables, pruning
  any branch for which no completion can pass conditions (b)-(d).
* :func:`find_min_cost_sep` computes a minimum-weight separator by a vertex
  cut in the moralized ancestral graph.
* :func:`find_min_adj_set` returns a valid set of minimum size.
"""

from __future__ import annotations

import networkx as nx

from ._bitgraph import BitDag
from .criteria import check_m_criterion, check_ms_criterion, make_query
from .dsep import d_separated
from .exceptions import InconsistencyError, QueryError
from .mgraph import NodeKind, canonicalize, dpcp, indicator_name, mutilate, proper_backdoor

__all__ = [
    "find_sep",
    "iter_madj",
    "list_madj",
    "find_min_cost_sep",
    "find_min_adj_set",
]

MODES = ("m", "ms")


def _check_family(g, x, y, i, e):
    x, y, i, e = (g.check_nodes(s) for s in (x, y, i, e))
    if not x or not y or x & y:
        raise QueryError("x and y must be nonempty and disjoint")
    if not i <= e:
        raise QueryError(f"must-include set not inside allowed set: {sorted(i - e)}")
    if e & (x | y):
        raise QueryError(f"allowed set overlaps x or y: {sorted(e & (x | y))}")
    latent = sorted(n for n in e if g.kind(n) is NodeKind.LATENT)
    if latent:
        raise QueryError(f"latent nodes cannot be separators: {latent}")
    return x, y, i, e


def find_sep(g, x, y, include=(), allowed=()):
    """A set ``Z`` with ``include <= Z <= allowed`` d-separating x and y, or None.

    If any such set exists, ``(An(x | y | include) & allowed) - (x | y)`` is
    one, so a single separation test decides the question.
    """
    x, y, i, e = _check_family(g, x, y, include, allowed)
    candidate = (g.ancestors(x | y | i) & e) - (x | y)
    return candidate if d_separated(g, x, y, candidate) else None


# -- listing -------------------------------------------------------------------


def _check_mode(g, mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "m" and g.selection is not None:
        raise QueryError("graph has a selection node; use mode='ms'")


class _Search:
    """Precomputed bitsets shared by the listing and minimum-size searches.

    All graphs are edge-subsets of the canonical form of ``g`` and share its
    node indexing.
    """

    def __init__(self, g, x, y, mode, candidates=None):
        base = canonicalize(g)
        names = base.nodes
        edges = base.directed_edges
        xs, ys = frozenset(x), frozenset(y)
        bar = [(a, b) for a, b in edges if b not in xs]
        under = [(a, b) for a, b in edges if a not in xs]
        pbd_graph = proper_backdoor(base, xs, ys)

        self.full = BitDag(names, edges)
        self.pbd = BitDag(names, pbd_graph.directed_edges)
        self.bar = BitDag(names, bar)
        self.under = BitDag(names, under)
        m = self.full.mask
        self.x, self.y = m(xs), m(ys)
        self.xy = self.x | self.y

        fixed = g.indicators_of(g.partial & (xs | ys))
        if mode == "ms" and g.selection is not None:
            fixed = fixed | {g.selection}
        self.fixed = m(fixed)

        if candidates is None:
            candidates = g.variables - xs - ys - dpcp(g, xs, ys)
        self.cand = []
        for v in sorted(candidates):
            rbit = m([indicator_name(v)]) if g.kind(v) is NodeKind.PARTIAL else 0
            rpar = self.pbd.parents_of(rbit) if rbit else 0
            self.cand.append((v, m([v]), rbit, rpar))
        self.indicator_bits = self.fixed
        for _, _, rb, _ in self.cand:
            self.indicator_bits |= rb
        # (c) and (d) compose over indicators, so one test per indicator
        # decides them for every set
        self.bad_indicators = 0
        rest = self.indicator_bits
        while rest:
            low = rest & -rest
            rest ^= low
            if not self._cd_single(low):
                self.bad_indicators |= low

    def _cd_single(self, r):
        if not self.bar.separated(r, self.y, self.x):
            return False
        xa = self.x & self.full.ancestors(r)
        return not xa or self.under.separated(xa, self.y, 0)

    def cd_ok(self, rmask):
        """Conditions (c) and (d) for the indicator set ``rmask``."""
        return not rmask & self.bad_indicators

    def run(self, max_size=None):
        """Yield the V-part bitmask of every valid set, include-branch first.

        A branch survives only if some completion passes (b): the ancestral
        candidate ``An(x | y | inc) & allowed`` is then a separator (the
        witness). Children reuse the parent's ancestor set, and its witness
        whenever their pair lies wholly inside or outside it.
        """
        if not self.cd_ok(self.fixed):
            return
        cand = self.cand
        n = len(cand)
        bad = self.bad_indicators
        ind = self.indicator_bits
        xy, x, y = self.xy, self.x, self.y
        pbd = self.pbd
        allowed0 = self.fixed
        for _, vb, rb, _ in cand:
            if not rb & bad:
                allowed0 |= vb | rb
        root = (0, self.fixed, allowed0, pbd.ancestors(xy | self.fixed), None, 0)
        stack = [root]
        pop, push = stack.pop, stack.append
        while stack:
            pos, inc, allowed, anc, wit, size = pop()
            if wit is None:
                wit = anc & allowed & ~xy
                if not pbd.separated_within(anc, x, y, wit):
                    continue
            if pos == n:
                yield inc & ~ind
                continue
            _, vb, rb, rpar = cand[pos]
            pair = vb | rb
            shared = wit & pair
            push((pos + 1, inc, allowed & ~pair, anc, None if shared else wit, size))
            if allowed & vb and (max_size is None or size < max_size):
                if shared == pair:
                    push((pos + 1, inc | pair, allowed, anc, wit, size + 1))
                elif shared & vb and rpar & wit == rpar:
                    # an indicator whose parents are all conditioned on
                    # cannot open a path, and adds no new ancestors
                    push((pos + 1, inc | pair, allowed, anc | rb, wit | rb, size + 1))
                else:
                    grown = pbd.extend_ancestors(anc, pair)
                    push((pos + 1, inc | pair, allowed, grown, None, size + 1))

    def names(self, vmask):
        return frozenset(v for v, vb, _, _ in self.cand if vmask & vb)


def iter_madj(g, x, y, mode="m"):
    """Generate every m-adjustment set (``mode="m"``) or ms-adjustment set (``"ms"``).

    Sets are frozensets of variable names; the implied indicators are not
    included. Order is deterministic: candidates are branched on in
    lexicographic order, including a candidate before excluding it.
    """
    _check_mode(g, mode)
    q = make_query(g, x, y)
    search = _Search(g, q.x, q.y, mode)
    for vmask in search.run():
        yield search.names(vmask)


def list_madj(g, x, y, sink, mode="m"):
    """Stream every valid set to ``sink`` and return how many were produced.

    ``sink`` is called once per set; enumeration stops early when it returns
    ``False`` (any other return value, including None, continues).
    """
    count = 0
    for z in iter_madj(g, x, y, mode):
        count += 1
        if sink(z) is False:
            break
    return count


# -- minimum separators ----------------------------------------------------------


def _moral_edges(dag, keep):
    edges = set()
    parents = dag.parents_map
    for v in keep:
        ps = sorted(parents[v])
        for p in ps:
            edges.add((p, v))
        for i, p in enumerate(ps):
            for q in ps[i + 1:]:
                edges.add((p, q))
    return edges


def find_min_cost_sep(g, x, y, include=(), allowed=(), weights=None):
    """Minimum-weight ``Z`` with ``include <= Z <= allowed`` separating x and y.

    Works on the moral graph of ``An(x | y | include)``: every node is split
    into an in/out arc carrying its weight (0 for ``include``, unbounded for
    nodes outside ``allowed``), and a minimum s-t cut gives the separator.
    Among minimum cuts the one closest to ``x`` is returned.

    Parameters
    ----------
    weights : mapping of str to float, optional
        Nonnegative weight per allowed node; defaults to 1 everywhere.

    Returns
    -------
    frozenset or None
        None when no separator inside ``allowed`` exists.
    """
    x, y, i, e = _check_family(g, x, y, include, allowed)
    if weights is None:
        weights = dict.fromkeys(e, 1)
    missing = sorted(n for n in e if n not in weights)
    if missing:
        raise ValueError(f"no weight for {missing}")
    if any(weights[n] < 0 for n in e):
        raise ValueError("weights must be nonnegative")

    dag = canonicalize(g)
    keep = dag.ancestors(x | y | i)
    flow = nx.DiGraph()
    for v in keep:
        if v in i:
            flow.add_edge((v, 0), (v, 1), capacity=0)
        elif v in e:
            flow.add_edge((v, 0), (v, 1), capacity=weights[v])
        else:
            flow.add_edge((v, 0), (v, 1))
    for a, b in _moral_edges(dag, keep):
        flow.add_edge((a, 1), (b, 0))
        flow.add_edge((b, 1), (a, 0))
    # flow runs from y to x so that the sink-nearest cut is the x-nearest one
    source, sink = "source", "sink"
    for v in y:
        flow.add_edge(source, (v, 0))
    for v in x:
        flow.add_edge((v, 1), sink)
    try:
        _, (src_side, _) = nx.minimum_cut(flow, source, sink)
    except nx.NetworkXUnbounded:
        return None
    cut = frozenset(v for v in keep if (v, 0) in src_side and (v, 1) not in src_side)
    result = cut | i
    if not d_separated(g, x, y, result):
        raise InconsistencyError(f"minimum cut {sorted(result)} does not separate")
    return result


def find_min_adj_set(g, x, y, mode="m"):
    """A valid m-/ms-adjustment set of minimum size, or None if none exists.

    Candidates violating the indicator conditions (c) and (d) are filtered
    one at a time (exact, since d-separation composes), then a unit-weight
    minimum separator is found in the proper backdoor graph. That separator
    ignores the indicators it drags in; when they open a path, the
    separator size is still a lower bound and a size-bounded backtracking
    search over the filtered candidates finds the true minimum.
    """
    _check_mode(g, mode)
    q = make_query(g, x, y)
    check = check_ms_criterion if mode == "ms" else check_m_criterion
    x, y = q.x, q.y

    pbd = proper_backdoor(g, x, y)
    gbar = mutilate(pbd, remove_in=x)
    gunder = mutilate(pbd, remove_out=x)

    def indicator_ok(rw):
        if not rw:
            return True
        if not d_separated(gbar, y, rw, x):
            return False
        xa = x & g.ancestors(rw)
        return not xa or d_separated(gunder, xa, y)

    allowed = g.variables - x - y - dpcp(g, x, y)
    filtered = frozenset(
        v for v in allowed if g.kind(v) is NodeKind.OBSERVED or indicator_ok({indicator_name(v)})
    )
    fixed = g.indicators_of(g.partial & (x | y))
    if mode == "ms" and g.selection is not None:
        fixed = fixed | {g.selection}
    if not indicator_ok(fixed):
        return None

    best = find_min_cost_sep(pbd, x, y, (), filtered)
    if best is None:
        return None
    if not check(g, make_query(g, x, y, best)).valid:
        best = _bounded_search(g, x, y, mode, filtered, len(best))
        if best is None:
            return None
    if not check(g, make_query(g, x, y, best)).valid:
        raise InconsistencyError(f"minimum set {sorted(best)} fails the criterion")
    return best


def _bounded_search(g, x, y, mode, candidates, lower):
    search = _Search(g, x, y, mode, candidates)
    for size in range(lower, len(candidates) + 1):
        for vmask in search.run(max_size=size):
            return search.names(vmask)
    return None
