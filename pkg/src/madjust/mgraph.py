"""M-graphs: causal graphs augmented with missingness and selection indicators.

An :class:`MGraph` holds five kinds of node:

* fully observed variables (``obs``),
* partially observed variables (``mis``), each paired with a binary
  missingness indicator named ``R_<name>``,
* the missingness indicators themselves,
* at most one selection indicator (``sel``), always a sink,
* latent nodes, which only appear after :func:`canonicalize` replaces
  bidirected edges by explicit common causes.

Graphs are immutable; every transform returns a new graph.
"""

from __future__ import annotations

import enum
import re
from functools import cached_property
from typing import Iterable, Mapping

from .exceptions import GraphFormatError, MGraphError, UnknownNodeError

__all__ = [
    "NodeKind",
    "MGraph",
    "indicator_name",
    "parse_mgraph",
    "serialize_mgraph",
    "relatives",
    "mutilate",
    "dpcp",
    "proper_backdoor",
    "canonicalize",
]

R_PREFIX = "R_"
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class NodeKind(enum.Enum):
    OBSERVED = "obs"
    PARTIAL = "mis"
    MISSINGNESS = "R"
    SELECTION = "sel"
    LATENT = "latent"


_VARIABLE_KINDS = (NodeKind.OBSERVED, NodeKind.PARTIAL)
_INDICATOR_KINDS = (NodeKind.MISSINGNESS, NodeKind.SELECTION)


def indicator_name(variable):
    """Name of the missingness indicator paired with ``variable``."""
    return R_PREFIX + variable


def _bidirected_key(a, b):
    return (a, b) if a <= b else (b, a)


class MGraph:
    """Mixed graph with directed and bidirected edges and typed nodes.

    Parameters
    ----------
    nodes : mapping of str to NodeKind
    directed : iterable of (tail, head) pairs
    bidirected : iterable of node pairs, order irrelevant

    Raises
    ------
    MGraphError
        If any structural invariant fails (cycle, self-loop, unpaired
        indicator, indicator pointing into a variable, ...).
    """

    def __init__(
        self,
        nodes: Mapping[str, NodeKind],
        directed: Iterable[tuple[str, str]] = (),
        bidirected: Iterable[tuple[str, str]] = (),
    ):
        self._kinds = dict(nodes)
        self._directed = frozenset((a, b) for a, b in directed)
        self._bidirected = frozenset(_bidirected_key(a, b) for a, b in bidirected)
        self._validate()

    # -- construction helpers -------------------------------------------------

    def _validate(self):
        kinds = self._kinds
        selection = [n for n, k in kinds.items() if k is NodeKind.SELECTION]
        if len(selection) > 1:
            raise MGraphError(f"at most one selection node allowed, got {sorted(selection)}")
        for name, kind in kinds.items():
            if not isinstance(kind, NodeKind):
                raise MGraphError(f"node {name!r} has invalid kind {kind!r}")
            if kind is not NodeKind.LATENT and not _NAME.match(name):
                raise MGraphError(f"invalid node name {name!r}")
            if name.startswith(R_PREFIX) and kind is not NodeKind.MISSINGNESS:
                raise MGraphError(f"name {name!r} is reserved for missingness indicators")
            if kind is NodeKind.MISSINGNESS:
                target = name[len(R_PREFIX):]
                if not name.startswith(R_PREFIX) or kinds.get(target) is not NodeKind.PARTIAL:
                    raise MGraphError(
                        f"missingness node {name!r} has no partially observed partner"
                    )
            if kind is NodeKind.PARTIAL:
                if kinds.get(indicator_name(name)) is not NodeKind.MISSINGNESS:
                    raise MGraphError(f"partially observed node {name!r} lacks {indicator_name(name)}")

        for a, b in self._directed | self._bidirected:
            for n in (a, b):
                if n not in kinds:
                    raise MGraphError(f"edge refers to unknown node {n!r}")
            if a == b:
                raise MGraphError(f"self-loop on {a!r}")
        for a, b in self._directed:
            if kinds[a] in _INDICATOR_KINDS and kinds[b] in _VARIABLE_KINDS:
                raise MGraphError(f"indicator {a!r} may not be a parent of variable {b!r}")
            if kinds[a] is NodeKind.SELECTION:
                raise MGraphError(f"selection node {a!r} may not have outgoing edges")
        for a, b in self._bidirected:
            if NodeKind.SELECTION in (kinds[a], kinds[b]):
                raise MGraphError("selection node may not have bidirected edges")
        cycle = self._find_cycle()
        if cycle:
            raise MGraphError("directed cycle: " + " -> ".join(cycle))

    def _find_cycle(self):
        children = self.children_map
        state = dict.fromkeys(self._kinds, 0)
        for root in sorted(self._kinds):
            if state[root]:
                continue
            stack = [(root, iter(sorted(children[root])))]
            path = [root]
            state[root] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    stack.pop()
                    path.pop()
                    state[node] = 2
                elif state[nxt] == 1:
                    return path[path.index(nxt):] + [nxt]
                elif state[nxt] == 0:
                    state[nxt] = 1
                    path.append(nxt)
                    stack.append((nxt, iter(sorted(children[nxt]))))
        return None

    # -- basic accessors ------------------------------------------------------

    @property
    def nodes(self):
        """All node names, sorted."""
        return tuple(sorted(self._kinds))

    @property
    def kinds(self):
        return dict(self._kinds)

    @property
    def directed_edges(self):
        return frozenset(self._directed)

    @property
    def bidirected_edges(self):
        return frozenset(self._bidirected)

    def kind(self, node):
        try:
            return self._kinds[node]
        except KeyError:
            raise UnknownNodeError(f"unknown node {node!r}") from None

    def __contains__(self, node):
        return node in self._kinds

    def __len__(self):
        return len(self._kinds)

    def _of_kind(self, *kinds):
        return frozenset(n for n, k in self._kinds.items() if k in kinds)

    @cached_property
    def observed(self):
        """Fully observed variables."""
        return self._of_kind(NodeKind.OBSERVED)

    @cached_property
    def partial(self):
        """Partially observed variables."""
        return self._of_kind(NodeKind.PARTIAL)

    @cached_property
    def variables(self):
        """Observed plus partially observed variables."""
        return self._of_kind(*_VARIABLE_KINDS)

    @cached_property
    def indicators(self):
        """Missingness indicators."""
        return self._of_kind(NodeKind.MISSINGNESS)

    @cached_property
    def latents(self):
        return self._of_kind(NodeKind.LATENT)

    @cached_property
    def selection(self):
        """Name of the selection node, or None."""
        sel = self._of_kind(NodeKind.SELECTION)
        return next(iter(sel)) if sel else None

    def indicators_of(self, variables):
        """Missingness indicators of the partially observed members of ``variables``."""
        return frozenset(indicator_name(v) for v in variables if self._kinds.get(v) is NodeKind.PARTIAL)

    @cached_property
    def parents_map(self):
        out = {n: set() for n in self._kinds}
        for a, b in self._directed:
            out[b].add(a)
        return {n: frozenset(s) for n, s in out.items()}

    @cached_property
    def children_map(self):
        out = {n: set() for n in self._kinds}
        for a, b in self._directed:
            out[a].add(b)
        return {n: frozenset(s) for n, s in out.items()}

    @cached_property
    def topological_order(self):
        """Node names in a deterministic topological order (ties broken by name)."""
        import heapq

        indeg = {n: len(p) for n, p in self.parents_map.items()}
        heap = [n for n, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            n = heapq.heappop(heap)
            order.append(n)
            for c in self.children_map[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        return tuple(order)

    def check_nodes(self, nodes):
        nodes = frozenset(nodes)
        missing = nodes - self._kinds.keys()
        if missing:
            raise UnknownNodeError(f"unknown node(s): {sorted(missing)}")
        return nodes

    def _closure(self, start, step):
        seen = set(self.check_nodes(start))
        stack = list(seen)
        while stack:
            for m in step[stack.pop()]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return frozenset(seen)

    def parents(self, nodes):
        nodes = self.check_nodes(nodes)
        return nodes.union(*(self.parents_map[n] for n in nodes))

    def children(self, nodes):
        nodes = self.check_nodes(nodes)
        return nodes.union(*(self.children_map[n] for n in nodes))

    def ancestors(self, nodes):
        """``nodes`` together with all their ancestors along directed edges."""
        return self._closure(nodes, self.parents_map)

    def descendants(self, nodes):
        """``nodes`` together with all their descendants along directed edges."""
        return self._closure(nodes, self.children_map)

    @cached_property
    def _bits(self):
        from ._bitgraph import shared_bitdag

        dag = canonicalize(self)
        return shared_bitdag(dag.nodes, dag.directed_edges)

    # -- dunder ---------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, MGraph):
            return NotImplemented
        return (
            self._kinds == other._kinds
            and self._directed == other._directed
            and self._bidirected == other._bidirected
        )

    def __hash__(self):
        return hash((frozenset(self._kinds.items()), self._directed, self._bidirected))

    def __repr__(self):
        return (
            f"MGraph({len(self._kinds)} nodes, {len(self._directed)} directed, "
            f"{len(self._bidirected)} bidirected)"
        )

    @classmethod
    def _unchecked(cls, kinds, directed, bidirected):
        g = object.__new__(cls)
        g._kinds = kinds
        g._directed = frozenset(directed)
        g._bidirected = frozenset(bidirected)
        return g

    def _without_edges(self, directed, bidirected):
        # deleting edges cannot break an invariant, so skip validation
        return MGraph._unchecked(self._kinds, directed, bidirected)

    def replace_edges(self, directed=None, bidirected=None, nodes=None):
        """Copy of this graph with some components swapped out."""
        return MGraph(
            self._kinds if nodes is None else nodes,
            self._directed if directed is None else directed,
            self._bidirected if bidirected is None else bidirected,
        )


# -- text format ---------------------------------------------------------------

_KIND_WORDS = {"obs": NodeKind.OBSERVED, "mis": NodeKind.PARTIAL, "sel": NodeKind.SELECTION}


def parse_mgraph(text):
    """Parse the line-oriented graph format.

    ::

        # comment
        node X obs
        node Z mis          # also creates R_Z
        node S sel
        edge Z -> X
        edge X <-> Y

    Declarations may appear in any order; edges may refer to the
    automatically created ``R_`` nodes.

    Raises
    ------
    GraphFormatError
        On syntax errors, duplicate declarations or edges, reserved names,
        references to undeclared nodes, and any invariant violation.
    """
    kinds = {}
    directed = {}
    bidirected = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) != 3 or parts[2] not in _KIND_WORDS:
                raise GraphFormatError("expected 'node <name> obs|mis|sel'", lineno)
            name, kind = parts[1], _KIND_WORDS[parts[2]]
            if not _NAME.match(name):
                raise GraphFormatError(f"invalid node name {name!r}", lineno)
            if name.startswith(R_PREFIX):
                raise GraphFormatError(f"name {name!r} is reserved for missingness indicators", lineno)
            if name in kinds:
                raise GraphFormatError(f"duplicate node {name!r}", lineno)
            kinds[name] = kind
        elif parts[0] == "edge":
            if len(parts) != 4 or parts[2] not in ("->", "<->"):
                raise GraphFormatError("expected 'edge <a> -> <b>' or 'edge <a> <-> <b>'", lineno)
            a, arrow, b = parts[1:]
            if a == b:
                raise GraphFormatError(f"self-loop on {a!r}", lineno)
            if arrow == "->":
                key, store = (a, b), directed
            else:
                key, store = _bidirected_key(a, b), bidirected
            if key in store:
                raise GraphFormatError(f"duplicate edge {a} {arrow} {b}", lineno)
            store[key] = lineno
        else:
            raise GraphFormatError(f"unknown statement {parts[0]!r}", lineno)

    for name, kind in list(kinds.items()):
        if kind is NodeKind.PARTIAL:
            kinds[indicator_name(name)] = NodeKind.MISSINGNESS
    for store in (directed, bidirected):
        for (a, b), lineno in store.items():
            for n in (a, b):
                if n not in kinds:
                    raise GraphFormatError(f"undeclared node {n!r}", lineno)
    try:
        return MGraph(kinds, directed, bidirected)
    except MGraphError as exc:
        raise GraphFormatError(str(exc)) from exc


def serialize_mgraph(g):
    """Write ``g`` in the text format accepted by :func:`parse_mgraph`."""
    lines = []
    for name in g.nodes:
        kind = g.kind(name)
        if kind is NodeKind.MISSINGNESS:
            continue
        if kind is NodeKind.LATENT:
            raise MGraphError("latent nodes cannot be serialized")
        lines.append(f"node {name} {kind.value}")
    lines += [f"edge {a} -> {b}" for a, b in sorted(g.directed_edges)]
    lines += [f"edge {a} <-> {b}" for a, b in sorted(g.bidirected_edges)]
    return "\n".join(lines) + "\n"


# -- relations and transforms --------------------------------------------------

_RELATIONS = {
    "parents": MGraph.parents,
    "children": MGraph.children,
    "ancestors": MGraph.ancestors,
    "descendants": MGraph.descendants,
}


def relatives(g, nodes, kind):
    """Union of ``nodes`` and their parents/children/ancestors/descendants.

    Only directed edges are followed. ``kind`` is one of ``"parents"``,
    ``"children"``, ``"ancestors"``, ``"descendants"``.
    """
    try:
        fn = _RELATIONS[kind]
    except KeyError:
        raise ValueError(f"unknown relation {kind!r}") from None
    return fn(g, nodes)


def mutilate(g, remove_in=(), remove_out=()):
    """Delete incoming edges of ``remove_in`` and outgoing edges of ``remove_out``.

    A bidirected edge has an arrowhead at both ends, so it is removed when
    either endpoint is in ``remove_in``; ``remove_out`` leaves it alone.
    """
    rin = g.check_nodes(remove_in)
    rout = g.check_nodes(remove_out)
    directed = [(a, b) for a, b in g.directed_edges if b not in rin and a not in rout]
    bidirected = [(a, b) for a, b in g.bidirected_edges if a not in rin and b not in rin]
    return g._without_edges(directed, bidirected)


def dpcp(g, x, y):
    """Descendants of the non-treatment nodes on proper causal paths from x to y.

    All closures are taken in the graph with edges into ``x`` removed.
    """
    x = g.check_nodes(x)
    y = g.check_nodes(y)
    gx = mutilate(g, remove_in=x)
    on_paths = (gx.descendants(x) - x) & gx.ancestors(y)
    return gx.descendants(on_paths)


def _causal_starts(g, x, y):
    # nodes outside x with a directed path to y that avoids x
    y = frozenset(y) - x
    seen = set(y)
    stack = list(y)
    parents = g.parents_map
    while stack:
        for p in parents[stack.pop()]:
            if p not in seen and p not in x:
                seen.add(p)
                stack.append(p)
    return seen


def proper_backdoor(g, x, y):
    """Remove the first edge of every proper causal path from x to y."""
    x = g.check_nodes(x)
    y = g.check_nodes(y)
    starts = _causal_starts(g, x, y)
    directed = [(a, b) for a, b in g.directed_edges if not (a in x and b in starts)]
    return g._without_edges(directed, g.bidirected_edges)


def latent_name(a, b, taken=()):
    a, b = _bidirected_key(a, b)
    name = f"L_{a}_{b}"
    while name in taken:
        name += "_"
    return name


def canonicalize(g):
    """Replace each bidirected edge ``A <-> B`` by a latent ``L_A_B`` with ``L -> A, L -> B``."""
    if not g.bidirected_edges:
        return g
    kinds = g.kinds
    directed = set(g.directed_edges)
    for a, b in sorted(g.bidirected_edges):
        lat = latent_name(a, b, kinds)
        kinds[lat] = NodeKind.LATENT
        directed.add((lat, a))
        directed.add((lat, b))
    # a fresh parentless latent cannot create a cycle
    return MGraph._unchecked(kinds, directed, ())
