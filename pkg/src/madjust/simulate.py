"""Discrete structural causal models over m-graphs.

An :class:`Scm` attaches a finite domain and a conditional probability
table (CPT) to every node of the canonicalized graph, latents included.
:func:`sample` draws a :class:`~madjust.estimate.Dataset` with the
missingness and selection mechanisms applied; :func:`true_effect` computes
``P(y | do(x))`` exactly by truncated factorization.

SCM text format: the graph lines of the m-graph format, followed by any of

``domain X a b c``
    categories of ``X`` (default ``0 1``; indicators and ``S`` are fixed
    to ``0 1``);
``cpt X : p1 p2 ...``
    distribution of a parentless node over its domain;
``cpt Y | X=0,Z=1 : p1 p2 ...``
    one CPT row per joint parent value, parents in any order;
``seed N``
    default seed for :func:`sample`.

Latent nodes created for ``A <-> B`` are named ``L_A_B`` (``A < B``).
"""

from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .estimate import Dataset, DistTable
from .exceptions import GraphFormatError, MGraphError, QueryError
from .mgraph import NodeKind, canonicalize, mutilate, parse_mgraph, serialize_mgraph

__all__ = [
    "Scm",
    "parse_scm",
    "serialize_scm",
    "random_scm",
    "sample",
    "true_effect",
    "MAX_JOINT",
]

MAX_JOINT = 2 ** 20
_BINARY = ("0", "1")
_GRAPH_WORDS = ("node", "edge")


@dataclass(frozen=True, eq=False)
class Scm:
    """A discrete SCM.

    ``cpts[v]`` is an array of shape ``(|dom(p1)|, ..., |dom(pk)|, |dom(v)|)``
    with the parents ``p1..pk`` of ``v`` in the canonical graph in sorted
    order. ``graph`` is the original (possibly bidirected) m-graph.
    """

    graph: object
    domains: dict
    cpts: dict
    seed: int = 0

    def __post_init__(self):
        dag = canonicalize(self.graph)
        if set(self.domains) != set(dag.nodes) or set(self.cpts) != set(dag.nodes):
            raise MGraphError("domains and CPTs must cover exactly the canonical graph's nodes")
        for v in dag.nodes:
            if dag.kind(v) in (NodeKind.MISSINGNESS, NodeKind.SELECTION) and tuple(self.domains[v]) != _BINARY:
                raise MGraphError(f"{v} must have domain (0, 1)")
            shape = tuple(len(self.domains[p]) for p in self.parents(v)) + (len(self.domains[v]),)
            table = np.asarray(self.cpts[v], dtype=float)
            if table.shape != shape:
                raise MGraphError(f"CPT of {v} has shape {table.shape}, expected {shape}")
            if (table < 0).any() or not np.allclose(table.sum(axis=-1), 1.0, atol=1e-9, rtol=0):
                raise MGraphError(f"CPT rows of {v} must be nonnegative and sum to 1")

    @cached_property
    def dag(self):
        return canonicalize(self.graph)

    @cached_property
    def _parents(self):
        return {v: tuple(sorted(ps)) for v, ps in self.dag.parents_map.items()}

    def parents(self, v):
        return self._parents[v]


def _parse_assignment(text, lineno):
    out = {}
    for part in text.split(","):
        name, eq, value = part.strip().partition("=")
        if not eq or not name or not value:
            raise GraphFormatError(f"bad parent assignment {part.strip()!r}", lineno)
        out[name.strip()] = value.strip()
    return out


def _parse_probs(text, lineno):
    try:
        return [float(t) for t in text.split()]
    except ValueError:
        raise GraphFormatError(f"bad probabilities {text.strip()!r}", lineno) from None


def parse_scm(text):
    """Parse SCM text (see the module docstring) into an :class:`Scm`."""
    graph_lines, extra = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        word = raw.split("#", 1)[0].split()
        if word and word[0] not in _GRAPH_WORDS:
            extra.append((lineno, raw.split("#", 1)[0].strip()))
            graph_lines.append("")
        else:
            graph_lines.append(raw)
    graph = parse_mgraph("\n".join(graph_lines))
    dag = canonicalize(graph)

    domains = dict.fromkeys(dag.nodes, _BINARY)
    rows = {v: {} for v in dag.nodes}
    seed = 0
    for lineno, line in extra:
        word, _, rest = line.partition(" ")
        if word == "seed":
            try:
                seed = int(rest)
            except ValueError:
                raise GraphFormatError(f"bad seed {rest!r}", lineno) from None
        elif word == "domain":
            parts = rest.split()
            if len(parts) < 2:
                raise GraphFormatError("domain needs a node and at least one value", lineno)
            v, values = parts[0], tuple(parts[1:])
            if v not in dag:
                raise GraphFormatError(f"unknown node {v!r}", lineno)
            if len(set(values)) != len(values):
                raise GraphFormatError(f"duplicate values in domain of {v}", lineno)
            domains[v] = values
        elif word == "cpt":
            head, colon, probs = rest.partition(":")
            if not colon:
                raise GraphFormatError("cpt line needs ':' before the probabilities", lineno)
            v, bar, cond = head.partition("|")
            v = v.strip()
            if v not in dag:
                raise GraphFormatError(f"unknown node {v!r}", lineno)
            given = _parse_assignment(cond, lineno) if bar else {}
            key = tuple(sorted(given.items()))
            if key in rows[v]:
                raise GraphFormatError(f"duplicate CPT row for {v}", lineno)
            rows[v][key] = (lineno, _parse_probs(probs, lineno))
        else:
            raise GraphFormatError(f"unknown directive {word!r}", lineno)

    cpts = {}
    for v in dag.nodes:
        parents = tuple(sorted(dag.parents_map[v]))
        shape = tuple(len(domains[p]) for p in parents) + (len(domains[v]),)
        table = np.full(shape, np.nan)
        for key, (lineno, probs) in rows[v].items():
            given = dict(key)
            if set(given) != set(parents):
                raise GraphFormatError(f"CPT row of {v} must condition on exactly {list(parents)}", lineno)
            try:
                idx = tuple(domains[p].index(given[p]) for p in parents)
            except ValueError:
                raise GraphFormatError(f"CPT row of {v} uses a value outside a parent domain", lineno) from None
            if len(probs) != len(domains[v]):
                raise GraphFormatError(f"CPT row of {v} needs {len(domains[v])} probabilities", lineno)
            table[idx] = probs
        if np.isnan(table).any():
            raise GraphFormatError(f"CPT of {v} is incomplete")
        cpts[v] = table
    try:
        return Scm(graph, domains, cpts, seed)
    except MGraphError as exc:
        raise GraphFormatError(str(exc)) from None


def serialize_scm(scm):
    """Inverse of :func:`parse_scm` (probabilities written with ``repr``)."""
    lines = [serialize_mgraph(scm.graph).rstrip("\n")]
    dag = scm.dag
    for v in dag.nodes:
        if tuple(scm.domains[v]) != _BINARY:
            lines.append(f"domain {v} " + " ".join(scm.domains[v]))
    for v in dag.nodes:
        parents = scm.parents(v)
        for idx in itertools.product(*(range(len(scm.domains[p])) for p in parents)):
            probs = " ".join(repr(float(p)) for p in scm.cpts[v][idx])
            if parents:
                cond = ",".join(f"{p}={scm.domains[p][i]}" for p, i in zip(parents, idx))
                lines.append(f"cpt {v} | {cond} : {probs}")
            else:
                lines.append(f"cpt {v} : {probs}")
    lines.append(f"seed {scm.seed}")
    return "\n".join(lines) + "\n"


def random_scm(graph, seed=0, domains=None, concentration=1.0):
    """Draw every CPT row from a symmetric Dirichlet distribution.

    ``domains`` optionally overrides the default binary domain of any
    variable or latent.
    """
    rng = np.random.default_rng(seed)
    dag = canonicalize(graph)
    doms = {v: _BINARY for v in dag.nodes}
    for v, values in (domains or {}).items():
        doms[v] = tuple(str(x) for x in values)
    cpts = {}
    for v in dag.nodes:
        parents = sorted(dag.parents_map[v])
        shape = tuple(len(doms[p]) for p in parents)
        cpts[v] = rng.dirichlet([concentration] * len(doms[v]), size=shape or None)
    return Scm(graph, doms, cpts, seed)


def sample(scm, n, seed=None):
    """Forward-sample ``n`` rows.

    Cells of a partially observed variable are NA where its indicator is 0;
    if the graph has a selection node, rows with ``S = 0`` are all NA. The
    output columns are the graph's variables in sorted order, plus the
    selection column. ``seed`` defaults to ``scm.seed``; the stream is
    numpy's ``default_rng(seed)`` drawing one uniform vector per node in
    topological order.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = np.random.default_rng(scm.seed if seed is None else seed)
    dag = scm.dag
    values = {}
    for v in dag.topological_order:
        parents = scm.parents(v)
        table = scm.cpts[v]
        rows = table[tuple(values[p] for p in parents)] if parents else np.broadcast_to(table, (n, table.shape[-1]))
        cum = np.cumsum(rows, axis=-1)
        u = rng.random(n)
        drawn = (u[:, None] >= cum[:, :-1]).sum(axis=1) if n else np.zeros(0, dtype=np.int64)
        values[v] = drawn.astype(np.int64)

    g = scm.graph
    columns = tuple(sorted(g.variables))
    sel = g.selection
    selected = values[sel] == 1 if sel is not None else np.ones(n, dtype=bool)
    codes = {}
    for v in columns:
        c = values[v].copy()
        if g.kind(v) is NodeKind.PARTIAL:
            c[values["R_" + v] == 0] = -1
        c[~selected] = -1
        codes[v] = c
    domains = {v: tuple(scm.domains[v]) for v in columns}
    return Dataset(columns, domains, codes, selected, sel)


def true_effect(scm, x, y_vars):
    """Exact ``P(y | do(x))`` by truncated factorization.

    Sums the product of the CPTs of every non-intervened variable and
    latent (indicator and selection factors excluded) over the ancestors
    of ``y`` in the graph with edges into ``x`` removed.

    Raises
    ------
    QueryError
        Bad query, or more than ``MAX_JOINT`` joint states to sum over.
    """
    g = scm.graph
    x = {str(k): str(v) for k, v in dict(x).items()}
    y_vars = tuple(y_vars)
    xs, ys = g.check_nodes(x), g.check_nodes(y_vars)
    if not ys or xs & ys:
        raise QueryError("y must be nonempty and disjoint from x")
    bad = sorted(v for v in xs | ys if v not in g.variables)
    if bad:
        raise QueryError(f"only variables can be intervened on or queried, got {bad}")
    for v, value in x.items():
        if value not in scm.domains[v]:
            raise QueryError(f"{value!r} is not in the domain of {v}")

    dag = mutilate(scm.dag, remove_in=xs)
    keep = [v for v in dag.ancestors(ys) if v not in xs]
    joint = math.prod(len(scm.domains[v]) for v in keep)
    if joint > MAX_JOINT:
        raise QueryError(f"{joint} joint states exceed the limit of {MAX_JOINT}")
    if len(keep) > len(string.ascii_letters):
        raise QueryError("too many variables for exact summation")

    letter = dict(zip(sorted(keep), string.ascii_letters))
    operands, subscripts = [], []
    for v in sorted(keep):
        parents = scm.parents(v)  # parents in the unmutilated graph, v not in x
        table = scm.cpts[v]
        index = tuple(scm.domains[p].index(x[p]) if p in xs else slice(None) for p in parents)
        operands.append(table[index])
        subscripts.append("".join(letter[p] for p in parents if p not in xs) + letter[v])
    out = "".join(letter[v] for v in y_vars)
    probs = np.einsum(",".join(subscripts) + "->" + out, *operands, optimize=True)
    keys = itertools.product(*(scm.domains[v] for v in y_vars))
    return DistTable(y_vars, {k: float(p) for k, p in zip(keys, probs.reshape(-1))})
