"""Bitset view of a DAG used by the reachability-based separation tests.

Node sets are Python ints with bit ``i`` standing for ``names[i]``. The
parent/child images of a whole set are computed through per-byte lookup
tables, so one expansion costs ``ceil(n / 8)`` dictionary-free list lookups
instead of a loop over members.
"""

from __future__ import annotations

from functools import lru_cache

_CHUNK = 8
_CHUNK_MASK = (1 << _CHUNK) - 1


def _tables(neigh):
    tables = []
    for start in range(0, len(neigh), _CHUNK):
        table = [0]
        for row in neigh[start:start + _CHUNK]:
            table += [t | row for t in table]
        # a short final block ignores the missing high bits
        tables.append(table * ((1 << _CHUNK) // len(table)))
    return tables


def _image(tables, mask):
    out = 0
    for table in tables:
        if not mask:
            break
        out |= table[mask & _CHUNK_MASK]
        mask >>= _CHUNK
    return out


class BitDag:
    """A DAG over ``names`` with bitmask parent and child sets."""

    __slots__ = ("names", "index", "par", "ch", "_ptab", "_ctab")

    def __init__(self, names, edges):
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.par = [0] * len(self.names)
        self.ch = [0] * len(self.names)
        for a, b in edges:
            ia, ib = self.index[a], self.index[b]
            self.par[ib] |= 1 << ia
            self.ch[ia] |= 1 << ib
        self._ptab = _tables(self.par)
        self._ctab = _tables(self.ch)

    @classmethod
    def from_mgraph(cls, g):
        if g.bidirected_edges:
            raise ValueError("BitDag needs a graph without bidirected edges")
        return cls(g.nodes, g.directed_edges)

    def mask(self, nodes):
        m = 0
        for n in nodes:
            m |= 1 << self.index[n]
        return m

    def names_of(self, mask):
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(self.names[i])
            mask >>= 1
            i += 1
        return out

    def parents_of(self, mask):
        return _image(self._ptab, mask)

    def children_of(self, mask):
        return _image(self._ctab, mask)

    def ancestors(self, mask):
        seen = frontier = mask
        while frontier:
            frontier = _image(self._ptab, frontier) & ~seen
            seen |= frontier
        return seen

    def extend_ancestors(self, closed, mask):
        """``ancestors(closed | mask)`` given that ``closed`` is already ancestral."""
        frontier = mask & ~closed
        seen = closed | frontier
        while frontier:
            frontier = _image(self._ptab, frontier) & ~seen
            seen |= frontier
        return seen

    def descendants(self, mask):
        seen = frontier = mask
        while frontier:
            frontier = _image(self._ctab, frontier) & ~seen
            seen |= frontier
        return seen

    def reachable(self, source, given):
        """Nodes d-connected to ``source`` given ``given`` (Bayes-ball traversal).

        A node is visited "up" when entered from a child and "down" when
        entered from a parent. Non-conditioned nodes pass the ball in every
        direction allowed by the chain/fork rules; a conditioned node, or one
        with a conditioned descendant, bounces a ball arriving from a parent
        back to its parents (opened collider).
        """
        anc = self.ancestors(given)
        free = ~given
        ptab, ctab = self._ptab, self._ctab
        up = fu = source
        down = fd = 0
        while fu or fd:
            pass_up = fu & free
            new_up = _image(ptab, pass_up | (fd & anc))
            new_down = _image(ctab, pass_up | (fd & free))
            fu = new_up & ~up
            fd = new_down & ~down
            up |= fu
            down |= fd
        return (up | down) & free

    def separated_within(self, closed, a, b, given):
        """Separation test when ``closed`` is ancestral and holds ``a | b | given``.

        Uses the moral graph of the subgraph on ``closed``: ``a`` and ``b``
        are d-separated by ``given`` iff no moral path joins them outside
        ``given``.
        """
        ptab, ctab = self._ptab, self._ctab
        open_ = closed & ~given
        seen = frontier = a
        while frontier:
            # inlined _image calls: this is the enumeration hot loop
            kids, m = 0, frontier
            for table in ctab:
                if not m:
                    break
                kids |= table[m & 255]
                m >>= 8
            kids &= closed
            reach, m = kids, frontier | kids
            for table in ptab:
                if not m:
                    break
                reach |= table[m & 255]
                m >>= 8
            reach &= open_ & ~seen
            if reach & b:
                return False
            seen |= reach
            frontier = reach
        return True

    def separated(self, a, b, given):
        return not (self.reachable(a, given) & b)


@lru_cache(maxsize=512)
def shared_bitdag(names, edges):
    """A cached :class:`BitDag`; criteria rebuild the same mutilated graphs often."""
    return BitDag(names, edges)
