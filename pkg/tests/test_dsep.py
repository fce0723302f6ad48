import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from madjust import gallery
from madjust.dsep import ORACLE_MAX_NODES, d_separated, d_separated_oracle
from madjust.exceptions import QueryError
from madjust.mgraph import canonicalize, mutilate, parse_mgraph

BOTH = pytest.mark.parametrize("fn", [d_separated, d_separated_oracle])


@BOTH
def test_gallery_examples(fn):
    assert not fn(gallery.load("indicator_dependent"), {"V_m2"}, {"R_V_m2"})
    assert not fn(gallery.load("latent_mnar"), {"Z_m3"}, {"R_Z_m3"})


@BOTH
def test_small_cases(fn):
    iso = parse_mgraph("node A obs\nnode B obs")
    assert fn(iso, {"A"}, {"B"})
    chain = parse_mgraph("node X obs\nnode Z obs\nnode Y obs\nedge X -> Z\nedge Z -> Y")
    assert fn(chain, {"X"}, {"Y"}, {"Z"})
    assert not fn(chain, {"X"}, {"Y"})
    collider = parse_mgraph("node X obs\nnode Z obs\nnode Y obs\nedge X -> Z\nedge Y -> Z")
    assert not fn(collider, {"X"}, {"Y"}, {"Z"})
    assert fn(collider, {"X"}, {"Y"})


@BOTH
def test_descendant_of_collider_opens_it(fn):
    g = parse_mgraph("node X obs\nnode Y obs\nnode C obs\nnode D obs\nedge X -> C\nedge Y -> C\nedge C -> D")
    assert not fn(g, {"X"}, {"Y"}, {"D"})


@BOTH
def test_bidirected_edges(fn):
    g = parse_mgraph("node X obs\nnode Y obs\nnode Z obs\nedge X <-> Z\nedge Z <-> Y")
    assert fn(g, {"X"}, {"Y"})
    assert not fn(g, {"X"}, {"Y"}, {"Z"})


def test_query_validation():
    g = gallery.load("confounded")
    with pytest.raises(QueryError):
        d_separated(g, set(), {"Y"})
    with pytest.raises(QueryError):
        d_separated(g, {"X"}, {"X"})
    with pytest.raises(QueryError):
        d_separated(g, {"X"}, {"Y"}, {"X"})
    lat = canonicalize(parse_mgraph("node A obs\nnode B obs\nnode C obs\nedge A <-> B"))
    with pytest.raises(QueryError, match="latent"):
        d_separated(lat, {"A"}, {"C"}, {"L_A_B"})


def test_oracle_size_guard():
    g = gallery.exponential_family(3)
    assert len(canonicalize(g)) > ORACLE_MAX_NODES
    with pytest.raises(ValueError):
        d_separated_oracle(g, {"X"}, {"Y"})


def _triples(g, rng, limit):
    nodes = sorted(g.nodes)
    out = []
    for a, b in itertools.permutations(nodes, 2):
        rest = [n for n in nodes if n not in (a, b)]
        c = frozenset(n for n in rest if rng.random() < 0.35)
        out.append((a, b, c))
    rng.shuffle(out)
    return out[:limit]


def test_oracle_agreement_random():
    rng = random.Random(17)
    for _ in range(60):
        g = gallery.random_mgraph(rng, rng.randint(2, 6), selection=rng.random() < 0.3)
        if len(canonicalize(g)) > ORACLE_MAX_NODES:
            continue
        for a, b, c in _triples(g, rng, 30):
            assert d_separated(g, {a}, {b}, c) == d_separated_oracle(g, {a}, {b}, c), (a, b, c)


def test_symmetry_composition_and_monotone_mutilation():
    rng = random.Random(23)
    for _ in range(80):
        g = gallery.random_mgraph(rng, rng.randint(3, 8))
        nodes = sorted(g.nodes)
        a, b, b2 = rng.sample(nodes, 3)
        c = frozenset(n for n in nodes if n not in (a, b, b2) and rng.random() < 0.3)
        sep_ab = d_separated(g, {a}, {b}, c)
        assert sep_ab == d_separated(g, {b}, {a}, c)
        sep_ab2 = d_separated(g, {a}, {b2}, c)
        assert (sep_ab and sep_ab2) == d_separated(g, {a}, {b, b2}, c)
        cut = mutilate(g, remove_in={rng.choice(nodes)}, remove_out={rng.choice(nodes)})
        if sep_ab:
            assert d_separated(cut, {a}, {b}, c)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10 ** 6), size=st.integers(2, 6))
def test_oracle_agreement_property(seed, size):
    rng = random.Random(seed)
    g = gallery.random_mgraph(rng, size, bidirected_prob=0.2)
    if len(canonicalize(g)) > ORACLE_MAX_NODES:
        return
    for a, b, c in _triples(g, rng, 10):
        assert d_separated(g, {a}, {b}, c) == d_separated_oracle(g, {a}, {b}, c)
