import random

import pytest

from madjust import gallery
from madjust.exceptions import GraphFormatError, MGraphError, UnknownNodeError
from madjust.mgraph import (
    MGraph,
    NodeKind,
    canonicalize,
    dpcp,
    mutilate,
    parse_mgraph,
    proper_backdoor,
    relatives,
    serialize_mgraph,
)


def test_parse_minimal_chain():
    g = parse_mgraph("node X obs\nnode Y obs\nedge X -> Y")
    assert g.nodes == ("X", "Y")
    assert g.directed_edges == frozenset({("X", "Y")})


def test_parse_mnar_treatment_kinds():
    g = gallery.load("mnar_treatment")
    assert g.kind("X") is NodeKind.PARTIAL
    assert g.kind("Y") is NodeKind.OBSERVED
    assert g.kind("R_X") is NodeKind.MISSINGNESS
    assert g.indicators == frozenset({"R_X"})


def test_mis_declaration_creates_indicator_without_edges():
    g = parse_mgraph("node Z mis")
    assert g.nodes == ("R_Z", "Z")
    assert not g.directed_edges


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("node X obs\nedge X -> X", "self-loop"),
        ("node X obs\nnode X mis", "duplicate node"),
        ("node R_A obs", "reserved"),
        ("node X obs\nedge X -> Y", "undeclared"),
        ("node X obs\nnode Y obs\nedge X -> Y\nedge Y -> X", "cycle"),
        ("node X obs\nnode Y obs\nedge X -> Y\nedge X -> Y", "duplicate edge"),
        ("node X obs\nnode Y obs\nedge X <-> Y\nedge Y <-> X", "duplicate edge"),
        ("node X mis\nnode Y obs\nedge R_X -> Y", "may not be a parent"),
        ("node X obs\nnode S sel\nedge S -> X", "may not"),
        ("node X obs\nnode S sel\nnode T sel", "at most one selection"),
        ("node X obs\nnode S sel\nedge X <-> S", "bidirected"),
        ("node X foo", "expected 'node"),
        ("vertex X", "unknown statement"),
        ("node X obs\nnode Y obs\nedge X - Y", "expected 'edge"),
        ("node 1X obs", "invalid node name"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        parse_mgraph(text)


def test_parse_error_reports_line_number():
    with pytest.raises(GraphFormatError) as info:
        parse_mgraph("# header\nnode X obs\nnode X obs\n")
    assert info.value.lineno == 3
    assert str(info.value).startswith("line 3:")


def test_indicator_may_point_into_indicator_and_have_bidirected_edges():
    g = parse_mgraph("node A mis\nnode B mis\nedge R_A -> R_B\nedge A <-> R_B\nedge R_A <-> R_B")
    assert ("R_A", "R_B") in g.directed_edges
    assert len(g.bidirected_edges) == 2


def test_constructor_rejects_unpaired_indicator():
    with pytest.raises(MGraphError):
        MGraph({"A": NodeKind.PARTIAL})
    with pytest.raises(MGraphError):
        MGraph({"R_A": NodeKind.MISSINGNESS, "A": NodeKind.OBSERVED})


@pytest.mark.parametrize("name", sorted(gallery.NAMED))
def test_round_trip_gallery(name):
    g = gallery.load(name)
    assert parse_mgraph(serialize_mgraph(g)) == g


def test_round_trip_random():
    rng = random.Random(4)
    for _ in range(50):
        g = gallery.random_mgraph(rng, rng.randint(1, 8), selection=rng.random() < 0.3)
        assert parse_mgraph(serialize_mgraph(g)) == g


def test_serializer_order():
    text = serialize_mgraph(parse_mgraph("node B obs\nnode A obs\nedge B <-> A\nedge A -> B"))
    assert text == "node A obs\nnode B obs\nedge A -> B\nedge A <-> B\n"


def test_relatives_chain_and_empty():
    g = parse_mgraph("node X obs\nnode Y obs\nnode W obs\nedge X -> Y\nedge Y -> W")
    assert relatives(g, {"X"}, "descendants") == {"X", "Y", "W"}
    assert relatives(g, {"W"}, "ancestors") == {"X", "Y", "W"}
    assert relatives(g, {"Y"}, "parents") == {"X", "Y"}
    assert relatives(g, {"Y"}, "children") == {"Y", "W"}
    assert relatives(g, set(), "ancestors") == frozenset()
    with pytest.raises(ValueError):
        relatives(g, {"X"}, "cousins")
    with pytest.raises(UnknownNodeError):
        relatives(g, {"Q"}, "ancestors")


def test_relatives_ignores_bidirected_edges():
    g = gallery.load("latent_mnar")
    assert relatives(g, {"X_1"}, "descendants") == {"X_1", "Y"}


def test_mutilate_conventions():
    g = parse_mgraph("node Z obs\nnode X obs\nnode Y obs\nedge Z -> X\nedge X -> Y")
    assert mutilate(g, remove_in={"X"}).directed_edges == {("X", "Y")}
    h = parse_mgraph("node X obs\nnode Y obs\nnode Z obs\nedge X -> Y\nedge X <-> Z")
    cut_in = mutilate(h, remove_in={"X"})
    assert cut_in.directed_edges == {("X", "Y")} and not cut_in.bidirected_edges
    cut_out = mutilate(h, remove_out={"X"})
    assert not cut_out.directed_edges and cut_out.bidirected_edges == {("X", "Z")}


def test_dpcp_examples():
    g = gallery.load("latent_mnar")
    assert dpcp(g, {"X_1", "X_2"}, {"Y"}) == {"Y"}
    assert dpcp(parse_mgraph("node X obs\nnode Y obs\nedge X -> Y"), {"X"}, {"Y"}) == {"Y"}
    assert dpcp(parse_mgraph("node X obs\nnode Y obs\nedge Y -> X"), {"X"}, {"Y"}) == frozenset()


def test_dpcp_inside_descendants_of_x():
    rng = random.Random(9)
    for _ in range(100):
        g = gallery.random_mgraph(rng, rng.randint(2, 7))
        x, y = rng.sample(sorted(g.variables), 2)
        assert dpcp(g, {x}, {y}) <= relatives(g, {x}, "descendants")


def test_proper_backdoor_examples():
    g = gallery.load("latent_mnar")
    pbd = proper_backdoor(g, {"X_1", "X_2"}, {"Y"})
    assert g.directed_edges - pbd.directed_edges == {("X_1", "Y"), ("X_2", "Y")}
    assert pbd.bidirected_edges == g.bidirected_edges
    h = parse_mgraph("node X obs\nnode Z obs\nnode Y obs\nedge X -> Z\nedge Z -> Y")
    assert proper_backdoor(h, {"X"}, {"Y"}).directed_edges == {("Z", "Y")}
    k = parse_mgraph("node X obs\nnode Y obs\nedge Y -> X")
    assert proper_backdoor(k, {"X"}, {"Y"}) == k


def test_proper_backdoor_keeps_edges_into_paths_through_x():
    # X1 -> X2 -> Y: the edge X1 -> X2 enters x again, so it is not a first edge
    g = parse_mgraph("node X1 obs\nnode X2 obs\nnode Y obs\nedge X1 -> X2\nedge X2 -> Y")
    pbd = proper_backdoor(g, {"X1", "X2"}, {"Y"})
    assert pbd.directed_edges == {("X1", "X2")}


def test_proper_backdoor_only_removes_x_tails():
    rng = random.Random(2)
    for _ in range(100):
        g = gallery.random_mgraph(rng, rng.randint(2, 7))
        x, y = rng.sample(sorted(g.variables), 2)
        removed = g.directed_edges - proper_backdoor(g, {x}, {y}).directed_edges
        assert all(a == x for a, _ in removed)


def test_canonicalize():
    g = parse_mgraph("node X obs\nnode Y obs\nedge X <-> Y")
    c = canonicalize(g)
    assert c.latents == {"L_X_Y"}
    assert c.directed_edges == {("L_X_Y", "X"), ("L_X_Y", "Y")}
    assert not c.bidirected_edges
    plain = gallery.load("confounded")
    assert canonicalize(plain) == plain
    g0 = gallery.load("latent_mnar")
    cf = canonicalize(g0)
    assert len(cf.latents) == 3
    assert len(cf.directed_edges) == len(g0.directed_edges) + 6
    assert cf.kind("R_Z_m2") is NodeKind.MISSINGNESS
    with pytest.raises(MGraphError):
        serialize_mgraph(cf)


def test_latent_names_avoid_collisions():
    g = parse_mgraph("node L_A_B obs\nnode A obs\nnode B obs\nedge A <-> B")
    assert canonicalize(g).latents == {"L_A_B_"}


def test_topological_order_respects_edges():
    g = canonicalize(gallery.load("selection_mnar"))
    pos = {n: i for i, n in enumerate(g.topological_order)}
    assert all(pos[a] < pos[b] for a, b in g.directed_edges)


def test_graph_is_hashable_and_comparable():
    a = gallery.load("mar")
    b = gallery.load("mar")
    assert a == b and hash(a) == hash(b)
    assert a != gallery.load("mnar")
