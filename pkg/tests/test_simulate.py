import math

import numpy as np
import pytest

from madjust import gallery
from madjust.estimate import load_csv, to_csv
from madjust.exceptions import GraphFormatError, MGraphError, QueryError
from madjust.mgraph import parse_mgraph
from madjust.simulate import MAX_JOINT, Scm, parse_scm, random_scm, sample, serialize_scm, true_effect

CHAIN_SCM = """\
node X obs
node Y obs
edge X -> Y
cpt X : 0.3 0.7
cpt Y | X=0 : 0.9 0.1
cpt Y | X=1 : 0.2 0.8
seed 1
"""


def test_parse_scm_fields():
    scm = parse_scm(CHAIN_SCM)
    assert scm.seed == 1
    assert scm.parents("Y") == ("X",)
    assert scm.cpts["Y"].tolist() == [[0.9, 0.1], [0.2, 0.8]]
    assert scm.domains["X"] == ("0", "1")


def test_parse_scm_domains_and_any_parent_order():
    scm = parse_scm(
        "node A obs\nnode B obs\nnode C obs\nedge A -> C\nedge B -> C\n"
        "domain A x y z\ncpt A : 0.2 0.3 0.5\ncpt B : 0.5 0.5\n"
        + "".join(f"cpt C | B={b},A={a} : 0.5 0.5\n" for a in "xyz" for b in "01")
    )
    assert scm.cpts["C"].shape == (3, 2, 2)
    assert scm.parents("C") == ("A", "B")


@pytest.mark.parametrize(
    "extra, fragment",
    [
        ("cpt Y | X=0 : 0.9 0.1\n", "incomplete"),
        ("cpt Y | X=0 : 0.9 0.1\ncpt Y | X=1 : 0.5 0.4\n", "sum to 1"),
        ("cpt Y | X=0 : 0.9 0.1\ncpt Y | X=0 : 0.9 0.1\n", "duplicate"),
        ("cpt Y | X=0 : 0.9\ncpt Y | X=1 : 1\n", "needs 2"),
        ("cpt Y : 0.5 0.5\n", "exactly"),
        ("cpt Y | X=2 : 0.5 0.5\n", "outside"),
        ("cpt Q : 1\n", "unknown node"),
        ("cpt Y X=0 0.5 0.5\n", "':'"),
        ("seed abc\n", "seed"),
        ("bogus 1\n", "unknown directive"),
        ("cpt Y | X : 0.5 0.5\n", "assignment"),
        ("cpt Y | X=0 : a b\n", "probabilities"),
    ],
)
def test_parse_scm_errors(extra, fragment):
    text = "node X obs\nnode Y obs\nedge X -> Y\ncpt X : 0.5 0.5\n" + extra
    with pytest.raises(GraphFormatError, match=fragment):
        parse_scm(text)


def test_indicator_domain_is_binary():
    with pytest.raises(GraphFormatError, match="domain"):
        parse_scm("node X mis\ndomain R_X a b\ncpt X : 0.5 0.5\ncpt R_X : 0.5 0.5\n")


def test_scm_constructor_checks_shapes():
    g = parse_mgraph("node X obs")
    with pytest.raises(MGraphError):
        Scm(g, {"X": ("0", "1")}, {"X": np.array([[0.5, 0.5]])})


@pytest.mark.parametrize("name", sorted(gallery.SCMS))
def test_serialize_round_trip(name):
    scm = gallery.load_scm(name)
    again = parse_scm(serialize_scm(scm))
    assert again.graph == scm.graph and again.seed == scm.seed
    for v in scm.cpts:
        assert np.array_equal(again.cpts[v], scm.cpts[v])


def test_bidirected_latents_get_cpts():
    g = gallery.load("latent_mnar")
    scm = random_scm(g, seed=2)
    assert {"L_X_1_Z_m2", "L_Y_Z_m1", "L_R_Z_m2_Y"} <= set(scm.cpts)
    again = parse_scm(serialize_scm(scm))
    assert np.allclose(again.cpts["L_Y_Z_m1"], scm.cpts["L_Y_Z_m1"])
    d = sample(scm, 100)
    assert set(d.columns) == set(g.variables)


def test_sample_is_deterministic():
    scm = gallery.load_scm("selection_mnar")
    assert to_csv(sample(scm, 500)) == to_csv(sample(scm, 500))
    assert to_csv(sample(scm, 500, seed=1)) != to_csv(sample(scm, 500, seed=2))


def test_sample_matches_cpt():
    scm = parse_scm(CHAIN_SCM)
    d = sample(scm, 10_000)
    x, y = d.codes["X"], d.codes["Y"]
    assert abs((y[x == 1] == 1).mean() - 0.8) < 0.02
    assert abs((y[x == 0] == 1).mean() - 0.1) < 0.02


def test_na_fraction_matches_mechanism():
    scm = gallery.load_scm("mnar_treatment")
    d = sample(scm, 100_000)
    px = scm.cpts["X"]
    expected = sum(px[v] * scm.cpts["R_X"][v][0] for v in range(2))
    assert abs((d.codes["X"] == -1).mean() - expected) < 0.02


def test_unselected_rows_are_all_na():
    scm = gallery.load_scm("selection_mnar")
    d = sample(scm, 5000)
    unselected = ~d.selected
    assert unselected.any()
    for c in d.columns:
        assert (d.codes[c][unselected] == -1).all()
    # round trip through the CSV format keeps the shape
    back = load_csv(to_csv(d))
    assert back.n_selected == d.n_selected


def test_true_effect_chain_and_backdoor():
    scm = parse_scm(CHAIN_SCM)
    t = true_effect(scm, {"X": 1}, ["Y"])
    assert t["1"] == pytest.approx(0.8)
    conf = gallery.load_scm("confounded")
    pz = conf.cpts["Z"]
    py = conf.cpts["Y"]  # parents (X, Z)
    expected = sum(py[1, z, 1] * pz[z] for z in range(2))
    assert true_effect(conf, {"X": 1}, ["Y"])["1"] == pytest.approx(expected, abs=1e-12)


def test_true_effect_ignores_missingness_mechanisms():
    g = gallery.load("indicator_dependent")
    a = random_scm(g, seed=5)
    cpts = dict(a.cpts)
    rng = np.random.default_rng(0)
    for r in ("R_V_m1", "R_V_m2"):
        cpts[r] = rng.dirichlet([1, 1], size=cpts[r].shape[:-1])
    b = Scm(g, a.domains, cpts, a.seed)
    assert true_effect(a, {"X": 0}, ["Y"]).entries == true_effect(b, {"X": 0}, ["Y"]).entries


def test_true_effect_with_latents_sums_to_one():
    scm = random_scm(gallery.load("latent_mnar"), seed=3, domains={"Y": "abc"})
    t = true_effect(scm, {"X_1": 0, "X_2": 1}, ["Y", "Z_m1"])
    assert len(t.entries) == 6
    assert math.isclose(t.total(), 1.0)


def test_true_effect_errors():
    scm = parse_scm(CHAIN_SCM)
    with pytest.raises(QueryError):
        true_effect(scm, {"X": 1}, ["X"])
    with pytest.raises(QueryError):
        true_effect(scm, {"X": 5}, ["Y"])
    big = gallery.exponential_family(6)
    wide = {v: [str(i) for i in range(4)] for v in big.variables}
    scm_big = random_scm(big, domains=wide)
    with pytest.raises(QueryError, match="exceed"):
        true_effect(scm_big, {"X": 1}, ["Y"])


def test_negative_n_rejected():
    with pytest.raises(ValueError):
        sample(parse_scm(CHAIN_SCM), -1)
