"""Small named m-graphs used in the demos, the CLI tests and the test suite.

Each constant is graph text; :func:`load` parses one by name.
"""

from __future__ import annotations

from .mgraph import parse_mgraph

CONFOUNDED = """\
# Z confounds X -> Y
node X obs
node Y obs
node Z obs
edge Z -> X
edge Z -> Y
edge X -> Y
"""

MNAR_TREATMENT = """\
# treatment missing depending on its own value
node X mis
node Y obs
edge X -> Y
edge X -> R_X
"""

CONFOUNDED_MNAR = """\
# missingness of X depends on X and on the outcome
node X mis
node Y obs
node Z obs
edge X -> Y
edge Z -> X
edge Z -> Y
edge X -> R_X
edge Y -> R_X
"""

MCAR = """\
node FI obs
node PE obs
node CE mis
edge FI -> CE
edge PE -> CE
"""

MAR = MCAR + "edge FI -> R_CE\n"

MNAR = MCAR + "edge CE -> R_CE\n"

LATENT_MNAR = """\
# two treatments, three partially observed covariates, three latent confounders
node X_1 obs
node X_2 obs
node Y obs
node Z_m1 mis
node Z_m2 mis
node Z_m3 mis
edge Z_m3 -> X_1
edge X_1 -> Y
edge X_2 -> Y
edge Z_m2 -> X_2
edge Z_m1 -> Z_m3
edge Z_m1 -> R_Z_m3
edge R_Z_m1 -> R_Z_m2
edge X_1 <-> Z_m2
edge Z_m1 <-> Y
edge Y <-> R_Z_m2
"""

INDICATOR_DEPENDENT = """\
# V_m2 drives both indicators; {V_m1} and {V_m1, V_m2} recover the effect
node X obs
node Y obs
node V_m1 mis
node V_m2 mis
edge V_m2 -> R_V_m1
edge V_m2 -> R_V_m2
edge V_m2 -> X
edge V_m1 -> X
edge V_m1 -> Y
edge X -> Y
"""

SELECTED_TREATMENT = """\
node X obs
node Y obs
node S sel
edge X -> Y
edge X -> S
"""

MNAR_SELECTION = """\
# X missing depending on itself, selection driven by the outcome
node X mis
node Y obs
node S sel
edge X -> Y
edge X -> R_X
edge Y -> S
"""

SELECTION_MNAR = """\
# selection and outcome missingness both driven by X_2
node X_1 obs
node X_2 obs
node Y mis
node V_1 mis
node V_2 obs
node V_3 obs
node V_4 obs
node V_5 mis
node S sel
edge V_1 -> X_1
edge V_2 -> V_1
edge V_2 -> V_3
edge V_4 -> V_3
edge V_4 -> R_V_1
edge V_2 -> Y
edge X_1 -> Y
edge X_2 -> Y
edge X_2 -> S
edge X_2 -> R_Y
edge X_1 -> V_5
edge Y -> V_5
edge V_5 -> R_V_5
"""

NAMED = {
    "confounded": CONFOUNDED,
    "mnar_treatment": MNAR_TREATMENT,
    "confounded_mnar": CONFOUNDED_MNAR,
    "mcar": MCAR,
    "mar": MAR,
    "mnar": MNAR,
    "latent_mnar": LATENT_MNAR,
    "indicator_dependent": INDICATOR_DEPENDENT,
    "selected_treatment": SELECTED_TREATMENT,
    "mnar_selection": MNAR_SELECTION,
    "selection_mnar": SELECTION_MNAR,
}


def load(name):
    """Parse a gallery graph by name (see ``NAMED``)."""
    return parse_mgraph(NAMED[name])


def exponential_family_text(k):
    """Graph text for the family with ``k`` parallel backdoor paths.

    Path ``i`` runs ``X <- Vi1 -> Vi2 -> Vi3 -> Y``; ``Vi1`` and ``Vi3`` are
    partially observed. Their indicators hang off ``V_1`` (also a parent of
    X) and ``V_3`` (which shares the child ``V_2`` with Y). Every nonempty
    subset of each path's three nodes blocks that path, so the number of
    valid covariate sets grows like ``7 ** k``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    lines = [
        "node X obs",
        "node Y obs",
        "node V_1 obs",
        "node V_2 obs",
        "node V_3 obs",
        "edge X -> Y",
        "edge V_1 -> X",
        "edge Y -> V_2",
        "edge V_3 -> V_2",
    ]
    for i in range(1, k + 1):
        a, b, c = f"V{i}1", f"V{i}2", f"V{i}3"
        lines += [
            f"node {a} mis",
            f"node {b} obs",
            f"node {c} mis",
            f"edge {a} -> X",
            f"edge {a} -> {b}",
            f"edge {b} -> {c}",
            f"edge {c} -> Y",
            f"edge V_1 -> R_{a}",
            f"edge V_3 -> R_{c}",
        ]
    return "\n".join(lines) + "\n"


def exponential_family(k):
    return parse_mgraph(exponential_family_text(k))


def random_mgraph(rng, n_vars, edge_prob=0.35, mis_prob=0.4, bidirected_prob=0.1,
                  indicator_prob=0.25, selection=False):
    """Random m-graph over ``n_vars`` variables named ``A``, ``B``, ...

    ``rng`` is a :class:`random.Random`. Directed edges follow a random
    topological order; indicators get parents among the variables and
    earlier indicators. With ``selection=True`` a sink ``S`` is added with
    at least one variable parent.
    """
    if not 1 <= n_vars <= 26:
        raise ValueError("n_vars must be between 1 and 26")
    names = [chr(ord("A") + i) for i in range(n_vars)]
    rng.shuffle(names)
    lines = []
    partial = []
    for v in names:
        kind = "mis" if rng.random() < mis_prob else "obs"
        lines.append(f"node {v} {kind}")
        if kind == "mis":
            partial.append(v)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if rng.random() < edge_prob:
                lines.append(f"edge {a} -> {b}")
            if rng.random() < bidirected_prob:
                lines.append(f"edge {a} <-> {b}")
    indicators = [f"R_{v}" for v in partial]
    for j, r in enumerate(indicators):
        for src in names + indicators[:j]:
            if rng.random() < indicator_prob:
                lines.append(f"edge {src} -> {r}")
        for v in names:
            if rng.random() < bidirected_prob / 2:
                lines.append(f"edge {v} <-> {r}")
    if selection:
        lines.append("node S sel")
        parents = [v for v in names if rng.random() < indicator_prob] or [rng.choice(names)]
        lines += [f"edge {v} -> S" for v in parents]
    return parse_mgraph("\n".join(lines) + "\n")


# -- SCM fixtures (binary, fixed parameters) -------------------------------------

SCM_MNAR_TREATMENT = MNAR_TREATMENT + """\
cpt X : 0.4 0.6
cpt Y | X=0 : 0.7 0.3
cpt Y | X=1 : 0.2 0.8
cpt R_X | X=0 : 0.1 0.9
cpt R_X | X=1 : 0.5 0.5
seed 11
"""

SCM_CONFOUNDED = CONFOUNDED + """\
cpt Z : 0.3 0.7
cpt X | Z=0 : 0.8 0.2
cpt X | Z=1 : 0.25 0.75
cpt Y | X=0,Z=0 : 0.9 0.1
cpt Y | X=0,Z=1 : 0.5 0.5
cpt Y | X=1,Z=0 : 0.6 0.4
cpt Y | X=1,Z=1 : 0.15 0.85
seed 5
"""

SCM_INDICATOR_DEPENDENT = INDICATOR_DEPENDENT + """\
cpt V_m1 : 0.45 0.55
cpt V_m2 : 0.6 0.4
cpt X | V_m1=0,V_m2=0 : 0.8 0.2
cpt X | V_m1=0,V_m2=1 : 0.5 0.5
cpt X | V_m1=1,V_m2=0 : 0.35 0.65
cpt X | V_m1=1,V_m2=1 : 0.1 0.9
cpt Y | X=0,V_m1=0 : 0.85 0.15
cpt Y | X=0,V_m1=1 : 0.4 0.6
cpt Y | X=1,V_m1=0 : 0.55 0.45
cpt Y | X=1,V_m1=1 : 0.1 0.9
cpt R_V_m1 | V_m2=0 : 0.1 0.9
cpt R_V_m1 | V_m2=1 : 0.6 0.4
cpt R_V_m2 | V_m2=0 : 0.3 0.7
cpt R_V_m2 | V_m2=1 : 0.7 0.3
seed 20
"""

# the complete-case estimate with z={Z} is badly biased here: whether X is
# recorded depends strongly on the outcome
SCM_CONFOUNDED_MNAR = CONFOUNDED_MNAR + """\
cpt Z : 0.5 0.5
cpt X | Z=0 : 0.7 0.3
cpt X | Z=1 : 0.3 0.7
cpt Y | X=0,Z=0 : 0.8 0.2
cpt Y | X=0,Z=1 : 0.6 0.4
cpt Y | X=1,Z=0 : 0.5 0.5
cpt Y | X=1,Z=1 : 0.3 0.7
cpt R_X | X=0,Y=0 : 0.2 0.8
cpt R_X | X=0,Y=1 : 0.2 0.8
cpt R_X | X=1,Y=0 : 0.9 0.1
cpt R_X | X=1,Y=1 : 0.1 0.9
seed 3
"""

SCM_SELECTION_MNAR = SELECTION_MNAR + """\
cpt V_2 : 0.4 0.6
cpt V_4 : 0.5 0.5
cpt X_2 : 0.55 0.45
cpt V_1 | V_2=0 : 0.75 0.25
cpt V_1 | V_2=1 : 0.3 0.7
cpt V_3 | V_2=0,V_4=0 : 0.9 0.1
cpt V_3 | V_2=0,V_4=1 : 0.6 0.4
cpt V_3 | V_2=1,V_4=0 : 0.4 0.6
cpt V_3 | V_2=1,V_4=1 : 0.2 0.8
cpt X_1 | V_1=0 : 0.7 0.3
cpt X_1 | V_1=1 : 0.25 0.75
cpt Y | V_2=0,X_1=0,X_2=0 : 0.9 0.1
cpt Y | V_2=0,X_1=0,X_2=1 : 0.7 0.3
cpt Y | V_2=0,X_1=1,X_2=0 : 0.6 0.4
cpt Y | V_2=0,X_1=1,X_2=1 : 0.4 0.6
cpt Y | V_2=1,X_1=0,X_2=0 : 0.65 0.35
cpt Y | V_2=1,X_1=0,X_2=1 : 0.45 0.55
cpt Y | V_2=1,X_1=1,X_2=0 : 0.3 0.7
cpt Y | V_2=1,X_1=1,X_2=1 : 0.1 0.9
cpt V_5 | X_1=0,Y=0 : 0.8 0.2
cpt V_5 | X_1=0,Y=1 : 0.5 0.5
cpt V_5 | X_1=1,Y=0 : 0.4 0.6
cpt V_5 | X_1=1,Y=1 : 0.15 0.85
cpt S | X_2=0 : 0.5 0.5
cpt S | X_2=1 : 0.2 0.8
cpt R_V_1 | V_4=0 : 0.15 0.85
cpt R_V_1 | V_4=1 : 0.6 0.4
cpt R_Y | X_2=0 : 0.1 0.9
cpt R_Y | X_2=1 : 0.45 0.55
cpt R_V_5 | V_5=0 : 0.2 0.8
cpt R_V_5 | V_5=1 : 0.7 0.3
seed 8
"""

SCMS = {
    "mnar_treatment": SCM_MNAR_TREATMENT,
    "confounded": SCM_CONFOUNDED,
    "indicator_dependent": SCM_INDICATOR_DEPENDENT,
    "confounded_mnar": SCM_CONFOUNDED_MNAR,
    "selection_mnar": SCM_SELECTION_MNAR,
}


def load_scm(name):
    """Parse a fixture SCM by name (see ``SCMS``)."""
    from .simulate import parse_scm

    return parse_scm(SCMS[name])
