import random

import pytest
from hypothesis import given, settings, strategies as st

from bmgkit.graphs import ColoredDigraph, bmg_from_tree, is_sf_colored
from bmgkit.inference import binary_explaining_tree, lrt
from bmgkit.recognition import (Witness, find_f_graph, find_hourglass, is_bmg,
                                is_binary_explainable_via_hourglass, recognize,
                                tree_binary_condition, verify_f_graph,
                                verify_hourglass, verify_tree_condition)
from bmgkit.trees import parse_newick
from bmg_testlib import random_colored_tree, random_proper_digraph

seeds = st.integers(min_value=0, max_value=10**9)

TWO_COLORS = {"x1": "A", "x2": "A", "y1": "B", "y2": "B"}


# --------------------------------------------------------------- hourglasses

def test_hourglass_found(hourglass):
    w = find_hourglass(hourglass)
    assert w == Witness(kind="hourglass", vertices=("x1", "y1", "x2", "y2"))
    assert verify_hourglass(hourglass, w)


def test_hourglass_absent_in_cherries(twin_cherry):
    assert find_hourglass(twin_cherry) is None


def test_hourglass_requires_proper_coloring():
    g = ColoredDigraph({"a": "A", "b": "A"}, [("a", "b")])
    with pytest.raises(ValueError):
        find_hourglass(g)


def test_hourglass_found_inside_larger_graph(hourglass, resolution_gap_graph):
    # embed: hourglass vertices plus an untouched far-away part
    from bmgkit.graphs import disjoint_union
    big = disjoint_union([hourglass, resolution_gap_graph])
    w = find_hourglass(big)
    assert w is not None
    assert verify_hourglass(big, w)


def test_verify_hourglass_rejects_wrong_vertices(hourglass):
    fake = Witness(kind="hourglass", vertices=("x1", "y1", "y2", "x2"))
    assert not verify_hourglass(hourglass, fake)


# ------------------------------------------------------------------ F-graphs

def f1_graph():
    return ColoredDigraph(TWO_COLORS, [("x1", "y1"), ("y2", "x2"), ("y1", "x2")])


def f2_graph():
    return ColoredDigraph(TWO_COLORS, [("x1", "y1"), ("y1", "x2"), ("x2", "y2")])


def f3_graph():
    return ColoredDigraph(
        {**TWO_COLORS, "y3": "B"},
        [("x1", "y1"), ("x2", "y2"), ("x1", "y3"), ("x2", "y3")],
    )


@pytest.mark.parametrize("make,kind,vertices", [
    (f1_graph, "F1", ("x1", "x2", "y1", "y2")),
    (f2_graph, "F2", ("x1", "x2", "y1", "y2")),
    (f3_graph, "F3", ("x1", "x2", "y1", "y2", "y3")),
])
def test_f_graphs_detected(make, kind, vertices):
    g = make()
    w = find_f_graph(g)
    assert w is not None
    assert w.kind == kind
    assert w.vertices == vertices
    assert verify_f_graph(g, w)
    assert not is_bmg(g)


def test_f_graph_checker_needs_two_colors(rainbow_triangle):
    with pytest.raises(ValueError, match="2-colored"):
        find_f_graph(rainbow_triangle)
    one = ColoredDigraph({"a": "A", "b": "A"})
    assert find_f_graph(one) is None


def test_f_free_graph_reports_none(hourglass, twin_cherry):
    assert find_f_graph(hourglass) is None
    assert find_f_graph(twin_cherry) is None


def test_f_graph_found_inside_larger_graph(twin_cherry):
    from bmgkit.graphs import disjoint_union
    renamed = ColoredDigraph(
        {"p1": "A", "p2": "A", "q1": "B", "q2": "B"},
        [("p1", "q1"), ("q2", "p2"), ("q1", "p2")],
    )
    big = disjoint_union([renamed, twin_cherry])
    w = find_f_graph(big)
    assert w is not None and w.kind == "F1"
    assert verify_f_graph(big, w)


# --------------------------------------------------------- tree-side condition

def test_tree_condition_witness_on_hourglass_lrt(hourglass):
    t = lrt(hourglass)  # (x1,(x2,y2),y1) with the hourglass coloring
    w = tree_binary_condition(t)
    assert w is not None
    assert w.kind == "tree-condition"
    assert verify_tree_condition(t, w)
    root, v1, v2, v3 = w.vertices
    assert root == t.root
    assert {v1, v3} == {"x1", "y1"}
    assert w.colors == ("A", "B")


def test_tree_condition_clear_on_binary_source():
    t = parse_newick("((a1,b1),(a2,b2));").with_colors(
        {"a1": "A", "a2": "A", "b1": "B", "b2": "B"})
    assert tree_binary_condition(t) is None


@given(seeds, st.integers(min_value=4, max_value=9), st.integers(min_value=2, max_value=3))
@settings(max_examples=60, deadline=None)
def test_tree_condition_matches_graph_side(seed, n, k):
    """A BMG is binary-explainable exactly when its LRT avoids the 3-child pattern."""
    rng = random.Random(seed)
    t = random_colored_tree(n, min(k, n), rng, binary=False)
    g = bmg_from_tree(t)
    l = lrt(g)
    has_witness = tree_binary_condition(l) is not None
    assert has_witness == (not binary_explaining_tree(g).ok)


# ------------------------------------------------------------- cross checks

def test_is_bmg_and_recognize(hourglass, twin_cherry):
    assert is_bmg(hourglass)
    t = recognize(hourglass)
    assert t is not None and bmg_from_tree(t) == hourglass
    assert recognize(twin_cherry) is not None
    assert recognize(f1_graph()) is None


def test_hourglass_route_agrees(hourglass, twin_cherry):
    assert is_binary_explainable_via_hourglass(hourglass) is False
    assert is_binary_explainable_via_hourglass(twin_cherry) is True
    with pytest.raises(ValueError):
        is_binary_explainable_via_hourglass(f1_graph())


@given(seeds, st.integers(min_value=2, max_value=6))
@settings(max_examples=250, deadline=None)
def test_two_colored_characterization(seed, n):
    """sink-free + no F1/F2/F3 is exactly BMG-ness for 2-colored graphs."""
    rng = random.Random(seed)
    g = random_proper_digraph(n, min(2, n), rng, p=rng.choice([0.3, 0.5, 0.8]))
    if len(set(g.colors.values())) != 2:
        return
    predicted = is_sf_colored(g) and find_f_graph(g) is None
    assert predicted == is_bmg(g)


@given(seeds, st.integers(min_value=4, max_value=8), st.integers(min_value=2, max_value=3))
@settings(max_examples=100, deadline=None)
def test_hourglass_free_iff_binary_explainable_for_bmgs(seed, n, k):
    rng = random.Random(seed)
    g = bmg_from_tree(random_colored_tree(n, min(k, n), rng, binary=False))
    hourglass_free = find_hourglass(g) is None
    assert hourglass_free == binary_explaining_tree(g).ok
    assert is_binary_explainable_via_hourglass(g) == hourglass_free
