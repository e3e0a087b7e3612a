import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bmgkit.trees import (Triple, TripleSet, Tree, format_color_tsv, is_refinement,
                          parse_color_tsv, parse_newick)
from bmg_testlib import random_binary_tree, random_colored_tree

seeds = st.integers(min_value=0, max_value=10**9)


# ----------------------------------------------------------------- triples

def test_triple_canonicalizes_pair_order():
    assert Triple("b", "a", "c") == Triple("a", "b", "c")
    assert Triple("a", "b", "c").pair == ("a", "b")
    assert Triple("a", "b", "c").outgroup == "c"
    assert repr(Triple("b", "a", "c")) == "a,b|c"
    assert len({Triple("a", "b", "c"), Triple("b", "a", "c")}) == 1


def test_triple_rejects_repeated_leaves():
    with pytest.raises(ValueError):
        Triple("a", "a", "c")
    with pytest.raises(ValueError):
        Triple("a", "b", "a")


def test_triple_set_restrict_drops_triples_with_outside_leaves():
    ts = TripleSet(
        [Triple("a", "b", "c"), Triple("a", "b", "d"), Triple("c", "d", "a")],
        universe={"a", "b", "c", "d"},
    )
    sub = ts.restrict({"a", "b", "c"})
    assert set(sub) == {Triple("a", "b", "c")}
    assert sub.universe == frozenset({"a", "b", "c"})


def test_triple_set_strict_density():
    dense = TripleSet([Triple("a", "b", "c")], universe={"a", "b", "c"})
    assert dense.is_strictly_dense()
    assert not TripleSet([], universe={"a", "b", "c"}).is_strictly_dense()
    two = TripleSet([Triple("a", "b", "c"), Triple("a", "c", "b")],
                    universe={"a", "b", "c"})
    assert not two.is_strictly_dense()


def test_triple_set_union_merges_universes():
    left = TripleSet([Triple("a", "b", "c")], universe={"a", "b", "c"})
    right = TripleSet([Triple("b", "c", "d")], universe={"b", "c", "d"})
    both = left | right
    assert len(both) == 2
    assert both.universe == frozenset("abcd")


# ------------------------------------------------------------ construction

def test_from_nested_builds_expected_shape():
    t = Tree.from_nested((("a", "b"), "c"))
    assert t.leaf_set == frozenset("abc")
    assert t.displays(Triple("a", "b", "c"))
    assert not t.displays(Triple("a", "c", "b"))


def test_children_of_unknown_node_is_empty():
    t = Tree.from_nested(("a", "b"))
    assert t.children("nope") == ()


def test_rejects_node_with_two_parents():
    with pytest.raises(ValueError, match="parent"):
        Tree({"r": ("a", "b"), "a": ("c",), "b": ("c", "d")}, "r")


def test_rejects_unreachable_nodes():
    with pytest.raises(ValueError):
        Tree({"r": ("a", "b"), "x": ("y", "z")}, "r")


def test_rejects_unary_inner_node_unless_planted():
    with pytest.raises(ValueError, match="single child"):
        Tree({"r": ("a", "b"), "a": ("c",)}, "r")
    with pytest.raises(ValueError, match="single child"):
        Tree({"r": ("a",), "a": ("b", "c")}, "r")  # needs planted=True
    planted = Tree({"r": ("a",), "a": ("b", "c")}, "r", planted=True)
    assert planted.is_planted


def test_colors_must_cover_every_leaf():
    with pytest.raises(ValueError, match="no color for leaf 'b'"):
        Tree.from_nested(("a", "b"), colors={"a": "A"})


def test_times_must_strictly_decrease():
    kids = {"r": ("a", "b")}
    Tree(kids, "r", times={"r": 1.0, "a": 0.0, "b": 0.5})
    with pytest.raises(ValueError):
        Tree(kids, "r", times={"r": 1.0, "a": 1.0, "b": 0.5})


def test_event_tags_validated():
    with pytest.raises(ValueError):
        Tree({"r": ("a", "b")}, "r", events={"a": "mystery"})


# ------------------------------------------------------------------ newick

@pytest.mark.parametrize("text", [
    "(a,b);",
    "((a,b),c);",
    "(a,(b,c),d);",
    "((a1,((a2,a3),b1)),(c1,c2));",
])
def test_newick_round_trip(text):
    assert parse_newick(text).to_newick() == text


@pytest.mark.parametrize("bad", [
    "",
    "(a,b)",         # missing semicolon
    "((a,b);",       # unbalanced
    "(a,,b);",       # empty child
    "(a,);",         # trailing comma
    "(a,a);",        # duplicate leaf
    "(a,b); junk",   # trailing garbage
    "(a,b!);",       # bad label character
    "(a,b)c;",       # second top-level element
    "(a,b)(c,d);",   # two top-level groups
])
def test_newick_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_newick(bad)


def test_single_leaf_newick():
    t = parse_newick("a;")
    assert t.leaves == ("a",)
    assert t.to_newick() == "a;"


@given(seeds, st.integers(min_value=2, max_value=10))
@settings(max_examples=50, deadline=None)
def test_newick_round_trip_random(seed, n):
    t = random_binary_tree([f"v{i}" for i in range(n)], random.Random(seed))
    assert parse_newick(t.to_newick()) == t


# -------------------------------------------------------------- structure

def test_canonical_child_order_makes_equal_trees():
    a = Tree.from_nested((("b", "a"), "c"))
    b = Tree.from_nested(("c", ("a", "b")))
    assert a == b
    assert a.canonical_key() == b.canonical_key()


def test_lca():
    t = parse_newick("((a,b),(c,d));")
    assert t.lca(["a", "b"]) != t.root
    assert t.lca(["a", "c"]) == t.root
    assert t.lca(["a"]) == "a"


def test_leaf_set_below_and_subtree():
    t = parse_newick("((a,b),(c,d));")
    u = t.lca(["c", "d"])
    assert t.leaf_set_below(u) == frozenset("cd")
    assert t.subtree(u).leaf_set == frozenset("cd")


def test_clusters_of_balanced_quartet():
    t = parse_newick("((a,b),(c,d));")
    assert t.clusters() == frozenset({
        frozenset("abcd"), frozenset("ab"), frozenset("cd"),
        frozenset("a"), frozenset("b"), frozenset("c"), frozenset("d"),
    })


def test_all_triples_of_caterpillar():
    t = parse_newick("((a,b),c);")
    assert set(t.all_triples()) == {Triple("a", "b", "c")}


@given(seeds, st.integers(min_value=3, max_value=8))
@settings(max_examples=40, deadline=None)
def test_binary_tree_triples_are_strictly_dense(seed, n):
    t = random_binary_tree([f"v{i}" for i in range(n)], random.Random(seed))
    assert t.all_triples().is_strictly_dense()


def test_resolution_extremes():
    star = parse_newick("(a,b,c,d);")
    assert star.resolution() == 0
    binary = parse_newick("((a,b),(c,d));")
    assert binary.resolution() == 1
    partial = parse_newick("((a,b),c,d);")
    assert partial.resolution() == Fraction(1, 2)


def test_resolution_undefined_below_three_leaves():
    with pytest.raises(ValueError):
        parse_newick("(a,b);").resolution()


# ------------------------------------------------------------- refinement

def test_refinement_basics():
    star = parse_newick("(a,b,c,d);")
    partial = parse_newick("((a,b),c,d);")
    binary = parse_newick("((a,b),(c,d));")
    assert is_refinement(binary, partial)
    assert is_refinement(partial, star)
    assert is_refinement(binary, star)
    assert not is_refinement(star, binary)
    assert not is_refinement(parse_newick("((a,c),b,d);"), partial)
    assert is_refinement(star, star)


def test_refinement_requires_same_leaf_set():
    assert not is_refinement(parse_newick("(a,b);"), parse_newick("(a,c);"))


@given(seeds, st.integers(min_value=4, max_value=9))
@settings(max_examples=50, deadline=None)
def test_binary_refine_is_a_refinement(seed, n):
    rng = random.Random(seed)
    t = random_colored_tree(n, 2, rng, binary=False)
    fine = t.binary_refine()
    assert fine.is_binary
    assert fine.leaf_set == t.leaf_set
    assert is_refinement(fine, t)
    assert fine.resolution() == 1


def test_binary_refine_keeps_binary_trees_unchanged():
    t = parse_newick("((a,b),(c,d));")
    assert t.binary_refine() == t


# ----------------------------------------------- contraction / suppression

def test_contract_edges_produces_star():
    t = parse_newick("((a,b),(c,d));")
    inner = [u for u in t.inner_nodes() if u != t.root]
    star = t.contract_edges((t.parent(u), u) for u in inner)
    assert star.resolution() == 0
    assert star.leaf_set == t.leaf_set


def test_suppress_unary_collapses_chains():
    t = Tree({"r": ("m",), "m": ("a", "b")}, "r", planted=True)
    out = t.suppress_unary()
    assert out == parse_newick("(a,b);")


def test_contract_rejects_non_edges():
    t = parse_newick("((a,b),c);")
    with pytest.raises(ValueError):
        t.contract_edges([("a", "b")])


# ------------------------------------------------------------ colors TSV

def test_color_tsv_round_trip():
    colors = {"x1": "A", "y1": "B", "x2": "A"}
    assert parse_color_tsv(format_color_tsv(colors)) == colors


def test_color_tsv_rejects_garbage():
    with pytest.raises(ValueError):
        parse_color_tsv("one-field-only\n")
    with pytest.raises(ValueError):
        parse_color_tsv("a\tA\na\tB\n")  # duplicate leaf


def test_with_colors_replaces_and_clears():
    t = Tree.from_nested(("a", "b"), colors={"a": "A", "b": "B"})
    recolored = t.with_colors({"a": "X", "b": "X"})
    assert recolored.colors["a"] == "X"
    assert t.colors["a"] == "A"  # original untouched
