import pytest

from bmgkit.graphs import ColoredDigraph
from bmgkit.trees import Triple, TripleSet


@pytest.fixture
def hourglass():
    """Smallest 2-colored BMG that no binary tree explains."""
    return ColoredDigraph(
        {"x1": "A", "x2": "A", "y1": "B", "y2": "B"},
        [("x1", "y1"), ("y1", "x1"), ("x2", "y2"), ("y2", "x2"),
         ("x1", "y2"), ("y1", "x2")],
    )


@pytest.fixture
def twin_cherry():
    """Two reciprocal pairs, no cross arcs: BMG of ((a1,b1),(a2,b2))."""
    return ColoredDigraph(
        {"a1": "A", "a2": "A", "b1": "B", "b2": "B"},
        [("a1", "b1"), ("b1", "a1"), ("a2", "b2"), ("b2", "a2")],
    )


@pytest.fixture
def rainbow_triangle():
    """Three colors, one directed cycle; not even sink-free."""
    return ColoredDigraph(
        {"p": "A", "q": "B", "r": "C"},
        [("p", "q"), ("q", "r"), ("r", "p")],
    )


@pytest.fixture
def closure_gap():
    """Triple set whose Aho tree displays a triple outside the closure.

    BUILD's output is minimally resolved but not canonical: here a1a2|a3
    is displayed by the Aho tree yet not implied by the input set.
    """
    leaves = frozenset({"a1", "a2", "a3", "b1", "b2"})
    triples = frozenset({
        Triple("a2", "b1", "a1"),
        Triple("a2", "b1", "a3"),
        Triple("a2", "b1", "b2"),
        Triple("a1", "b1", "b2"),
    })
    return TripleSet(triples, leaves)


# Binary source tree whose BMG has a star-like least resolved tree but a
# fully resolved binary-refinable tree; the fixture below freezes its arcs.
RESOLUTION_GAP_NEWICK = "((a1,((a2,a3),b1)),(c1,c2));"
RESOLUTION_GAP_COLORS = {"a1": "A", "a2": "A", "a3": "A",
                         "b1": "B", "c1": "C", "c2": "C"}
RESOLUTION_GAP_ARCS = frozenset({
    ("a1", "b1"), ("a1", "c1"), ("a1", "c2"),
    ("a2", "b1"), ("a2", "c1"), ("a2", "c2"),
    ("a3", "b1"), ("a3", "c1"), ("a3", "c2"),
    ("b1", "a2"), ("b1", "a3"), ("b1", "c1"), ("b1", "c2"),
    ("c1", "a1"), ("c1", "a2"), ("c1", "a3"), ("c1", "b1"),
    ("c2", "a1"), ("c2", "a2"), ("c2", "a3"), ("c2", "b1"),
})


@pytest.fixture
def resolution_gap_graph():
    return ColoredDigraph(RESOLUTION_GAP_COLORS, RESOLUTION_GAP_ARCS)
