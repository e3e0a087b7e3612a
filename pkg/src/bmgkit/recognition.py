"""Recognition of best match graphs and of binary-explainable ones.

Two complementary routes are offered: the constructive one (build the Aho
tree and compare the resulting graph arc-for-arc) and forbidden-pattern
scans — the 4-vertex double-cherry pattern that blocks binary explanations,
the F1/F2/F3 patterns characterizing 2-colored best match graphs, and the
tree-side three-children condition equivalent to the 4-vertex pattern.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graphs import ColoredDigraph
from .inference import NotBmgError, lrt
from .trees import Tree


@dataclass(frozen=True)
class Witness:
    """A re-checkable certificate locating a forbidden pattern.

    ``kind`` is one of ``hourglass``, ``F1``, ``F2``, ``F3`` or
    ``tree-condition``; ``vertices`` lists the pattern's vertices in role
    order (for ``tree-condition``: the inner node followed by the three
    children) and ``colors`` carries the color pair (r, s) where relevant.
    """

    kind: str
    vertices: tuple[str, ...]
    colors: tuple[str, str] | None = None


def _reciprocal_pairs(g: ColoredDigraph) -> dict[tuple[str, str], list[tuple[str, str]]]:
    """Bidirectional arcs, keyed by ordered color pair of their endpoints."""
    out: dict[tuple[str, str], list[tuple[str, str]]] = {}
    for u, v in g.arcs:
        if (v, u) in g.arcs:
            out.setdefault((g.colors[u], g.colors[v]), []).append((u, v))
    for bucket in out.values():
        bucket.sort()
    return out


def find_hourglass(g: ColoredDigraph) -> Witness | None:
    """Scan for the 4-vertex pattern [xy >< x'y'] blocking binary explanations.

    Requires: two reciprocal pairs (x, y) and (x', y') on the same color pair,
    arcs (x, y') and (y, x'), and non-arcs (y', x) and (x', y).  Returns the
    lexicographically least witness (x, y, x', y'), or None.
    """
    if not g.properly_colored:
        raise ValueError("hourglass scan needs a properly colored graph")
    pairs = _reciprocal_pairs(g)
    best: tuple[str, str, str, str] | None = None
    for key in sorted(pairs):
        bucket = pairs[key]
        for (x, y), (x2, y2) in itertools.permutations(bucket, 2):
            if x == x2 or y == y2:
                continue
            if (
                g.has_arc(x, y2)
                and g.has_arc(y, x2)
                and not g.has_arc(y2, x)
                and not g.has_arc(x2, y)
            ):
                cand = (x, y, x2, y2)
                if best is None or cand < best:
                    best = cand
    if best is None:
        return None
    return Witness("hourglass", best)


def verify_hourglass(g: ColoredDigraph, w: Witness) -> bool:
    """Pure re-check of an hourglass witness against the graph."""
    if w.kind != "hourglass" or len(w.vertices) != 4 or len(set(w.vertices)) != 4:
        return False
    x, y, x2, y2 = w.vertices
    if any(v not in g.colors for v in w.vertices):
        return False
    if not (g.colors[x] == g.colors[x2] != g.colors[y] == g.colors[y2]):
        return False
    return (
        g.has_arc(x, y)
        and g.has_arc(y, x)
        and g.has_arc(x2, y2)
        and g.has_arc(y2, x2)
        and g.has_arc(x, y2)
        and g.has_arc(y, x2)
        and not g.has_arc(y2, x)
        and not g.has_arc(x2, y)
    )


def find_f_graph(g: ColoredDigraph) -> Witness | None:
    """First F1/F2/F3 pattern in a properly 2-colored digraph, or None.

    The three patterns, on vertices x1, x2 of one color and y1, y2(, y3) of
    the other:

    * F1: arcs (x1,y1), (y2,x2), (y1,x2); non-arcs (x1,y2), (y2,x1)
    * F2: arcs (x1,y1), (y1,x2), (x2,y2); non-arc (x1,y2)
    * F3: arcs (x1,y1), (x2,y2), (x1,y3), (x2,y3); non-arcs (x1,y2), (x2,y1)

    Scanned in that order, each in lexicographic vertex order, so the returned
    witness is deterministic.
    """
    if not g.properly_colored:
        raise ValueError("F-graph scan needs a properly colored graph")
    classes = g.color_classes()
    if len(classes) > 2:
        raise ValueError(f"F-graph characterization applies to 2-colored graphs, got {len(classes)} colors")
    if len(classes) < 2:
        return None
    (_, xs), (_, ys) = sorted(classes.items())

    def scan4(xs: tuple[str, ...], ys: tuple[str, ...]) -> Witness | None:
        for x1, x2 in itertools.permutations(xs, 2):
            for y1, y2 in itertools.permutations(ys, 2):
                if (
                    g.has_arc(x1, y1)
                    and g.has_arc(y2, x2)
                    and g.has_arc(y1, x2)
                    and not g.has_arc(x1, y2)
                    and not g.has_arc(y2, x1)
                ):
                    return Witness("F1", (x1, x2, y1, y2))
        for x1, x2 in itertools.permutations(xs, 2):
            for y1, y2 in itertools.permutations(ys, 2):
                if (
                    g.has_arc(x1, y1)
                    and g.has_arc(y1, x2)
                    and g.has_arc(x2, y2)
                    and not g.has_arc(x1, y2)
                ):
                    return Witness("F2", (x1, x2, y1, y2))
        return None

    # both role assignments of the two color classes
    w = scan4(xs, ys) or scan4(ys, xs)
    if w is not None:
        return w

    def scan5(xs: tuple[str, ...], ys: tuple[str, ...]) -> Witness | None:
        if len(ys) < 3:
            return None
        for x1, x2 in itertools.permutations(xs, 2):
            for y1, y2, y3 in itertools.permutations(ys, 3):
                if y1 > y2:  # pattern symmetric under (x1,y1)<->(x2,y2) swap
                    continue
                if (
                    g.has_arc(x1, y1)
                    and g.has_arc(x2, y2)
                    and g.has_arc(x1, y3)
                    and g.has_arc(x2, y3)
                    and not g.has_arc(x1, y2)
                    and not g.has_arc(x2, y1)
                ):
                    return Witness("F3", (x1, x2, y1, y2, y3))
        return None

    return scan5(xs, ys) or scan5(ys, xs)


def verify_f_graph(g: ColoredDigraph, w: Witness) -> bool:
    """Pure re-check of an F1/F2/F3 witness against the graph."""
    vs = w.vertices
    if len(set(vs)) != len(vs) or any(v not in g.colors for v in vs):
        return False
    if w.kind in ("F1", "F2"):
        if len(vs) != 4:
            return False
        x1, x2, y1, y2 = vs
        if not (g.colors[x1] == g.colors[x2] != g.colors[y1] == g.colors[y2]):
            return False
        if w.kind == "F1":
            return (
                g.has_arc(x1, y1)
                and g.has_arc(y2, x2)
                and g.has_arc(y1, x2)
                and not g.has_arc(x1, y2)
                and not g.has_arc(y2, x1)
            )
        return (
            g.has_arc(x1, y1)
            and g.has_arc(y1, x2)
            and g.has_arc(x2, y2)
            and not g.has_arc(x1, y2)
        )
    if w.kind == "F3":
        if len(vs) != 5:
            return False
        x1, x2, y1, y2, y3 = vs
        if not (
            g.colors[x1] == g.colors[x2] != g.colors[y1]
            and g.colors[y1] == g.colors[y2] == g.colors[y3]
        ):
            return False
        return (
            g.has_arc(x1, y1)
            and g.has_arc(x2, y2)
            and g.has_arc(x1, y3)
            and g.has_arc(x2, y3)
            and not g.has_arc(x1, y2)
            and not g.has_arc(x2, y1)
        )
    return False


def tree_binary_condition(tree: Tree) -> Witness | None:
    """Tree-side analogue of the hourglass: an inner node with three children
    v1, v2, v3 and colors r != s such that r appears under v1 and v2 but not
    v3, and s appears under v2 and v3 but not v1.
    """
    if tree.colors is None:
        raise ValueError("needs a leaf-colored tree")
    below = {
        node: frozenset(tree.colors[l] for l in tree.leaf_set_below(node))
        for node in tree.nodes()
    }
    for u in tree.inner_nodes():
        kids = sorted(tree.children(u), key=lambda v: min(tree.leaf_set_below(v)))
        if len(kids) < 3:
            continue
        for v1, v2, v3 in itertools.permutations(kids, 3):
            for r in sorted(below[v1] - below[v3]):
                for s in sorted(below[v3] - below[v1]):
                    if r in below[v2] and s in below[v2]:
                        return Witness("tree-condition", (u, v1, v2, v3), colors=(r, s))
    return None


def verify_tree_condition(tree: Tree, w: Witness) -> bool:
    """Pure re-check of a tree-condition witness."""
    if w.kind != "tree-condition" or len(w.vertices) != 4 or w.colors is None:
        return False
    u, v1, v2, v3 = w.vertices
    r, s = w.colors
    if r == s:
        return False
    kids = set(tree.children(u))
    if not {v1, v2, v3} <= kids or len({v1, v2, v3}) != 3:
        return False
    col = lambda v: {tree.colors[l] for l in tree.leaf_set_below(v)}
    c1, c2, c3 = col(v1), col(v2), col(v3)
    return r in c1 and r in c2 and s in c2 and s in c3 and s not in c1 and r not in c3


def is_bmg(g: ColoredDigraph) -> bool:
    """True iff some leaf-colored tree has exactly these best-match arcs."""
    try:
        lrt(g)
    except NotBmgError:
        return False
    return True


def recognize(g: ColoredDigraph) -> Tree | None:
    """The least resolved explaining tree, or None if there is none."""
    try:
        return lrt(g)
    except NotBmgError:
        return None


def is_binary_explainable_via_hourglass(g: ColoredDigraph) -> bool:
    """Hourglass-freeness route to binary explainability; input must be a BMG."""
    if not is_bmg(g):
        raise ValueError("the hourglass criterion is only valid for best match graphs")
    return find_hourglass(g) is None
