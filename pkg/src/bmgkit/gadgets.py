"""Constructive fixtures from the arc-modification hardness reductions.

Two generators: a hub-and-satellites family that is always a
binary-explainable best match graph together with its explaining tree, and
the exact-3-cover reduction graph whose minimum deletion number encodes the
cover instance.  Both scale polynomially, so arcs are generated by streaming
over index ranges rather than via adjacency matrices.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from .editing import EditSet
from .graphs import ColoredDigraph
from .trees import LEAF_LABEL_RE, Tree

BLACK, WHITE = "black", "white"


def _part(prefix: str, n_black: int, n_white: int) -> tuple[list[str], list[str]]:
    if n_black < 1 or n_white < 1:
        raise ValueError(f"{prefix}: every part needs at least one black and one white vertex")
    blacks = [f"{prefix}_b{i}" for i in range(n_black)]
    whites = [f"{prefix}_w{i}" for i in range(n_white)]
    return blacks, whites


def hub_satellites_gadget(
    hub: tuple[int, int], satellites: Sequence[tuple[int, int]]
) -> tuple[ColoredDigraph, Tree]:
    """A 2-colored graph built around a hub part X and satellite parts Y_i.

    Arcs: black-to-white inside the hub; from every hub vertex to every
    opposite-colored satellite vertex; and in both directions inside each
    satellite.  The result is a binary-explainable best match graph, and the
    returned tree (hub blacks at the root, hub whites one level down, one
    subtree per satellite) explains it.
    """
    if not satellites:
        raise ValueError("need at least one satellite part")
    xb, xw = _part("X", *hub)
    sats = [_part(f"Y{i + 1}", *sizes) for i, sizes in enumerate(satellites)]

    colors = {v: BLACK for v in xb} | {v: WHITE for v in xw}
    for yb, yw in sats:
        colors.update({v: BLACK for v in yb})
        colors.update({v: WHITE for v in yw})

    arcs: set[tuple[str, str]] = set()
    arcs.update((b, w) for b in xb for w in xw)
    for yb, yw in sats:
        arcs.update((b, w) for b in xb for w in yw)
        arcs.update((w, b) for w in xw for b in yb)
        arcs.update((b, w) for b in yb for w in yw)
        arcs.update((w, b) for w in yw for b in yb)
    graph = ColoredDigraph(colors, arcs)

    children: dict[str, tuple[str, ...]] = {
        "%root": (*xb, "%hub"),
        "%hub": (*xw, *(f"%sat{i + 1}" for i in range(len(sats)))),
    }
    for i, (yb, yw) in enumerate(sats):
        children[f"%sat{i + 1}"] = (*yb, *yw)
    tree = Tree(children, "%root", colors=colors)
    return graph, tree


def hub_union_gadget(
    configs: Sequence[tuple[tuple[int, int], Sequence[tuple[int, int]]]]
) -> tuple[ColoredDigraph, Tree]:
    """Disjoint union of hub-satellite graphs (same two colors), with a tree
    joining the per-component explaining trees under a fresh root."""
    if not configs:
        raise ValueError("need at least one component")
    colors: dict[str, str] = {}
    arcs: set[tuple[str, str]] = set()
    roots = []
    children: dict[str, tuple[str, ...]] = {}
    for idx, (hub, satellites) in enumerate(configs):
        g, t = hub_satellites_gadget(hub, satellites)
        tag = f"c{idx + 1}_"

        def rn(v: str, tag=tag) -> str:
            return ("%" + tag + v[1:]) if v.startswith("%") else tag + v

        colors.update({rn(v): c for v, c in g.colors.items()})
        arcs.update((rn(u), rn(v)) for u, v in g.arcs)
        for u in t.nodes():
            kids = t.children(u)
            if kids:
                children[rn(u)] = tuple(rn(c) for c in kids)
        roots.append(rn(t.root))
    if len(roots) == 1:
        return ColoredDigraph(colors, arcs), Tree(children, roots[0], colors=colors)
    children["%join"] = tuple(roots)
    return ColoredDigraph(colors, arcs), Tree(children, "%join", colors=colors)


# ------------------------------------------------------------ exact 3-cover

def canonical_x3c_instance(t: int, m: int) -> tuple[list[str], list[tuple[str, str, str]]]:
    """A solvable instance: 3t elements, the first t sets partition them,
    remaining sets repeat the first block."""
    if t < 1 or m < t:
        raise ValueError("need t >= 1 and m >= t")
    elements = [f"e{i + 1}" for i in range(3 * t)]
    sets = [tuple(elements[3 * i: 3 * i + 3]) for i in range(t)]
    sets += [sets[0]] * (m - t)
    return elements, sets  # type: ignore[return-value]


def x3c_gadget(
    elements: Sequence[str], sets: Sequence[Sequence[str]]
) -> tuple[ColoredDigraph, int]:
    """Reduction graph of an exact-3-cover instance, and its budget k.

    Vertices: one black and one white vertex per element (forming one
    bi-clique S), plus per candidate set C_i a part X_i with r = 18 t^2
    vertices per color and a part Y_i with q = 3k vertices per color.
    Arcs: black-to-white inside each X_i; X_i to Y_i (opposite colors,
    one-way); Y_i internal bi-cliques; X_i to the S-vertices of opposite
    color for the three elements of C_i; and the S bi-clique itself.

    The instance has an exact cover iff k arc deletions suffice to make the
    graph a binary-explainable best match graph.
    """
    elements = list(elements)
    if not elements or len(elements) % 3 != 0:
        raise ValueError("the universe must have 3t elements for some t >= 1")
    if len(set(elements)) != len(elements):
        raise ValueError("duplicate elements in the universe")
    for e in elements:
        if not LEAF_LABEL_RE.fullmatch(e) or "_" in e or e.startswith(("X", "Y")):
            raise ValueError(f"element id {e!r} would collide with generated vertex ids")
    t = len(elements) // 3
    m = len(sets)
    if m < 1:
        raise ValueError("need at least one candidate set")
    universe = set(elements)
    clean_sets: list[tuple[str, ...]] = []
    for i, raw in enumerate(sets):
        c = tuple(raw)
        if len(c) != 3 or len(set(c)) != 3 or not set(c) <= universe:
            raise ValueError(f"set {i + 1} is not a 3-subset of the universe: {c!r}")
        clean_sets.append(c)

    r = 18 * t * t
    k = 6 * r * (m - t) + r - 18 * t
    q = 3 * k
    if q < 1:
        raise ValueError(
            f"degenerate parameterization: t={t}, m={m} gives an empty satellite part"
        )

    colors: dict[str, str] = {}
    arcs: set[tuple[str, str]] = set()

    s_black = {e: f"{e}_b" for e in elements}
    s_white = {e: f"{e}_w" for e in elements}
    colors.update({v: BLACK for v in s_black.values()})
    colors.update({v: WHITE for v in s_white.values()})
    for e1, e2 in itertools.permutations(elements, 2):
        arcs.add((s_black[e1], s_white[e2]))
        arcs.add((s_white[e1], s_black[e2]))
    for e in elements:
        arcs.add((s_black[e], s_white[e]))
        arcs.add((s_white[e], s_black[e]))

    for i, c in enumerate(clean_sets, start=1):
        xb, xw = _part(f"X{i}", r, r)
        yb, yw = _part(f"Y{i}", q, q)
        colors.update({v: BLACK for v in xb})
        colors.update({v: WHITE for v in xw})
        colors.update({v: BLACK for v in yb})
        colors.update({v: WHITE for v in yw})
        arcs.update((b, w) for b in xb for w in xw)
        arcs.update((x, y) for x in xb for y in yw)
        arcs.update((x, y) for x in xw for y in yb)
        arcs.update((b, w) for b in yb for w in yw)
        arcs.update((w, b) for w in yw for b in yb)
        for e in c:
            arcs.update((x, s_white[e]) for x in xb)
            arcs.update((x, s_black[e]) for x in xw)

    return ColoredDigraph(colors, arcs), k


def x3c_yes_deletion_set(
    elements: Sequence[str],
    sets: Sequence[Sequence[str]],
    cover: Iterable[int],
) -> EditSet:
    """The deletion set certifying a yes-instance, for the given exact cover.

    ``cover`` holds 1-based indices of the chosen sets.  Deletes every arc
    from the non-chosen parts X_i into S, and the S-internal arcs between
    elements lying in different chosen sets.
    """
    chosen = sorted(set(cover))
    t = len(elements) // 3
    covered: dict[str, int] = {}
    for i in chosen:
        if not 1 <= i <= len(sets):
            raise ValueError(f"cover index {i} out of range")
        for e in sets[i - 1]:
            if e in covered:
                raise ValueError(f"element {e!r} covered twice")
            covered[e] = i
    if len(chosen) != t or set(covered) != set(elements):
        raise ValueError("the given indices do not form an exact cover")

    r = 18 * t * t
    delete: set[tuple[str, str]] = set()
    for i, c in enumerate(sets, start=1):
        if i in chosen:
            continue
        for e in c:
            delete.update((f"X{i}_b{j}", f"{e}_w") for j in range(r))
            delete.update((f"X{i}_w{j}", f"{e}_b") for j in range(r))
    for e1, e2 in itertools.permutations(elements, 2):
        if covered[e1] != covered[e2]:
            delete.add((f"{e1}_b", f"{e2}_w"))
            delete.add((f"{e1}_w", f"{e2}_b"))
    return EditSet(delete=frozenset(delete))
