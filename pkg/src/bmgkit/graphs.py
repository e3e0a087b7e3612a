"""Vertex-colored digraphs, best-match-graph construction, and triple extraction.

The central object is :class:`ColoredDigraph`: a digraph whose vertices carry
color ids.  :func:`bmg_from_tree` builds the best match graph of a leaf-colored
tree: there is an arc ``(x, y)`` iff ``y`` is one of the closest (by last
common ancestor) leaves of its color seen from ``x``.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from typing import Iterable, Mapping

from .trees import Tree, Triple, TripleSet


class ColoredDigraph:
    """A digraph with colored vertices; immutable by convention."""

    __slots__ = ("colors", "vertices", "arcs", "_out", "_in", "_classes", "_proper")

    def __init__(self, colors: Mapping[str, str], arcs: Iterable[tuple[str, str]] = ()):
        self.colors = dict(colors)
        for v, c in self.colors.items():
            if not v or not c:
                raise ValueError(f"empty vertex id or color: {v!r} -> {c!r}")
        self.vertices = tuple(sorted(self.colors))
        vset = set(self.vertices)
        arcset = set()
        for a in arcs:
            u, v = a
            if u == v:
                raise ValueError(f"self loop at {u!r}")
            if u not in vset or v not in vset:
                raise ValueError(f"arc ({u!r}, {v!r}) uses an unknown vertex")
            arcset.add((u, v))
        self.arcs = frozenset(arcset)
        self._out: dict[str, frozenset[str]] | None = None
        self._in: dict[str, frozenset[str]] | None = None
        self._classes: dict[str, tuple[str, ...]] | None = None
        self._proper: bool | None = None

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def out(self, v: str) -> frozenset[str]:
        if self._out is None:
            acc: dict[str, set[str]] = {u: set() for u in self.vertices}
            for u, w in self.arcs:
                acc[u].add(w)
            self._out = {u: frozenset(s) for u, s in acc.items()}
        return self._out[v]

    def in_(self, v: str) -> frozenset[str]:
        if self._in is None:
            acc: dict[str, set[str]] = {u: set() for u in self.vertices}
            for u, w in self.arcs:
                acc[w].add(u)
            self._in = {u: frozenset(s) for u, s in acc.items()}
        return self._in[v]

    def has_arc(self, u: str, v: str) -> bool:
        return (u, v) in self.arcs

    def color_classes(self) -> dict[str, tuple[str, ...]]:
        """Map color id -> vertices of that color, sorted."""
        if self._classes is None:
            acc: dict[str, list[str]] = {}
            for v in self.vertices:
                acc.setdefault(self.colors[v], []).append(v)
            self._classes = {s: tuple(vs) for s, vs in acc.items()}
        return self._classes

    @property
    def properly_colored(self) -> bool:
        """No arc joins two vertices of the same color."""
        if self._proper is None:
            self._proper = all(self.colors[u] != self.colors[v] for u, v in self.arcs)
        return self._proper

    def induced(self, subset: Iterable[str]) -> "ColoredDigraph":
        keep = set(subset)
        unknown = keep - set(self.vertices)
        if unknown:
            raise ValueError(f"unknown vertex {sorted(unknown)[0]!r}")
        return ColoredDigraph(
            {v: self.colors[v] for v in keep},
            (a for a in self.arcs if a[0] in keep and a[1] in keep),
        )

    def with_arcs(self, arcs: Iterable[tuple[str, str]]) -> "ColoredDigraph":
        """Same vertices and colors, different arc set."""
        return ColoredDigraph(self.colors, arcs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColoredDigraph):
            return NotImplemented
        return self.colors == other.colors and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((frozenset(self.colors.items()), self.arcs))

    def __repr__(self) -> str:
        return f"ColoredDigraph({self.n_vertices} vertices, {len(self.arcs)} arcs)"

    # ----------------------------------------------------------------- formats

    def to_json(self) -> str:
        obj = {
            "vertices": [{"id": v, "color": self.colors[v]} for v in self.vertices],
            "arcs": [[u, v] for u, v in sorted(self.arcs)],
        }
        return json.dumps(obj, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ColoredDigraph":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValueError(f"graph JSON: {e}") from None
        if not isinstance(obj, dict) or set(obj) - {"vertices", "arcs"} or "vertices" not in obj:
            raise ValueError("graph JSON: expected an object with 'vertices' and 'arcs'")
        colors: dict[str, str] = {}
        for entry in obj["vertices"]:
            if not isinstance(entry, dict) or set(entry) != {"id", "color"}:
                raise ValueError(f"graph JSON: bad vertex entry {entry!r}")
            vid, col = entry["id"], entry["color"]
            if not isinstance(vid, str) or not isinstance(col, str):
                raise ValueError(f"graph JSON: bad vertex entry {entry!r}")
            if vid in colors:
                raise ValueError(f"graph JSON: duplicate vertex {vid!r}")
            colors[vid] = col
        arcs = []
        for entry in obj.get("arcs", []):
            if not isinstance(entry, list) or len(entry) != 2:
                raise ValueError(f"graph JSON: bad arc entry {entry!r}")
            arcs.append((entry[0], entry[1]))
        return cls(colors, arcs)

    @classmethod
    def from_tsv(cls, arc_text: str, colors: Mapping[str, str]) -> "ColoredDigraph":
        """Arc list as ``src<TAB>dst`` lines plus a leaf->color mapping."""
        arcs = []
        for lineno, line in enumerate(arc_text.splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(f"arc TSV line {lineno}: expected 'src<TAB>dst', got {line!r}")
            arcs.append((parts[0], parts[1]))
        return cls(colors, arcs)


def disjoint_union(graphs: Iterable[ColoredDigraph]) -> ColoredDigraph:
    """Disjoint union; vertex ids must not collide across the parts."""
    colors: dict[str, str] = {}
    arcs: list[tuple[str, str]] = []
    for g in graphs:
        overlap = set(colors) & set(g.vertices)
        if overlap:
            raise ValueError(f"duplicate vertex {sorted(overlap)[0]!r} in disjoint union")
        colors.update(g.colors)
        arcs.extend(g.arcs)
    return ColoredDigraph(colors, arcs)


def induced_subgraph(g: ColoredDigraph, subset: Iterable[str]) -> ColoredDigraph:
    return g.induced(subset)


# ----------------------------------------------------------------- construction

def bmg_from_tree(tree: Tree) -> ColoredDigraph:
    """Best match graph of a leaf-colored tree.

    For every leaf ``x`` and every other color ``s``, the best matches are the
    color-``s`` leaves below the lowest ancestor of ``x`` whose subtree
    contains color ``s``.  Runs in roughly O(arcs + leaves * height).
    """
    if tree.colors is None:
        raise ValueError("bmg_from_tree needs a leaf-colored tree")
    colors = tree.colors

    # DFS leaf positions; every node spans a contiguous leaf interval.
    preorder = tree.nodes()
    pos: dict[str, int] = {}
    leaf_at: list[str] = []
    for u in preorder:
        if tree.is_leaf(u):
            pos[u] = len(leaf_at)
            leaf_at.append(u)
    span: dict[str, tuple[int, int]] = {}
    colorset: dict[str, frozenset[str]] = {}
    for u in reversed(preorder):
        cs = tree.children(u)
        if not cs:
            span[u] = (pos[u], pos[u])
            colorset[u] = frozenset((colors[u],))
        else:
            span[u] = (span[cs[0]][0], span[cs[-1]][1])
            acc: set[str] = set()
            for c in cs:
                acc |= colorset[c]
            colorset[u] = frozenset(acc)

    by_color: dict[str, list[int]] = {}
    for leaf, p in pos.items():
        by_color.setdefault(colors[leaf], []).append(p)
    for ps in by_color.values():
        ps.sort()

    arcs: list[tuple[str, str]] = []
    for x in leaf_at:
        prev_cs = colorset[x]
        u = tree.parent(x)
        while u is not None:
            cs = colorset[u]
            if len(cs) > len(prev_cs):
                lo, hi = span[u]
                for s in cs - prev_cs:
                    ps = by_color[s]
                    i = bisect_left(ps, lo)
                    while i < len(ps) and ps[i] <= hi:
                        arcs.append((x, leaf_at[ps[i]]))
                        i += 1
            prev_cs = cs
            u = tree.parent(u)
    return ColoredDigraph(colors, arcs)


def is_sf_colored(g: ColoredDigraph) -> bool:
    """Properly colored and no vertex misses an out-neighbor of some other color."""
    if not g.properly_colored:
        return False
    present = set(g.color_classes())
    for v in g.vertices:
        needed = present - {g.colors[v]}
        if not needed:
            continue
        seen = {g.colors[w] for w in g.out(v)}
        if not needed <= seen:
            return False
    return True


# ------------------------------------------------------------ triple extraction

def _scan_triples(g: ColoredDigraph) -> tuple[set[Triple], set[Triple], set[Triple]]:
    """One sweep computing (informative, forbidden, forbidden-derived) triples."""
    if not g.properly_colored:
        raise ValueError("triple extraction needs a properly colored graph")
    classes = g.color_classes()
    informative: set[Triple] = set()
    forbidden: set[Triple] = set()
    derived: set[Triple] = set()
    for a in g.vertices:
        ca = g.colors[a]
        out_by_color: dict[str, list[str]] = {}
        for y in g.out(a):
            out_by_color.setdefault(g.colors[y], []).append(y)
        for s, members in classes.items():
            if s == ca:
                continue
            hits = sorted(out_by_color.get(s, ()))
            if not hits:
                continue
            if len(hits) < len(members):
                hitset = set(hits)
                for b in hits:
                    for b2 in members:
                        if b2 not in hitset:
                            informative.add(Triple(a, b, b2))
            for i in range(len(hits)):
                for j in range(i + 1, len(hits)):
                    forbidden.add(Triple(a, hits[i], hits[j]))
                    forbidden.add(Triple(a, hits[j], hits[i]))
                    derived.add(Triple(hits[i], hits[j], a))
    return informative, forbidden, derived


def informative_triples(g: ColoredDigraph) -> TripleSet:
    """Triples ``ab|b'`` with an arc to ``b`` but none to the same-colored ``b'``."""
    r, _, _ = _scan_triples(g)
    return TripleSet(r, universe=g.vertices)


def forbidden_triples(g: ColoredDigraph) -> TripleSet:
    """Triples ``ab|b'`` where ``a`` has arcs to both same-colored ``b`` and ``b'``."""
    _, f, _ = _scan_triples(g)
    return TripleSet(f, universe=g.vertices)


def rbin_triples(g: ColoredDigraph) -> TripleSet:
    """Informative triples plus ``bb'|a`` for every forbidden ``ab|b'``."""
    r, _, d = _scan_triples(g)
    return TripleSet(r | d, universe=g.vertices)
