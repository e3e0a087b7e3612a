"""Tree inference from triples and from best match graphs.

Contains the classic BUILD recursion on explicit triple sets, a graph-level
variant that derives the Aho edges directly from the induced subgraph at every
level (restriction of the informative/extended triple set commutes with taking
induced subgraphs, so both routes construct the same tree), and desk-scale
oracles that enumerate *all* phylogenetic trees on a small leaf set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .graphs import ColoredDigraph, bmg_from_tree, is_sf_colored
from .trees import Tree, Triple, TripleSet, _INNER_PREFIX


class NotBmgError(ValueError):
    """Raised when a graph is not a best match graph."""

    def __init__(self, reason: str, certificate: frozenset[str] | None = None):
        super().__init__(reason)
        self.reason = reason
        self.certificate = certificate


class NotBinaryExplainableError(ValueError):
    """Raised when no binary tree explains the graph."""

    def __init__(self, reason: str, certificate: frozenset[str] | None = None):
        super().__init__(reason)
        self.reason = reason
        self.certificate = certificate


class _UnionFind:
    __slots__ = ("parent", "size")

    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in self.parent}

    def find(self, x: str) -> str:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, x: str, y: str) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]

    def groups(self) -> list[list[str]]:
        acc: dict[str, list[str]] = {}
        for x in self.parent:
            acc.setdefault(self.find(x), []).append(x)
        return sorted((sorted(g) for g in acc.values()), key=lambda g: g[0])


@dataclass(frozen=True)
class AhoGraph:
    """The auxiliary graph [R, L]: an edge ``xy`` for every triple ``xy|z``."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def components(self) -> tuple[frozenset[str], ...]:
        uf = _UnionFind(self.vertices)
        for x, y in self.edges:
            uf.union(x, y)
        return tuple(frozenset(g) for g in uf.groups())

    @property
    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def aho_graph(ts: TripleSet, leaves: Iterable[str]) -> AhoGraph:
    """Build [R, L]; triples with a leaf outside ``leaves`` are ignored."""
    lset = frozenset(leaves)
    edges = set()
    for t in ts.triples:
        if t.a in lset and t.b in lset and t.c in lset:
            edges.add((t.a, t.b))
    return AhoGraph(tuple(sorted(lset)), frozenset(edges))


@dataclass(frozen=True)
class BuildOutcome:
    """Result of the BUILD recursion: a tree, or the leaf set where it got stuck."""

    tree: Tree | None
    certificate: frozenset[str] | None = None

    @property
    def ok(self) -> bool:
        return self.tree is not None


def build(ts: TripleSet, leaves: Iterable[str]) -> BuildOutcome:
    """Aho et al.'s BUILD on an explicit triple set.

    Returns the Aho tree if ``ts`` is consistent on ``leaves``; otherwise the
    certificate is the sub-leaf-set on which the auxiliary graph stayed
    connected.  Components at every level are split with a union-find; the
    triple set is restricted eagerly to each component.
    """
    all_leaves = sorted(set(leaves))
    if not all_leaves:
        raise ValueError("build needs a non-empty leaf set")
    stray = {l for t in ts.triples for l in t.leaves} - set(all_leaves)
    triples = [t for t in ts.triples if not (t.leaves & stray)]

    children: dict[str, list[str]] = {}
    counter = itertools.count()

    def new_node() -> str:
        return f"{_INNER_PREFIX}{next(counter)}"

    # stack entries: (component leaves, triples fully inside it, parent node id)
    root_holder: list[str] = []
    stack: list[tuple[list[str], list[Triple], str | None]] = [(all_leaves, triples, None)]
    while stack:
        comp, ts_here, parent = stack.pop()

        def attach(node: str, parent=parent) -> None:
            if parent is None:
                root_holder.append(node)
            else:
                children[parent].append(node)

        if len(comp) == 1:
            attach(comp[0])
            continue
        if len(comp) == 2:
            node = new_node()
            children[node] = list(comp)
            attach(node)
            continue
        uf = _UnionFind(comp)
        for t in ts_here:
            uf.union(t.a, t.b)
        groups = uf.groups()
        if len(groups) == 1:
            return BuildOutcome(None, certificate=frozenset(comp))
        node = new_node()
        children[node] = []
        attach(node)
        for g in groups:
            gset = set(g)
            sub = [t for t in ts_here if t.a in gset and t.b in gset and t.c in gset]
            stack.append((g, sub, node))
    return BuildOutcome(Tree(children, root_holder[0]))


def verify_build_failure(ts: TripleSet, certificate: Iterable[str]) -> bool:
    """Re-check a BUILD failure certificate: [ts|L', L'] must be connected."""
    cert = sorted(set(certificate))
    if len(cert) < 2:
        return False
    return aho_graph(ts.restrict(cert), cert).is_connected


# ----------------------------------------------------- graph-level Aho recursion

def _graph_partition(g: ColoredDigraph, comp: Sequence[str], extended: bool) -> list[list[str]]:
    """Components of the Aho graph of the (extended) triple set of ``g[comp]``.

    The informative triples of an induced subgraph are exactly the restriction
    of those of the full graph, so the edges can be read off the subgraph: an
    arc (a, b) yields an edge when some same-colored non-neighbor of ``a``
    exists in the component, and (for the extended set) the out-neighbors of
    ``a`` within one color class form a clique.
    """
    compset = frozenset(comp)
    count: dict[str, int] = {}
    for v in comp:
        count[g.colors[v]] = count.get(g.colors[v], 0) + 1
    uf = _UnionFind(comp)
    for a in comp:
        by_color: dict[str, list[str]] = {}
        for y in g.out(a):
            if y in compset:
                by_color.setdefault(g.colors[y], []).append(y)
        for s, hits in by_color.items():
            if len(hits) < count[s]:
                for b in hits:
                    uf.union(a, b)
            if extended and len(hits) >= 2:
                hits.sort()
                for b1, b2 in zip(hits, hits[1:]):
                    uf.union(b1, b2)
    return uf.groups()


def _aho_tree_from_graph(g: ColoredDigraph, extended: bool) -> BuildOutcome:
    children: dict[str, list[str]] = {}
    counter = itertools.count()
    root_holder: list[str] = []
    stack: list[tuple[list[str], str | None]] = [(list(g.vertices), None)]
    while stack:
        comp, parent = stack.pop()

        def attach(node: str, parent=parent) -> None:
            if parent is None:
                root_holder.append(node)
            else:
                children[parent].append(node)

        if len(comp) == 1:
            attach(comp[0])
            continue
        if len(comp) == 2:
            node = f"{_INNER_PREFIX}{next(counter)}"
            children[node] = sorted(comp)
            attach(node)
            continue
        groups = _graph_partition(g, comp, extended)
        if len(groups) == 1:
            return BuildOutcome(None, certificate=frozenset(comp))
        node = f"{_INNER_PREFIX}{next(counter)}"
        children[node] = []
        attach(node)
        for grp in groups:
            stack.append((grp, node))
    return BuildOutcome(Tree(children, root_holder[0], colors=g.colors))


def lrt(g: ColoredDigraph) -> Tree:
    """The least resolved tree explaining ``g``; raises :class:`NotBmgError`.

    Builds the Aho tree of the informative triples and verifies that its best
    match graph reproduces ``g`` exactly.
    """
    if not g.properly_colored:
        raise NotBmgError("not-properly-colored")
    if not g.vertices:
        raise ValueError("empty graph")
    outcome = _aho_tree_from_graph(g, extended=False)
    if not outcome.ok:
        raise NotBmgError("triples-inconsistent", certificate=outcome.certificate)
    if bmg_from_tree(outcome.tree) != g:
        raise NotBmgError("aho-tree-mismatch")
    return outcome.tree


def brt(g: ColoredDigraph) -> Tree:
    """The binary-refinable tree: the Aho tree of the extended triple set.

    Raises :class:`NotBinaryExplainableError` when ``g`` has no binary
    explanation (not sf-colored, or extended triples inconsistent).
    """
    if not g.vertices:
        raise ValueError("empty graph")
    if not is_sf_colored(g):
        raise NotBinaryExplainableError("not-sf")
    outcome = _aho_tree_from_graph(g, extended=True)
    if not outcome.ok:
        raise NotBinaryExplainableError("rbin-inconsistent", certificate=outcome.certificate)
    return outcome.tree


@dataclass(frozen=True)
class ExplainOutcome:
    """Outcome of :func:`binary_explaining_tree`: a tree or a typed rejection."""

    tree: Tree | None
    reason: str | None = None
    certificate: frozenset[str] | None = None

    @property
    def ok(self) -> bool:
        return self.tree is not None


def binary_explaining_tree(g: ColoredDigraph) -> ExplainOutcome:
    """Construct a binary tree explaining ``g``, or reject with a certificate.

    Rejections are values, not exceptions: ``reason`` is ``"not-sf"`` or
    ``"rbin-inconsistent"`` (the latter with the stuck leaf set attached).
    """
    try:
        tree = brt(g)
    except NotBinaryExplainableError as e:
        return ExplainOutcome(None, reason=e.reason, certificate=e.certificate)
    return ExplainOutcome(tree.binary_refine())


# ----------------------------------------------------------- enumeration oracles

ORACLE_MAX_LEAVES = 8

#: Known numbers of phylogenetic trees on n labeled leaves, used as a
#: self-check of the enumerator before its output is trusted.
_EXPECTED_TREE_COUNTS = {1: 1, 2: 1, 3: 4, 4: 26, 5: 236, 6: 2752, 7: 39208}

_tree_tables: dict[int, list[tuple[frozenset[int], int]]] = {}


def _set_partitions(elems: tuple[int, ...]) -> Iterator[list[list[int]]]:
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _hierarchies(mask: int, memo: dict[int, list[tuple[int, ...]]]) -> list[tuple[int, ...]]:
    """All cluster systems of phylogenetic trees on the bits of ``mask``."""
    got = memo.get(mask)
    if got is not None:
        return got
    bits = tuple(i for i in range(mask.bit_length()) if mask >> i & 1)
    if len(bits) == 1:
        res = [(mask,)]
    else:
        res = []
        for blocks in _set_partitions(bits):
            if len(blocks) < 2:
                continue
            block_masks = [sum(1 << b for b in blk) for blk in blocks]
            for combo in itertools.product(*(_hierarchies(bm, memo) for bm in block_masks)):
                clusters = [mask]
                for sub in combo:
                    clusters.extend(sub)
                res.append(tuple(clusters))
    memo[mask] = res
    return res


def _triple_bits(n: int) -> dict[tuple[int, int, int], int]:
    table = {}
    bit = 0
    for i, j in itertools.combinations(range(n), 2):
        for k in range(n):
            if k != i and k != j:
                table[(i, j, k)] = bit
                bit += 1
    return table


def _display_mask(clusters: Iterable[int], n: int, bits: Mapping[tuple[int, int, int], int]) -> int:
    full = (1 << n) - 1
    mask = 0
    for c in clusters:
        if c == full or c & (c - 1) == 0:
            continue
        inside = [i for i in range(n) if c >> i & 1]
        outside = [k for k in range(n) if not c >> k & 1]
        for i, j in itertools.combinations(inside, 2):
            for k in outside:
                mask |= 1 << bits[(i, j, k)]
    return mask


def _tree_table(n: int) -> list[tuple[frozenset[int], int]]:
    """(cluster system, displayed-triple bitmask) for every tree on n leaves."""
    if n not in _tree_tables:
        memo: dict[int, list[tuple[int, ...]]] = {}
        for probe in (3, 4):  # enumerator self-check against known totals
            if probe <= n:
                count = len(_hierarchies((1 << probe) - 1, memo))
                if count != _EXPECTED_TREE_COUNTS[probe]:
                    raise AssertionError(f"tree enumeration broken: n={probe} gave {count}")
        bits = _triple_bits(n)
        table = [
            (frozenset(clusters), _display_mask(clusters, n, bits))
            for clusters in _hierarchies((1 << n) - 1, memo)
        ]
        if n in _EXPECTED_TREE_COUNTS and len(table) != _EXPECTED_TREE_COUNTS[n]:
            raise AssertionError(f"tree enumeration broken: n={n} gave {len(table)}")
        _tree_tables[n] = table
    return _tree_tables[n]


def _index_triples(ts: TripleSet, order: Sequence[str]) -> int:
    idx = {l: i for i, l in enumerate(order)}
    bits = _triple_bits(len(order))
    mask = 0
    for t in ts.triples:
        i, j = sorted((idx[t.a], idx[t.b]))
        mask |= 1 << bits[(i, j, idx[t.c])]
    return mask


def closure_oracle(ts: TripleSet, leaves: Iterable[str]) -> TripleSet:
    """Closure of ``ts`` by brute force: intersect r(T) over all displaying trees.

    Enumerates every phylogenetic tree on ``leaves`` (at most
    :data:`ORACLE_MAX_LEAVES`), keeps those displaying all of ``ts``, and
    intersects their displayed triple sets.  Raises if ``ts`` is inconsistent.
    """
    order = sorted(set(leaves))
    n = len(order)
    if n > ORACLE_MAX_LEAVES:
        raise ValueError(f"closure oracle is limited to {ORACLE_MAX_LEAVES} leaves, got {n}")
    missing = {l for t in ts.triples for l in t.leaves} - set(order)
    if missing:
        raise ValueError(f"triples mention leaves outside the given set: {sorted(missing)}")
    if n < 3:
        if ts.triples:
            raise ValueError("inconsistent triple set")
        return TripleSet((), universe=order)
    want = _index_triples(ts, order)
    acc: int | None = None
    for _, rmask in _tree_table(n):
        if want & rmask == want:
            acc = rmask if acc is None else acc & rmask
            if acc == want:
                break  # the closure always contains ts, so it cannot shrink further
    if acc is None:
        raise ValueError("inconsistent triple set")
    bits = _triple_bits(n)
    out = [
        Triple(order[i], order[j], order[k])
        for (i, j, k), b in bits.items()
        if acc >> b & 1
    ]
    return TripleSet(out, universe=order)


def identifies_oracle(ts: TripleSet, tree: Tree) -> bool:
    """True iff the tree displays ``ts`` and every displaying tree refines it."""
    order = list(tree.leaves)
    n = len(order)
    if n > ORACLE_MAX_LEAVES:
        raise ValueError(f"identifies oracle is limited to {ORACLE_MAX_LEAVES} leaves, got {n}")
    if not all(tree.displays(t) for t in ts.triples):
        return False
    if n < 3:
        return True
    idx = {l: i for i, l in enumerate(order)}
    tree_clusters = frozenset(
        sum(1 << idx[l] for l in cluster) for cluster in tree.clusters()
    )
    want = _index_triples(ts, order)
    for clusters, rmask in _tree_table(n):
        if want & rmask == want and not tree_clusters <= clusters:
            return False
    return True


# ----------------------------------------------------- small-scale tree enumeration

def enumerate_trees(leaves: Sequence[str]) -> list[Tree]:
    """All phylogenetic trees on the given leaves (use only for small sets)."""
    order = sorted(set(leaves))
    if not order:
        raise ValueError("need at least one leaf")

    def rec(ls: tuple[str, ...]):
        if len(ls) == 1:
            yield ls[0]
            return
        for blocks in _set_partitions(tuple(range(len(ls)))):
            if len(blocks) < 2:
                continue
            named = [tuple(ls[i] for i in blk) for blk in blocks]
            for combo in itertools.product(*(rec(blk) for blk in named)):
                yield tuple(combo)

    return [Tree.from_nested(spec) if not isinstance(spec, str) else Tree({}, spec)
            for spec in rec(tuple(order))]


def enumerate_binary_trees(leaves: Sequence[str]) -> list[Tree]:
    """All binary phylogenetic trees on the given leaves."""
    order = sorted(set(leaves))
    if not order:
        raise ValueError("need at least one leaf")

    def rec(ls: tuple[str, ...]):
        if len(ls) == 1:
            yield ls[0]
            return
        first, rest = ls[0], ls[1:]
        n = len(rest)
        # the block containing the first leaf determines the root split uniquely
        for picks in range(0, (1 << n) - 1):
            left = (first,) + tuple(rest[i] for i in range(n) if picks >> i & 1)
            right = tuple(rest[i] for i in range(n) if not picks >> i & 1)
            for lt in rec(left):
                for rt in rec(right):
                    yield (lt, rt)

    return [Tree.from_nested(spec) if not isinstance(spec, str) else Tree({}, spec)
            for spec in rec(tuple(order))]
