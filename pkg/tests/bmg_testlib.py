"""Shared test helpers: random instance generators and brute-force oracles.

The oracles here deliberately avoid the library's own algorithms.
``brute_force_bmg`` compares ancestor paths directly, so any agreement
with ``graphs.bmg_from_tree`` is meaningful evidence, not a tautology.
"""

import random

from bmgkit.graphs import ColoredDigraph
from bmgkit.trees import Tree


def random_binary_tree(labels, rng: random.Random) -> Tree:
    """Uniform-ish random binary tree topology over the given leaf labels."""
    if len(labels) < 2:
        raise ValueError("need at least two leaves")
    nodes = list(labels)
    children = {}
    count = 0
    while len(nodes) > 1:
        a = nodes.pop(rng.randrange(len(nodes)))
        b = nodes.pop(rng.randrange(len(nodes)))
        inner = f"%n{count}"
        count += 1
        children[inner] = (a, b)
        nodes.append(inner)
    return Tree(children, nodes[0])


def random_surjective_coloring(labels, n_colors: int, rng: random.Random) -> dict:
    """Color labels with exactly ``n_colors`` distinct colors, each used at least once."""
    labels = list(labels)
    if n_colors > len(labels):
        raise ValueError("more colors than labels")
    palette = [f"col{i}" for i in range(n_colors)]
    rng.shuffle(labels)
    colors = {}
    for i, leaf in enumerate(labels):
        colors[leaf] = palette[i] if i < n_colors else rng.choice(palette)
    return colors


def random_colored_tree(n_leaves: int, n_colors: int, rng: random.Random,
                        binary: bool = True) -> Tree:
    labels = [f"v{i}" for i in range(n_leaves)]
    tree = random_binary_tree(labels, rng)
    if not binary:
        inner = [u for u in tree.inner_nodes() if u != tree.root]
        drop = [(tree.parent(u), u) for u in inner if rng.random() < 0.3]
        if drop:
            tree = tree.contract_edges(drop)
    return tree.with_colors(random_surjective_coloring(labels, n_colors, rng))


def random_proper_digraph(n_vertices: int, n_colors: int, rng: random.Random,
                          p: float = 0.5) -> ColoredDigraph:
    """Random properly colored digraph: arcs only between distinct color classes."""
    labels = [f"v{i}" for i in range(n_vertices)]
    colors = random_surjective_coloring(labels, n_colors, rng)
    arcs = [(a, b) for a in labels for b in labels
            if a != b and colors[a] != colors[b] and rng.random() < p]
    return ColoredDigraph(colors, arcs)


def _ancestor_path(tree: Tree, v: str) -> list:
    path = [v]
    while (parent := tree.parent(v)) is not None:
        path.append(parent)
        v = parent
    return path


def brute_force_bmg(tree: Tree) -> ColoredDigraph:
    """Best-match arcs by definition: y is a best match of x when no other
    leaf of y's color has a strictly lower lca with x."""
    leaves = tree.leaves
    colors = {v: tree.colors[v] for v in leaves}
    paths = {v: _ancestor_path(tree, v) for v in leaves}
    below = {u: tree.leaf_set_below(u) for u in tree.nodes()}

    def lca_rank(x: str, y: str) -> int:
        # index into x's root path of the lowest ancestor of x that covers y
        for i, u in enumerate(paths[x]):
            if y in below[u]:
                return i
        raise AssertionError("no common ancestor")

    arcs = []
    for x in leaves:
        for s in set(colors.values()) - {colors[x]}:
            candidates = [y for y in leaves if colors[y] == s]
            ranks = {y: lca_rank(x, y) for y in candidates}
            best = min(ranks.values())
            arcs.extend((x, y) for y in candidates if ranks[y] == best)
    return ColoredDigraph(colors, arcs)
