"""Rooted phylogenetic trees, rooted triples, and refinement utilities.

Trees are immutable values: every editing operation returns a new tree.
Leaf ids are plain strings restricted to ``[A-Za-z0-9_.-]+``; inner nodes get
generated ids starting with ``%`` so they can never collide with leaf labels.

A tree may optionally carry

* ``colors`` -- a total map from leaves to color ids,
* ``times``  -- a strictly decreasing (parent > child) time stamp per node,
* ``events`` -- an event tag per node (see :data:`EVENT_TAGS`).

Equality compares the colored topology in canonical form (children sorted by
the smallest leaf id in their subtree); times and events are annotations and
do not participate.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

LEAF_LABEL_RE = re.compile(r"[A-Za-z0-9_.\-]+")

#: Event tags used by the evolutionary simulator.
EVENT_TAGS = frozenset({"speciation", "duplication", "hgt", "loss", "leaf"})

_INNER_PREFIX = "%"


@dataclass(frozen=True, order=True)
class Triple:
    """A rooted triple ``ab|c``: the pair ``{a, b}`` is separated from ``c``.

    The pair is stored in sorted order, so ``Triple("b", "a", "c")`` and
    ``Triple("a", "b", "c")`` are the same value.
    """

    a: str
    b: str
    c: str

    def __init__(self, a: str, b: str, c: str) -> None:  # noqa: D105 - canonicalizing init
        if len({a, b, c}) != 3:
            raise ValueError(f"triple needs three distinct leaves, got {(a, b, c)}")
        if b < a:
            a, b = b, a
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b)

    @property
    def outgroup(self) -> str:
        return self.c

    @property
    def leaves(self) -> frozenset[str]:
        return frozenset((self.a, self.b, self.c))

    def __repr__(self) -> str:
        return f"{self.a},{self.b}|{self.c}"


class TripleSet:
    """A deduplicated set of rooted triples over a fixed leaf universe."""

    __slots__ = ("triples", "universe")

    def __init__(self, triples: Iterable[Triple] = (), universe: Iterable[str] | None = None):
        self.triples = frozenset(triples)
        used = frozenset(l for t in self.triples for l in (t.a, t.b, t.c))
        if universe is None:
            self.universe = used
        else:
            self.universe = frozenset(universe)
            if not used <= self.universe:
                raise ValueError(f"triples mention leaves outside the universe: {sorted(used - self.universe)}")

    def restrict(self, leaves: Iterable[str]) -> "TripleSet":
        """Keep only triples whose three leaves all lie in ``leaves``."""
        keep = frozenset(leaves)
        return TripleSet((t for t in self.triples if t.leaves <= keep), universe=keep & self.universe)

    def is_strictly_dense(self) -> bool:
        """True iff exactly one triple is present for every 3-subset of the universe."""
        seen = {}
        for t in self.triples:
            key = frozenset((t.a, t.b, t.c))
            if key in seen:
                return False
            seen[key] = t
        from math import comb

        return len(seen) == comb(len(self.universe), 3)

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self.triples))

    def __len__(self) -> int:
        return len(self.triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self.triples

    def __or__(self, other: "TripleSet") -> "TripleSet":
        return TripleSet(self.triples | other.triples, universe=self.universe | other.universe)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TripleSet):
            return NotImplemented
        return self.triples == other.triples and self.universe == other.universe

    def __hash__(self) -> int:
        return hash((self.triples, self.universe))

    def __repr__(self) -> str:
        return f"TripleSet({sorted(self.triples)!r}, universe={sorted(self.universe)!r})"


class Tree:
    """A rooted tree with canonical child order.

    ``children`` maps a node id to its child ids; leaves may be omitted or
    mapped to an empty sequence.  Inner nodes need at least two children,
    except that a *planted* tree may have a root with exactly one child
    (``planted=True``).
    """

    __slots__ = ("root", "colors", "times", "events", "_children", "_parent",
                 "_leafset", "_leaves", "_depth", "_key")

    def __init__(
        self,
        children: Mapping[str, Sequence[str]],
        root: str,
        colors: Mapping[str, str] | None = None,
        times: Mapping[str, float] | None = None,
        events: Mapping[str, str] | None = None,
        planted: bool = False,
    ):
        kids = {u: tuple(cs) for u, cs in children.items() if cs}
        nodes = {root} | set(kids)
        for cs in kids.values():
            nodes.update(cs)
        parent: dict[str, str] = {}
        for u, cs in kids.items():
            for c in cs:
                if c in parent:
                    raise ValueError(f"node {c!r} has two parents")
                if c == u:
                    raise ValueError(f"node {c!r} is its own child")
                parent[c] = u
        if root in parent:
            raise ValueError("root must not have a parent")
        orphans = nodes - parent.keys() - {root}
        if orphans:
            raise ValueError(f"nodes not reachable from the root: {sorted(orphans)}")
        for u, cs in kids.items():
            if len(cs) == 1 and not (planted and u == root):
                raise ValueError(f"inner node {u!r} has a single child (only a planted root may)")
        # reachability / cycle check
        seen = set()
        stack = [root]
        while stack:
            u = stack.pop()
            if u in seen:
                raise ValueError("cycle detected")
            seen.add(u)
            stack.extend(kids.get(u, ()))
        if seen != nodes:
            raise ValueError("children mapping is not a tree")

        self.root = root
        self._parent = parent

        # leaf sets bottom-up, then canonical child order (min leaf id first)
        order = self._compute_postorder(kids, root)
        leafset: dict[str, frozenset[str]] = {}
        for u in order:
            cs = kids.get(u, ())
            if not cs:
                leafset[u] = frozenset((u,))
            else:
                acc: set[str] = set()
                for c in cs:
                    acc |= leafset[c]
                leafset[u] = frozenset(acc)
        self._leafset = leafset
        self._children = {
            u: tuple(sorted(cs, key=lambda c: min(leafset[c]))) for u, cs in kids.items()
        }
        self._leaves = tuple(sorted(leafset[root]))
        self._depth: dict[str, int] | None = None
        self._key: str | None = None

        leaves = set(self._leaves)
        if colors is not None:
            missing = leaves - set(colors)
            if missing:
                raise ValueError(f"no color for leaf {sorted(missing)[0]!r}")
            self.colors = {l: colors[l] for l in self._leaves}
        else:
            self.colors = None
        if times is not None:
            missing = seen - set(times)
            if missing:
                raise ValueError(f"no time stamp for node {sorted(missing)[0]!r}")
            for c, u in parent.items():
                if not times[c] < times[u]:
                    raise ValueError(f"time stamps not strictly decreasing along edge {u!r} -> {c!r}")
            self.times = {u: float(times[u]) for u in seen}
        else:
            self.times = None
        if events is not None:
            bad = set(events) - seen
            if bad:
                raise ValueError(f"event tag for unknown node {sorted(bad)[0]!r}")
            bad_tags = set(events.values()) - EVENT_TAGS
            if bad_tags:
                raise ValueError(f"unknown event tag {sorted(bad_tags)[0]!r}")
            self.events = dict(events)
        else:
            self.events = None

    @staticmethod
    def _compute_postorder(kids: Mapping[str, tuple[str, ...]], root: str) -> list[str]:
        out: list[str] = []
        stack: list[tuple[str, bool]] = [(root, False)]
        while stack:
            u, done = stack.pop()
            if done:
                out.append(u)
            else:
                stack.append((u, True))
                for c in kids.get(u, ()):
                    stack.append((c, False))
        return out

    # ------------------------------------------------------------------ shape

    @classmethod
    def from_nested(
        cls,
        nested,
        colors: Mapping[str, str] | None = None,
        **kw,
    ) -> "Tree":
        """Build a tree from nested tuples/lists of leaf ids.

        ``Tree.from_nested((("a", "b"), "c"))`` is the triple ``ab|c`` as a tree.
        """
        children: dict[str, list[str]] = {}
        counter = itertools.count()

        def walk(spec) -> str:
            if isinstance(spec, str):
                if not LEAF_LABEL_RE.fullmatch(spec):
                    raise ValueError(f"invalid leaf id {spec!r}")
                return spec
            node = f"{_INNER_PREFIX}{next(counter)}"
            children[node] = [walk(s) for s in spec]
            return node

        root = walk(nested)
        return cls(children, root, colors=colors, **kw)

    def children(self, u: str) -> tuple[str, ...]:
        return self._children.get(u, ())

    def parent(self, u: str) -> str | None:
        return self._parent.get(u)

    @property
    def leaves(self) -> tuple[str, ...]:
        """Leaves in canonical (lexicographic) order."""
        return self._leaves

    @property
    def leaf_set(self) -> frozenset[str]:
        return self._leafset[self.root]

    @property
    def n_leaves(self) -> int:
        return len(self._leaves)

    def nodes(self) -> tuple[str, ...]:
        """All node ids in preorder (canonical child order)."""
        out = []
        stack = [self.root]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self._children.get(u, ())))
        return tuple(out)

    def inner_nodes(self) -> tuple[str, ...]:
        return tuple(u for u in self.nodes() if self._children.get(u))

    def is_leaf(self, u: str) -> bool:
        return u not in self._children

    def leaf_set_below(self, u: str) -> frozenset[str]:
        return self._leafset[u]

    @property
    def is_planted(self) -> bool:
        return len(self._children.get(self.root, ())) == 1

    @property
    def is_binary(self) -> bool:
        return all(len(cs) == 2 for cs in self._children.values())

    def subtree(self, u: str) -> "Tree":
        """The subtree rooted at ``u`` as a standalone tree."""
        if u not in self._leafset:
            raise ValueError(f"unknown node {u!r}")
        keep = set()
        stack = [u]
        while stack:
            v = stack.pop()
            keep.add(v)
            stack.extend(self._children.get(v, ()))
        children = {v: cs for v, cs in self._children.items() if v in keep}
        colors = {l: self.colors[l] for l in self._leafset[u]} if self.colors is not None else None
        times = {v: self.times[v] for v in keep} if self.times is not None else None
        events = {v: e for v, e in self.events.items() if v in keep} if self.events is not None else None
        return Tree(children, u, colors=colors, times=times, events=events)

    # ------------------------------------------------------------- lca & triples

    def _depth_of(self, u: str) -> int:
        if self._depth is None:
            depth = {self.root: 0}
            stack = [self.root]
            while stack:
                v = stack.pop()
                for c in self._children.get(v, ()):
                    depth[c] = depth[v] + 1
                    stack.append(c)
            self._depth = depth
        return self._depth[u]

    def _lca2(self, u: str, v: str) -> str:
        du, dv = self._depth_of(u), self._depth_of(v)
        while du > dv:
            u = self._parent[u]
            du -= 1
        while dv > du:
            v = self._parent[v]
            dv -= 1
        while u != v:
            u = self._parent[u]
            v = self._parent[v]
        return u

    def lca(self, nodes: Iterable[str]) -> str:
        """Last common ancestor of a non-empty set of nodes."""
        it = iter(nodes)
        try:
            cur = next(it)
        except StopIteration:
            raise ValueError("lca of an empty set") from None
        if cur not in self._leafset:
            raise ValueError(f"unknown node {cur!r}")
        for v in it:
            if v not in self._leafset:
                raise ValueError(f"unknown node {v!r}")
            cur = self._lca2(cur, v)
        return cur

    def displays(self, t: Triple) -> bool:
        """True iff this tree displays the rooted triple ``t``."""
        universe = self._leafset[self.root]
        for l in (t.a, t.b, t.c):
            if l not in universe:
                raise ValueError(f"leaf {l!r} not in tree")
        u = self._lca2(t.a, t.b)
        w = self._lca2(u, t.c)
        return u != w

    def all_triples(self) -> TripleSet:
        """All rooted triples displayed by this tree (cubic in the leaf count)."""
        total = self.leaf_set
        out: set[Triple] = set()
        for u in self.inner_nodes():
            below = self._leafset[u]
            outside = total - below
            if not outside:
                continue
            for a, b in itertools.combinations(sorted(below), 2):
                for c in outside:
                    out.add(Triple(a, b, c))
        return TripleSet(out, universe=total)

    def clusters(self) -> frozenset[frozenset[str]]:
        """The leaf set of every node (singletons and the full set included)."""
        return frozenset(self._leafset.values())

    # --------------------------------------------------------------- operations

    def _fresh_ids(self) -> Iterator[str]:
        used = {u for u in self._leafset if u.startswith(_INNER_PREFIX)}
        i = 0
        while True:
            cand = f"{_INNER_PREFIX}{i}"
            if cand not in used:
                yield cand
            i += 1

    def binary_refine(self) -> "Tree":
        """Resolve every multifurcation into a caterpillar over its children.

        Children are taken in canonical order, so the result is deterministic;
        a binary tree is returned unchanged.  Time stamps and event tags are
        dropped because the new inner nodes have neither.
        """
        if self.is_binary:
            return self
        fresh = self._fresh_ids()
        new_children: dict[str, tuple[str, ...]] = {}
        for u in self._compute_postorder(self._children, self.root):
            cs = self._children.get(u, ())
            if len(cs) <= 2:
                if cs:
                    new_children[u] = cs
                continue
            cur = cs[0]
            for c in cs[1:-1]:
                n = next(fresh)
                new_children[n] = (cur, c)
                cur = n
            new_children[u] = (cur, cs[-1])
        return Tree(new_children, self.root, colors=self.colors)

    def contract_edges(self, edges: Iterable[tuple[str, str]]) -> "Tree":
        """Contract the given inner edges ``(parent, child)``."""
        todo = set()
        for u, v in edges:
            if self._parent.get(v) != u:
                raise ValueError(f"no edge {u!r} -> {v!r}")
            if self.is_leaf(v):
                raise ValueError(f"cannot contract the leaf edge into {v!r}")
            todo.add(v)
        new_children = {u: list(cs) for u, cs in self._children.items()}
        # deepest-first so chains of contractions resolve cleanly
        for v in sorted(todo, key=self._depth_of, reverse=True):
            u = self._parent[v]
            pos = new_children[u].index(v)
            new_children[u][pos:pos + 1] = new_children.pop(v)
        return Tree(new_children, self.root, colors=self.colors)

    def suppress_unary(self) -> "Tree":
        """Remove nodes with a single child (including a planted root)."""
        rep: dict[str, str] = {}
        new_children: dict[str, tuple[str, ...]] = {}
        for u in self._compute_postorder(self._children, self.root):
            cs = self._children.get(u, ())
            if not cs:
                rep[u] = u
            elif len(cs) == 1:
                rep[u] = rep[cs[0]]
            else:
                new_children[u] = tuple(rep[c] for c in cs)
                rep[u] = u
        root = rep[self.root]
        keep = {root} | set(new_children)
        for cs in new_children.values():
            keep.update(cs)
        times = {v: self.times[v] for v in keep} if self.times is not None else None
        events = {v: e for v, e in self.events.items() if v in keep} if self.events is not None else None
        return Tree(new_children, root, colors=self.colors, times=times, events=events)

    def resolution(self) -> Fraction:
        """Degree of resolution: 0 for a star, 1 for a binary tree.

        Only defined for unplanted trees with more than two leaves.
        """
        if self.is_planted:
            raise ValueError("resolution is undefined for planted trees")
        n = self.n_leaves
        if n <= 2:
            raise ValueError("resolution is undefined for trees with <= 2 leaves")
        n_nodes = len(self._leafset)
        return Fraction(n_nodes - n - 1, n - 2)

    def with_colors(self, colors: Mapping[str, str] | None) -> "Tree":
        return Tree(self._children, self.root, colors=colors, times=self.times, events=self.events,
                    planted=self.is_planted)

    # ------------------------------------------------------------- canonical form

    def canonical_key(self) -> str:
        """Canonical topology string (Newick without annotations)."""
        if self._key is None:
            parts: dict[str, str] = {}
            for u in self._compute_postorder(self._children, self.root):
                cs = self._children.get(u, ())
                parts[u] = u if not cs else "(" + ",".join(parts[c] for c in cs) + ")"
            self._key = parts[self.root] + ";"
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return self.canonical_key() == other.canonical_key() and self.colors == other.colors

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def __repr__(self) -> str:
        return f"Tree({self.canonical_key()!r})"

    def to_newick(self) -> str:
        """Serialize to Newick with bare leaf labels and unlabeled inner nodes."""
        return self.canonical_key()


def is_refinement(fine: Tree, coarse: Tree) -> bool:
    """True iff ``fine`` refines ``coarse`` (same leaves, all groupings kept).

    Checked both through clusters and through displayed triples; the two
    characterizations must agree, otherwise something is broken internally.
    """
    if fine.leaf_set != coarse.leaf_set:
        return False
    by_clusters = coarse.clusters() <= fine.clusters()
    by_triples = coarse.all_triples().triples <= fine.all_triples().triples
    if by_clusters != by_triples:
        raise RuntimeError("cluster and triple refinement checks disagree")
    return by_clusters


# ---------------------------------------------------------------------- newick

def parse_newick(text: str) -> Tree:
    """Parse a Newick string with bare leaf labels and unlabeled inner nodes.

    Branch lengths, inner labels and quoting are rejected.  A unary root
    (planted tree) is accepted.
    """
    counter = itertools.count()
    children: dict[str, list[str]] = {}
    stack: list[list[str]] = []
    top: str | None = None
    need_item = False  # a '(' or ',' was seen and no element has followed yet
    i = 0
    n = len(text)

    def fail(msg: str) -> ValueError:
        return ValueError(f"newick error at position {i}: {msg}")

    def emit(item: str) -> None:
        nonlocal top, need_item
        need_item = False
        if stack:
            stack[-1].append(item)
        elif top is None:
            top = item
        else:
            raise fail("second top-level element")

    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            if not stack and top is not None:
                raise fail("second top-level element")
            stack.append([])
            need_item = True
            i += 1
        elif ch == ",":
            if not stack or need_item:
                raise fail("unexpected ','")
            need_item = True
            i += 1
        elif ch == ")":
            if not stack:
                raise fail("unbalanced ')'")
            if need_item:
                raise fail("unexpected ')'")
            group = stack.pop()
            if not group:
                raise fail("empty group")
            if len(group) == 1 and stack:
                raise fail("inner node with a single child")
            node = f"{_INNER_PREFIX}{next(counter)}"
            children[node] = group
            emit(node)
            i += 1
        elif ch == ";":
            i += 1
            if stack:
                raise fail("';' inside a group")
            break
        else:
            m = LEAF_LABEL_RE.match(text, i)
            if not m:
                raise fail(f"unexpected character {ch!r}")
            label = m.group()
            i = m.end()
            if i < n and text[i] not in ",();" and not text[i].isspace():
                raise fail(f"unexpected character {text[i]!r}")
            emit(label)
    else:
        raise ValueError("newick error: missing ';'")
    if text[i:].strip():
        raise ValueError("newick error: trailing characters after ';'")
    if top is None:
        raise ValueError("newick error: empty input")
    if stack:
        raise ValueError("newick error: unbalanced '('")
    seen_leaves: list[str] = []
    for cs in children.values():
        seen_leaves.extend(c for c in cs if not c.startswith(_INNER_PREFIX))
    dup = [l for l, k in _counts(seen_leaves).items() if k > 1]
    if dup:
        raise ValueError(f"duplicate leaf id {sorted(dup)[0]!r}")
    planted = top in children and len(children[top]) == 1
    return Tree(children, top, planted=planted)


def _counts(items: Iterable[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for x in items:
        out[x] = out.get(x, 0) + 1
    return out


# ------------------------------------------------------------------ color TSV

def parse_color_tsv(text: str) -> dict[str, str]:
    """Parse ``leaf<TAB>color`` lines (UTF-8, no header)."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValueError(f"color TSV line {lineno}: expected 'leaf<TAB>color', got {line!r}")
        leaf, color = parts
        if leaf in out:
            raise ValueError(f"color TSV line {lineno}: duplicate leaf {leaf!r}")
        out[leaf] = color
    return out


def format_color_tsv(colors: Mapping[str, str]) -> str:
    return "".join(f"{leaf}\t{colors[leaf]}\n" for leaf in sorted(colors))
