"""Arc modification toward binary-explainable best match graphs.

Provides the three modification modes (edit / delete / complete), a
desk-scale exact search, and an integer-linear-program builder with
CPLEX-LP export.  The model uses one binary arc variable per ordered vertex
pair and one triple variable per (sorted pair, outgroup); feasible points
are exactly the binary-explainable graphs reachable under the chosen mode,
so the optimum equals the minimum modification count.

No solver is embedded: models are exported as LP text for external solvers,
and a small exhaustive assignment checker covers fixture-sized models.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .graphs import ColoredDigraph
from .inference import binary_explaining_tree
from .trees import Triple, TripleSet

MODES = ("edit", "delete", "complete")

BRUTE_FORCE_MAX_VERTICES = 6
CHECKER_MAX_FREE_VARS = 24

_LP_ID_RE = re.compile(r"[A-Za-z0-9_]+\Z")


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    return mode


# --------------------------------------------------------------------- edit sets

@dataclass(frozen=True)
class EditSet:
    """A set of arc insertions and deletions (disjoint, no self-loops)."""

    insert: frozenset[tuple[str, str]] = frozenset()
    delete: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "insert", frozenset(tuple(a) for a in self.insert))
        object.__setattr__(self, "delete", frozenset(tuple(a) for a in self.delete))
        for u, v in self.insert | self.delete:
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) in edit set")
        overlap = self.insert & self.delete
        if overlap:
            raise ValueError(f"arcs both inserted and deleted: {sorted(overlap)}")

    def __len__(self) -> int:
        return len(self.insert) + len(self.delete)

    def to_json(self) -> str:
        return json.dumps(
            {
                "insert": [list(a) for a in sorted(self.insert)],
                "delete": [list(a) for a in sorted(self.delete)],
            },
            indent=2,
        ) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EditSet":
        data = json.loads(text)
        if not isinstance(data, dict) or set(data) - {"insert", "delete"}:
            raise ValueError("edit set JSON must be an object with keys 'insert'/'delete'")

        def arcs(key: str) -> frozenset[tuple[str, str]]:
            rows = data.get(key, [])
            if not isinstance(rows, list):
                raise ValueError(f"{key!r} must be a list of arc pairs")
            out = set()
            for row in rows:
                if (not isinstance(row, list) or len(row) != 2
                        or not all(isinstance(e, str) for e in row)):
                    raise ValueError(f"bad arc entry in {key!r}: {row!r}")
                out.add((row[0], row[1]))
            return frozenset(out)

        return cls(insert=arcs("insert"), delete=arcs("delete"))


def apply_edit(g: ColoredDigraph, f: EditSet) -> ColoredDigraph:
    """Symmetric difference of the arc set with ``f``; coloring unchanged."""
    for u, v in f.insert | f.delete:
        if u not in g.colors or v not in g.colors:
            raise ValueError(f"edit touches unknown vertex in arc ({u},{v})")
    bad = f.insert & g.arcs
    if bad:
        raise ValueError(f"insertions already present: {sorted(bad)}")
    bad = f.delete - g.arcs
    if bad:
        raise ValueError(f"deletions not present: {sorted(bad)}")
    return g.with_arcs((g.arcs | f.insert) - f.delete)


def edit_from_arc_set(g: ColoredDigraph, arcs: Iterable[tuple[str, str]]) -> EditSet:
    """Split a set of toggled arcs into insertions and deletions w.r.t. ``g``."""
    arcs = frozenset(arcs)
    return EditSet(insert=arcs - g.arcs, delete=arcs & g.arcs)


def _toggle_pool(g: ColoredDigraph, mode: str) -> list[tuple[str, str]]:
    # same-colored pairs are useless in every mode: toggling one on can never
    # produce a properly colored graph
    cross = [
        (u, v)
        for u, v in itertools.permutations(g.vertices, 2)
        if g.colors[u] != g.colors[v]
    ]
    if mode == "delete":
        pool = [a for a in cross if a in g.arcs]
    elif mode == "complete":
        pool = [a for a in cross if a not in g.arcs]
    else:
        pool = cross
    pool.sort()
    return pool


def brute_force_edit(g: ColoredDigraph, mode: str, k_max: int) -> tuple[EditSet, int] | None:
    """Smallest arc modification making ``g`` binary-explainable, if any.

    Exhausts all candidate sets of size 0, 1, ..., ``k_max`` over the
    bichromatic pairs admitted by ``mode``; ties are broken by lexicographic
    order of the toggled arc list, so the result is deterministic.  Refuses
    graphs with more than ``BRUTE_FORCE_MAX_VERTICES`` vertices.
    """
    _check_mode(mode)
    if len(g.vertices) > BRUTE_FORCE_MAX_VERTICES:
        raise ValueError(
            f"exhaustive search is limited to {BRUTE_FORCE_MAX_VERTICES} vertices, "
            f"got {len(g.vertices)}"
        )
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    pool = _toggle_pool(g, mode)
    for k in range(min(k_max, len(pool)) + 1):
        for combo in itertools.combinations(pool, k):
            candidate = g.with_arcs(g.arcs ^ frozenset(combo))
            if binary_explaining_tree(candidate).ok:
                return edit_from_arc_set(g, combo), k
    return None


# ------------------------------------------------------------------- ILP model

@dataclass(frozen=True)
class LinearConstraint:
    name: str
    coeffs: tuple[tuple[str, int], ...]
    sense: str  # "<=", ">=" or "="
    rhs: int


@dataclass(frozen=True)
class IlpModel:
    """A pure-data 0/1 program; all variables are binary.

    ``objective`` holds the linear terms and ``objective_constant`` the
    constant part, so the optimum value equals the modification count
    directly.  ``epsilon_index`` maps ordered vertex pairs and
    ``triple_index`` maps canonical triples to variable names.
    """

    variables: tuple[str, ...]
    objective: tuple[tuple[str, int], ...]
    objective_constant: int
    constraints: tuple[LinearConstraint, ...]
    epsilon_index: Mapping[tuple[str, str], str] = field(default_factory=dict)
    triple_index: Mapping[Triple, str] = field(default_factory=dict)
    vertices: tuple[str, ...] = ()
    colors: Mapping[str, str] = field(default_factory=dict)


def _lp_name(kind: str, *parts: str) -> str:
    name = kind + "_" + "_".join(parts)
    return name


def build_ilp(g: ColoredDigraph, mode: str) -> IlpModel:
    """0/1 program whose feasible points are the binary-explainable graphs
    reachable from ``g`` under ``mode``, with the modification count as
    objective.

    Variables: ``e_x_y`` for every ordered pair of distinct vertices and
    ``t_a_b_c`` for each 3-subset and outgroup choice (pair sorted).
    Constraint families, in emission order: mode rows (deletion/completion
    only), same-color zero fixes, sink-freeness per vertex and color,
    informative-triple implications, forbidden-pair implications, the
    one-of-three topology choice per 3-subset, and the 2-order inference
    rows over 4-subsets.
    """
    _check_mode(mode)
    if not g.properly_colored:
        raise ValueError("input graph must be properly colored")
    present_colors = sorted(set(g.colors.values()))
    if len(present_colors) < 2:
        raise ValueError("editing model needs at least two colors")
    V = g.vertices
    for v in V:
        if not _LP_ID_RE.match(v):
            raise ValueError(f"vertex id {v!r} is not a valid LP identifier fragment")

    eps: dict[tuple[str, str], str] = {}
    for x, y in itertools.permutations(V, 2):
        eps[(x, y)] = _lp_name("e", x, y)
    tvar: dict[Triple, str] = {}
    for a, b, c in itertools.combinations(V, 3):
        for t in (Triple(a, b, c), Triple(a, c, b), Triple(b, c, a)):
            tvar[t] = _lp_name("t", *t.pair, t.outgroup)
    variables = tuple(eps.values()) + tuple(tvar[t] for t in sorted(tvar, key=lambda t: (*t.pair, t.outgroup)))
    if len(set(variables)) != len(variables):
        raise ValueError("vertex ids collide after variable-name mangling")

    objective = tuple(
        (eps[(x, y)], -1 if (x, y) in g.arcs else 1)
        for x, y in itertools.permutations(V, 2)
    )
    constant = len(g.arcs)

    rows: list[LinearConstraint] = []

    def add(name: str, coeffs, sense: str, rhs: int) -> None:
        rows.append(LinearConstraint(name, tuple(coeffs), sense, rhs))

    if mode != "edit":
        for x, y in itertools.permutations(V, 2):
            e_xy = 1 if (x, y) in g.arcs else 0
            if mode == "complete":
                add(_lp_name("mode", x, y), [(eps[(x, y)], 1)], ">=", e_xy)
            else:
                add(_lp_name("mode", x, y), [(eps[(x, y)], 1)], "<=", e_xy)

    for x, y in itertools.permutations(V, 2):
        if g.colors[x] == g.colors[y]:
            add(_lp_name("fix", x, y), [(eps[(x, y)], 1)], "=", 0)

    for x in V:
        for si, s in enumerate(present_colors):
            if s == g.colors[x]:
                continue
            coeffs = [(eps[(x, y)], 1) for y in V if y != x and g.colors[y] == s]
            add(_lp_name("sf", x, str(si)), coeffs, ">=", 1)

    for x, y, y2 in itertools.permutations(V, 3):
        if g.colors[x] != g.colors[y] and g.colors[y] == g.colors[y2]:
            add(
                _lp_name("inf", x, y, y2),
                [(eps[(x, y)], 1), (eps[(x, y2)], -1), (tvar[Triple(x, y, y2)], -1)],
                "<=",
                0,
            )
    for x in V:
        for y, y2 in itertools.combinations(V, 2):
            if x in (y, y2):
                continue
            if g.colors[x] != g.colors[y] and g.colors[y] == g.colors[y2]:
                add(
                    _lp_name("forb", x, y, y2),
                    [(eps[(x, y)], 1), (eps[(x, y2)], 1), (tvar[Triple(y, y2, x)], -1)],
                    "<=",
                    1,
                )

    for a, b, c in itertools.combinations(V, 3):
        add(
            _lp_name("one", a, b, c),
            [(tvar[Triple(a, b, c)], 1), (tvar[Triple(a, c, b)], 1), (tvar[Triple(b, c, a)], 1)],
            "=",
            1,
        )

    # the 2-order inference row is not symmetric in its four arguments, so it
    # is instantiated for every ordering; identical rows are merged
    seen: set[tuple] = set()
    for quad in itertools.combinations(V, 4):
        for a, b, c, d in itertools.permutations(quad):
            coeffs: dict[str, int] = {}
            for t, w in (
                (Triple(a, b, c), 2),
                (Triple(a, d, b), 2),
                (Triple(b, d, c), -1),
                (Triple(a, d, c), -1),
            ):
                name = tvar[t]
                coeffs[name] = coeffs.get(name, 0) + w
            key = tuple(sorted(coeffs.items()))
            if key in seen:
                continue
            seen.add(key)
            add(
                _lp_name("ord", a, b, c, d),
                sorted(coeffs.items()),
                "<=",
                2,
            )

    return IlpModel(
        variables=variables,
        objective=objective,
        objective_constant=constant,
        constraints=tuple(rows),
        epsilon_index=eps,
        triple_index=tvar,
        vertices=V,
        colors=dict(g.colors),
    )


def decode_graph(model: IlpModel, assignment: Mapping[str, int]) -> ColoredDigraph:
    """The graph selected by the ε-variables of a feasible assignment."""
    arcs = {pair for pair, var in model.epsilon_index.items() if assignment[var]}
    return ColoredDigraph(model.colors, arcs)


def decode_triples(model: IlpModel, assignment: Mapping[str, int]) -> TripleSet:
    """The strictly dense triple set selected by the t-variables."""
    return TripleSet(
        (t for t, var in model.triple_index.items() if assignment[var]),
        universe=model.vertices,
    )


# ------------------------------------------------------------------ LP export

def export_lp(model: IlpModel) -> str:
    """Serialize to CPLEX-LP text (Minimize / Subject To / Binary / End)."""
    lines = ["Minimize"]

    def term(var: str, coeff: int, lead: bool) -> str:
        sign = "-" if coeff < 0 else ("" if lead else "+")
        mag = abs(coeff)
        body = var if mag == 1 else f"{mag} {var}"
        return f"{sign} {body}".strip() if not lead else f"{sign}{body}"

    obj_parts = []
    for var, coeff in model.objective:
        obj_parts.append(term(var, coeff, lead=not obj_parts))
    if model.objective_constant:
        c = model.objective_constant
        if obj_parts:
            obj_parts.append(f"+ {c}" if c > 0 else f"- {-c}")
        else:
            obj_parts.append(str(c))
    if not obj_parts:
        obj_parts = ["0"]
    lines.append(" obj: " + " ".join(obj_parts))
    lines.append("Subject To")
    for c in model.constraints:
        parts = []
        for var, coeff in c.coeffs:
            if coeff == 0:
                continue
            parts.append(term(var, coeff, lead=not parts))
        if not parts:
            parts = ["0 " + model.variables[0]]
        sense = {"<=": "<=", ">=": ">=", "=": "="}[c.sense]
        lines.append(f" {c.name}: " + " ".join(parts) + f" {sense} {c.rhs}")
    lines.append("Binary")
    for var in model.variables:
        lines.append(f" {var}")
    lines.append("End")
    return "\n".join(lines) + "\n"


_SENSE_RE = re.compile(r"(<=|>=|=)")


def parse_lp(text: str) -> tuple[tuple[tuple[str, int], ...], int, tuple[LinearConstraint, ...], tuple[str, ...]]:
    """Strict parser for the LP subset written by :func:`export_lp`.

    Returns (objective terms, objective constant, constraints, binary
    variables).  Intended as an independent syntax validator: it re-tokenizes
    the text rather than trusting the writer.
    """
    body = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not body or body[0].lower() != "minimize":
        raise ValueError("LP text must start with 'Minimize'")
    try:
        sub_at = next(i for i, ln in enumerate(body) if ln.lower() == "subject to")
        bin_at = next(i for i, ln in enumerate(body) if ln.lower() == "binary")
        end_at = next(i for i, ln in enumerate(body) if ln.lower() == "end")
    except StopIteration:
        raise ValueError("LP text must contain 'Subject To', 'Binary' and 'End' sections") from None
    if not (0 < sub_at < bin_at < end_at == len(body) - 1):
        raise ValueError("LP sections out of order")

    def split_label(line: str) -> tuple[str, str]:
        if ":" not in line:
            raise ValueError(f"missing label in line: {line!r}")
        label, rest = line.split(":", 1)
        if not _LP_ID_RE.match(label.strip()):
            raise ValueError(f"bad label {label!r}")
        return label.strip(), rest

    def parse_terms(expr: str) -> tuple[list[tuple[str, int]], int]:
        tokens = expr.replace("+", " + ").replace("-", " - ").split()
        terms: list[tuple[str, int]] = []
        const = 0
        sign = 1
        pending: int | None = None
        for tok in tokens:
            if tok == "+":
                sign, pending = 1, None
            elif tok == "-":
                sign, pending = -1, None
            elif tok.isdigit():
                if pending is not None:
                    raise ValueError(f"two numbers in a row in {expr!r}")
                pending = int(tok)
            elif _LP_ID_RE.match(tok):
                coeff = sign * (pending if pending is not None else 1)
                terms.append((tok, coeff))
                sign, pending = 1, None
            else:
                raise ValueError(f"bad token {tok!r} in {expr!r}")
        if pending is not None:
            const += sign * pending
        return terms, const

    obj_line = " ".join(body[1:sub_at])
    _, obj_expr = split_label(obj_line)
    objective, constant = parse_terms(obj_expr)

    constraints = []
    for line in body[sub_at + 1:bin_at]:
        name, rest = split_label(line)
        m = _SENSE_RE.search(rest)
        if not m:
            raise ValueError(f"no sense in constraint {line!r}")
        sense = m.group(1)
        lhs, rhs_text = rest[: m.start()], rest[m.end():]
        terms, lhs_const = parse_terms(lhs)
        rhs_terms, rhs_const = parse_terms(rhs_text)
        if rhs_terms:
            raise ValueError(f"variables on RHS unsupported: {line!r}")
        constraints.append(LinearConstraint(name, tuple(terms), sense, rhs_const - lhs_const))

    binaries = tuple(body[bin_at + 1:end_at])
    for var in binaries:
        if not _LP_ID_RE.match(var):
            raise ValueError(f"bad variable name {var!r}")
    declared = set(binaries)
    used = {v for v, _ in objective} | {v for c in constraints for v, _ in c.coeffs}
    undeclared = used - declared
    if undeclared:
        raise ValueError(f"variables used but not declared binary: {sorted(undeclared)[:5]}")
    return tuple(objective), constant, tuple(constraints), binaries


# --------------------------------------------------- exhaustive model checking

def _presolve(model: IlpModel) -> dict[str, int]:
    """Fixings implied by single-variable rows (iterated to a fixed point)."""
    fixed: dict[str, int] = {}
    changed = True
    while changed:
        changed = False
        for c in model.constraints:
            live = [(v, w) for v, w in c.coeffs if v not in fixed and w != 0]
            base = sum(w * fixed[v] for v, w in c.coeffs if v in fixed)
            if len(live) != 1:
                continue
            v, w = live[0]
            vals = [x for x in (0, 1) if _sat(w * x + base, c.sense, c.rhs)]
            if not vals:
                raise ValueError(f"infeasible during presolve at row {c.name}")
            if len(vals) == 1:
                fixed[v] = vals[0]
                changed = True
    return fixed


def _sat(lhs: int, sense: str, rhs: int) -> bool:
    if sense == "<=":
        return lhs <= rhs
    if sense == ">=":
        return lhs >= rhs
    return lhs == rhs


class _SearchState:
    """Incremental bound bookkeeping for the exhaustive 0/1 search."""

    def __init__(self, model: IlpModel, fixed: Mapping[str, int]):
        self.model = model
        self.free = [v for v in model.variables if v not in fixed]
        self.fixed = dict(fixed)
        self.rows = []
        for c in model.constraints:
            base = sum(w * fixed[v] for v, w in c.coeffs if v in fixed)
            live = [(v, w) for v, w in c.coeffs if v not in fixed and w != 0]
            lo = base + sum(min(0, w) for _, w in live)
            hi = base + sum(max(0, w) for _, w in live)
            self.rows.append((c, live, base, lo, hi))

    def row_feasible(self, assignment: Mapping[str, int]) -> bool:
        for c, live, base, _, _ in self.rows:
            lhs = base + sum(w * assignment[v] for v, w in live)
            if not _sat(lhs, c.sense, c.rhs):
                return False
        return True


def enumerate_feasible(model: IlpModel, limit: int | None = None) -> Iterator[dict[str, int]]:
    """All feasible 0/1 assignments (for soundness tests on small models)."""
    fixed = _presolve(model)
    state = _SearchState(model, fixed)
    if len(state.free) > CHECKER_MAX_FREE_VARS:
        raise ValueError(
            f"model has {len(state.free)} free variables; "
            f"exhaustive checking is capped at {CHECKER_MAX_FREE_VARS}"
        )
    count = 0
    for bits in itertools.product((0, 1), repeat=len(state.free)):
        assignment = dict(fixed)
        assignment.update(zip(state.free, bits))
        if state.row_feasible(assignment):
            yield assignment
            count += 1
            if limit is not None and count >= limit:
                return


def solve_exact(model: IlpModel) -> tuple[int, dict[str, int]] | None:
    """Optimum of the model by branch and bound over the free variables.

    Usable on fixture-sized models only (free variables capped).  Returns
    (objective value including the constant, an optimal assignment), or None
    when infeasible.
    """
    try:
        fixed = _presolve(model)
    except ValueError:
        return None
    free = [v for v in model.variables if v not in fixed]
    if len(free) > CHECKER_MAX_FREE_VARS:
        raise ValueError(
            f"model has {len(free)} free variables; "
            f"exhaustive checking is capped at {CHECKER_MAX_FREE_VARS}"
        )
    obj = dict(model.objective)
    # assign high-impact variables first so the objective bound bites early
    free.sort(key=lambda v: -abs(obj.get(v, 0)))

    rows = []
    for c in model.constraints:
        base = sum(w * fixed[v] for v, w in c.coeffs if v in fixed)
        live = {v: w for v, w in c.coeffs if v not in fixed and w != 0}
        rows.append((c.sense, c.rhs, base, live))
    by_var: dict[str, list[int]] = {v: [] for v in free}
    for i, (_, _, _, live) in enumerate(rows):
        for v in live:
            by_var[v].append(i)

    lo = [base + sum(min(0, w) for w in live.values()) for _, _, base, live in rows]
    hi = [base + sum(max(0, w) for w in live.values()) for _, _, base, live in rows]

    base_obj = model.objective_constant + sum(obj.get(v, 0) * x for v, x in fixed.items())
    # the remaining objective can only decrease by the negative coefficients
    neg_suffix = [0] * (len(free) + 1)
    for i in range(len(free) - 1, -1, -1):
        neg_suffix[i] = neg_suffix[i + 1] + min(0, obj.get(free[i], 0))

    best: tuple[int, dict[str, int]] | None = None

    def bounds_ok(indices) -> bool:
        for i in indices:
            sense, rhs = rows[i][0], rows[i][1]
            if sense == "<=" and lo[i] > rhs:
                return False
            if sense == ">=" and hi[i] < rhs:
                return False
            if sense == "=" and not (lo[i] <= rhs <= hi[i]):
                return False
        return True

    assignment: dict[str, int] = {}

    def dfs(depth: int, cur_obj: int) -> None:
        nonlocal best
        if best is not None and cur_obj + neg_suffix[depth] >= best[0]:
            return
        if depth == len(free):
            if best is None or cur_obj < best[0]:
                best = (cur_obj, {**fixed, **assignment})
            return
        v = free[depth]
        w_obj = obj.get(v, 0)
        for val in (0, 1) if w_obj >= 0 else (1, 0):
            assignment[v] = val
            touched = by_var[v]
            saved = [(i, lo[i], hi[i]) for i in touched]
            for i in touched:
                w = rows[i][3][v]
                contrib = w * val
                lo[i] += contrib - min(0, w)
                hi[i] += contrib - max(0, w)
            if bounds_ok(touched):
                dfs(depth + 1, cur_obj + w_obj * val)
            for i, l, h in saved:
                lo[i], hi[i] = l, h
            del assignment[v]

    if bounds_ok(range(len(rows))):
        dfs(0, base_obj)
    return best
