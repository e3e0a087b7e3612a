"""Evolutionary scenario simulation and resolution statistics.

Species trees follow the innovation model (species characterized by feature
sets; speciation through feature gain or loss), dated with a planted root at
time 1.0 and extant leaves at time 0.  Gene trees evolve along the species
tree under a constant-rate birth-death process with duplications, losses and
horizontal transfers, with additional branchings at every speciation.  Losses
are constrained so that every species-tree branch keeps at least one
surviving gene lineage.

The experiment runner measures how resolved the reconstructed trees are:
for each replicate it builds the best match graph of the observable gene
tree and compares the resolution of the least resolved tree against the
binary-refinable one.
"""

from __future__ import annotations

import csv
import hashlib
import heapq
import io
import random
import statistics
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .graphs import bmg_from_tree
from .inference import brt, lrt
from .trees import Tree, is_refinement

MAX_PROPOSAL_REJECTIONS = 10**5
MAX_LOSS_REJECTIONS = 10**5

#: replicates at or below this leaf count re-verify the refinement invariants
INVARIANT_CHECK_MAX_GENES = 30


@dataclass(frozen=True)
class Rates:
    """Birth-death event rates per gene lineage and unit time."""

    duplication: float
    loss: float
    hgt: float

    def __post_init__(self):
        for name in ("duplication", "loss", "hgt"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} rate must be non-negative")

    @property
    def total(self) -> float:
        return self.duplication + self.loss + self.hgt


def _derived_seed(master_seed: int, *parts) -> int:
    text = ":".join([str(master_seed), *map(str, parts)])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


# ------------------------------------------------------------- species trees

def innovation_species_tree(n: int, seed: int) -> Tree:
    """Planted, dated, binary species tree on ``n`` leaves (``s0`` ... ``s{n-1}``).

    Species are modeled as feature sets, starting from a single species with
    one feature.  Each step picks a species uniformly and proposes, with equal
    probability, either an innovation (a brand-new feature, always valid) or
    the loss of one feature (valid only if the reduced set is distinct from
    all existing species); invalid proposals are redrawn.  Every accepted
    proposal is a speciation.
    """
    if n < 2:
        raise ValueError("need at least two species")
    rng = random.Random(seed)

    features: dict[int, frozenset[int]] = {0: frozenset((0,))}
    splits: dict[int, tuple[int, int]] = {}
    next_node = 1
    next_feature = 1
    rejections = 0
    while len(features) < n:
        alive = sorted(features)
        parent = alive[rng.randrange(len(alive))]
        fs = features[parent]
        if rng.random() < 0.5:
            new_fs = fs | {next_feature}
            next_feature += 1
        else:
            if len(fs) < 2:
                rejections += 1
                if rejections > MAX_PROPOSAL_REJECTIONS:
                    raise RuntimeError("innovation model stalled on loss proposals")
                continue
            dropped = sorted(fs)[rng.randrange(len(fs))]
            new_fs = fs - {dropped}
            if new_fs in features.values():
                rejections += 1
                if rejections > MAX_PROPOSAL_REJECTIONS:
                    raise RuntimeError("innovation model stalled on loss proposals")
                continue
        # speciation: the parent node becomes inner; both lineages live on
        cont, new = next_node, next_node + 1
        next_node += 2
        splits[parent] = (cont, new)
        features[cont] = fs
        features[new] = new_fs
        del features[parent]

    leaf_name = {node: f"s{i}" for i, node in enumerate(sorted(features))}

    def name(node: int) -> str:
        return leaf_name.get(node, f"%i{node}")

    children = {name(u): (name(a), name(b)) for u, (a, b) in splits.items()}
    children["%planted"] = (name(0),)

    # split times: descending uniforms along node creation order, which is a
    # topological order, so stamps strictly decrease away from the root
    stamps = sorted((rng.random() for _ in splits), reverse=True)
    times = {name(u): stamps[i] for i, u in enumerate(sorted(splits))}
    times["%planted"] = 1.0
    times.update({leaf: 0.0 for leaf in leaf_name.values()})

    events = {name(u): "speciation" for u in splits}
    events.update({leaf: "leaf" for leaf in leaf_name.values()})
    return Tree(children, "%planted", times=times, events=events, planted=True)


# ---------------------------------------------------------------- gene trees

@dataclass(frozen=True)
class Scenario:
    """One simulated history: species tree, full gene tree, observable part."""

    species_tree: Tree
    gene_tree: Tree
    observable: Tree
    gene_species: Mapping[str, str]  # every gene-tree node -> species edge (lower end)
    rates: Rates
    seed: int


def simulate_gene_tree(species_tree: Tree, rates: Rates, seed: int) -> Scenario:
    """Evolve one gene family along a dated, planted species tree.

    A single ancestral gene enters the planted edge.  Along every species
    edge, duplications, losses and transfers occur as a Poisson process; at
    each speciation every surviving lineage branches into all descendant
    edges.  Transfer copies jump to a co-existing species edge chosen
    uniformly (the proposal is dropped when no such edge exists); losses that
    would leave a species edge without any surviving lineage are rejected.
    """
    S = species_tree
    if not S.is_planted:
        raise ValueError("species tree must be planted")
    if S.times is None:
        raise ValueError("species tree must be dated")

    rng = random.Random(seed)
    children: dict[str, list[str]] = {}
    times: dict[str, float] = {}
    events: dict[str, str] = {}
    gene_species: dict[str, str] = {}

    counter = 0

    def emit(kind: str, edge: str, at: float, parent: str) -> str:
        """Materialize the gene-tree node for an event that just happened."""
        nonlocal counter
        node = f"g{counter}" if kind in ("leaf", "loss") else f"%g{counter}"
        counter += 1
        times[node] = at
        events[node] = kind
        gene_species[node] = edge
        children.setdefault(parent, []).append(node)
        return node

    # pending gene lineages: how many travel on each species edge right now,
    # and how many have already reached its lower end
    alive: dict[str, int] = {v: 0 for v in S.nodes()}
    passed: dict[str, int] = {v: 0 for v in S.nodes()}
    loss_rejections = 0

    # heap of (negated start-of-wait time, tiebreaker, edge, parent node):
    # times run from 1.0 down to 0.0
    heap: list[tuple[float, int, str, str]] = []
    seq = 0

    def spawn(edge: str, now: float, parent: str) -> None:
        """Create a pending lineage on ``edge`` and draw its next event time."""
        nonlocal seq
        nxt = now - (rng.expovariate(rates.total) if rates.total > 0 else float("inf"))
        at = max(nxt, S.times[edge])
        heapq.heappush(heap, (-at, seq, edge, parent))
        alive[edge] += 1
        seq += 1

    root_edge = S.children(S.root)[0]
    origin = f"%g{counter}"
    counter += 1
    times[origin] = 1.0
    gene_species[origin] = S.root
    spawn(root_edge, 1.0, origin)

    while heap:
        neg_at, _, edge, parent = heapq.heappop(heap)
        at = -neg_at
        alive[edge] -= 1
        if at <= S.times[edge]:
            # the lineage reached the lower end of its species edge
            at = S.times[edge]
            passed[edge] += 1
            kids = S.children(edge)
            if not kids:
                emit("leaf", edge, 0.0, parent)
                continue
            node = emit("speciation", edge, at, parent)
            for child_edge in kids:
                spawn(child_edge, at, node)
            continue
        kind = _pick_event(rng, rates)
        if kind == "loss":
            if alive[edge] + passed[edge] < 1:
                # the last lineage on this edge must survive; reject and redraw
                loss_rejections += 1
                if loss_rejections > MAX_LOSS_REJECTIONS:
                    raise RuntimeError("loss constraint rejected too many events")
                spawn(edge, at, parent)
                continue
            emit("loss", edge, at, parent)
            continue
        if kind == "duplication":
            node = emit("duplication", edge, at, parent)
            spawn(edge, at, node)
            spawn(edge, at, node)
            continue
        # horizontal transfer: donor continues, one copy jumps
        recipients = sorted(
            v
            for v in S.nodes()
            if v != S.root and v != edge and S.times[v] < at < S.times[S.parent(v)]
        )
        if not recipients:
            spawn(edge, at, parent)
            continue
        target = recipients[rng.randrange(len(recipients))]
        node = emit("hgt", edge, at, parent)
        spawn(edge, at, node)
        spawn(target, at, node)

    gene_tree = Tree(
        {u: tuple(cs) for u, cs in children.items()},
        origin,
        times=times,
        events=events,
        planted=True,
    )
    observable = prune_observable(gene_tree, gene_species)
    return Scenario(S, gene_tree, observable, gene_species, rates, seed)


def _pick_event(rng: random.Random, rates: Rates) -> str:
    u = rng.random() * rates.total
    if u < rates.duplication:
        return "duplication"
    if u < rates.duplication + rates.loss:
        return "loss"
    return "hgt"


def prune_observable(gene_tree: Tree, gene_species: Mapping[str, str]) -> Tree:
    """Restrict to extant genes: drop loss-only subtrees, suppress unary
    nodes, cut the planted edge, and color leaves by their species."""
    extant = [l for l in gene_tree.leaves if gene_tree.events[l] == "leaf"]
    if not extant:
        raise ValueError("no extant genes to observe")
    keep = set(extant)

    rep: dict[str, str] = {}
    kept_children: dict[str, tuple[str, ...]] = {}
    for node in reversed(gene_tree.nodes()):
        kids = gene_tree.children(node)
        if not kids:
            if node in keep:
                rep[node] = node
            continue
        sub = tuple(rep[c] for c in kids if c in rep)
        if len(sub) == 0:
            continue
        if len(sub) == 1:
            rep[node] = sub[0]
        else:
            rep[node] = node
            kept_children[node] = sub
    root = rep[gene_tree.root]
    colors = {leaf: gene_species[leaf] for leaf in extant}
    return Tree(kept_children, root, colors=colors)


# ------------------------------------------------------------ the experiment

@dataclass(frozen=True)
class ExperimentConfig:
    rate_grid: tuple[Rates, ...]
    replicates: int = 100
    species_min: int = 10
    species_max: int = 30
    master_seed: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("need at least one replicate")
        if not (3 <= self.species_min <= self.species_max):
            raise ValueError("species range must satisfy 3 <= min <= max")
        if not self.rate_grid:
            raise ValueError("empty rate grid")
        # accept bare (dup, loss, hgt) triples in place of Rates
        coerced = tuple(r if isinstance(r, Rates) else Rates(*r) for r in self.rate_grid)
        object.__setattr__(self, "rate_grid", coerced)


@dataclass(frozen=True)
class ReplicateRecord:
    rates: Rates
    replicate: int
    n_species: int
    n_genes: int
    res_lrt: Fraction
    res_brt: Fraction
    ratio: float | None


@dataclass(frozen=True)
class RateSummary:
    rates: Rates
    replicates: int
    median_res_lrt: float
    median_res_brt: float
    ratio_quartiles: tuple[float, float, float] | None  # Q1, median, Q3
    n_missing_ratio: int


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    records: tuple[ReplicateRecord, ...]

    def summaries(self) -> tuple[RateSummary, ...]:
        out = []
        for rates in self.config.rate_grid:
            rows = [r for r in self.records if r.rates == rates]
            ratios = sorted(r.ratio for r in rows if r.ratio is not None)
            if len(ratios) >= 2:
                q1, med, q3 = statistics.quantiles(ratios, n=4, method="inclusive")
                quart = (q1, med, q3)
            elif ratios:
                quart = (ratios[0], ratios[0], ratios[0])
            else:
                quart = None
            out.append(
                RateSummary(
                    rates=rates,
                    replicates=len(rows),
                    median_res_lrt=statistics.median(float(r.res_lrt) for r in rows),
                    median_res_brt=statistics.median(float(r.res_brt) for r in rows),
                    ratio_quartiles=quart,
                    n_missing_ratio=sum(1 for r in rows if r.ratio is None),
                )
            )
        return tuple(out)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["rate_dup", "rate_loss", "rate_hgt", "n_species", "replicate",
             "n_genes", "res_lrt", "res_brt", "ratio"]
        )
        for r in self.records:
            w.writerow(
                [
                    _num(r.rates.duplication),
                    _num(r.rates.loss),
                    _num(r.rates.hgt),
                    r.n_species,
                    r.replicate,
                    r.n_genes,
                    _num(float(r.res_lrt)),
                    _num(float(r.res_brt)),
                    "" if r.ratio is None else _num(r.ratio),
                ]
            )
        return buf.getvalue()


def _num(x: float) -> str:
    return f"{x:.10g}"


def run_replicate(rates: Rates, n_species: int, seed: int) -> tuple[Scenario, ReplicateRecord]:
    """Simulate one scenario and measure both reconstructions."""
    species = innovation_species_tree(n_species, _derived_seed(seed, "species"))
    scenario = simulate_gene_tree(species, rates, _derived_seed(seed, "genes"))
    observed = scenario.observable
    g = bmg_from_tree(observed)
    lrt_tree = lrt(g)
    brt_tree = brt(g)
    res_l = lrt_tree.resolution()
    res_b = brt_tree.resolution()
    if not 0 <= res_l <= res_b <= 1:
        raise AssertionError(f"resolution ordering violated: {res_l} vs {res_b}")
    if observed.n_leaves <= INVARIANT_CHECK_MAX_GENES:
        if not (is_refinement(observed, brt_tree) and is_refinement(brt_tree, lrt_tree)):
            raise AssertionError("observable tree does not refine the reconstructions")
    record = ReplicateRecord(
        rates=rates,
        replicate=0,
        n_species=n_species,
        n_genes=observed.n_leaves,
        res_lrt=res_l,
        res_brt=res_b,
        ratio=None if res_l == 0 else float(res_b / res_l),
    )
    return scenario, record


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Full grid run; every replicate is independently seeded and the
    resulting table is bit-reproducible given the master seed."""
    records = []
    for rate_idx, rates in enumerate(config.rate_grid):
        for rep in range(config.replicates):
            seed = _derived_seed(config.master_seed, rate_idx, rep)
            rng = random.Random(_derived_seed(seed, "size"))
            n_species = rng.randint(config.species_min, config.species_max)
            _, record = run_replicate(rates, n_species, seed)
            records.append(replace(record, replicate=rep))
    return ExperimentResult(config=config, records=tuple(records))


def gnuplot_script(csv_name: str, rate_grid: Sequence[Rates]) -> str:
    """A gnuplot script drawing one resolution-ratio boxplot per rate triple."""
    lines = [
        "set datafile separator ','",
        "set style data boxplot",
        "set style boxplot outliers pointtype 7",
        "set ylabel 'res(BRT) / res(LRT)'",
        "set xtics rotate by -30",
        "set key off",
        "set xtics (" + ", ".join(
            f"'{r.duplication:g}/{r.loss:g}/{r.hgt:g}' {i + 1}" for i, r in enumerate(rate_grid)
        ) + ")",
    ]
    sels = []
    for i, r in enumerate(rate_grid):
        cond = (
            f"($1=={r.duplication:g} && $2=={r.loss:g} && $3=={r.hgt:g}"
            " && strcol(9) ne '')"
        )
        sels.append(f"'{csv_name}' using ({i + 1}):({cond} ? $9 : 1/0)")
    lines.append("plot " + ", \\\n     ".join(sels))
    return "\n".join(lines) + "\n"
