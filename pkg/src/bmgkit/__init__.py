"""Best match graphs: recognition, explaining trees, editing, simulation."""

from .graphs import (
    ColoredDigraph,
    bmg_from_tree,
    disjoint_union,
    forbidden_triples,
    induced_subgraph,
    informative_triples,
    is_sf_colored,
    rbin_triples,
)
from .inference import (
    AhoGraph,
    BuildOutcome,
    ExplainOutcome,
    NotBinaryExplainableError,
    NotBmgError,
    aho_graph,
    binary_explaining_tree,
    brt,
    build,
    closure_oracle,
    identifies_oracle,
    lrt,
)
from .recognition import (
    Witness,
    find_f_graph,
    find_hourglass,
    is_binary_explainable_via_hourglass,
    is_bmg,
    recognize,
    tree_binary_condition,
)
from .trees import (
    Tree,
    Triple,
    TripleSet,
    is_refinement,
    parse_color_tsv,
    parse_newick,
)

__version__ = "0.1.0"

__all__ = [
    "AhoGraph",
    "BuildOutcome",
    "ColoredDigraph",
    "ExplainOutcome",
    "NotBinaryExplainableError",
    "NotBmgError",
    "Tree",
    "Triple",
    "TripleSet",
    "Witness",
    "aho_graph",
    "binary_explaining_tree",
    "bmg_from_tree",
    "brt",
    "build",
    "closure_oracle",
    "disjoint_union",
    "find_f_graph",
    "find_hourglass",
    "forbidden_triples",
    "identifies_oracle",
    "induced_subgraph",
    "informative_triples",
    "is_binary_explainable_via_hourglass",
    "is_bmg",
    "is_refinement",
    "is_sf_colored",
    "lrt",
    "parse_color_tsv",
    "parse_newick",
    "rbin_triples",
    "recognize",
    "tree_binary_condition",
]
