"""Homomorphism-count features, hom-augmented color refinement, and pattern tooling.

Layer map: ``graphs`` (representations, isomorphism, canonical codes),
``algebra`` (join/quotient/spasm/core/treewidth), ``counting`` (brute and
decomposition-based kernels, injective and subgraph counts), ``refinement``
(1-dim, hom-augmented, and folklore k-dim engines), ``trees`` (pattern-tree
enumeration and the equivalence harness), ``families`` (separating graph
generators), ``pipeline`` (dataset features, normalization, advisor),
``cli`` (the ``homcount`` command).
"""

from homcount.algebra import (
    NiceTreeDecomposition,
    Partition,
    SizeGuardError,
    TreeDecomposition,
    automorphism_count,
    core_of,
    is_join_decomposable,
    join,
    join_factors,
    nice_decomposition,
    quotient,
    spasm,
    treewidth,
)
from homcount.counting import (
    MAX_COUNT,
    CountOverflowError,
    CountVector,
    FeatureMatrix,
    feature_matrix,
    hom_count_brute,
    hom_count_dp,
    hom_vector,
    inj_count,
    inj_vector,
    sub_count,
    sub_vector,
)
from homcount.families import (
    GraphPair,
    ParityVertex,
    bowtie_pattern,
    cfi_pair,
    clique_pattern,
    cycle_hierarchy_pair,
    cycle_pattern,
    cycle_union_pair,
    delayed_triangle_pair,
    path_pattern,
    wl_equivalent_triangle_pair,
)
from homcount.graphs import (
    Graph,
    LabelAlphabet,
    ParseError,
    RootedPattern,
    canonical_code,
    is_isomorphic,
    parse_graph,
    parse_pattern,
    serialize_graph,
    serialize_pattern,
)
from homcount.pipeline import (
    AdvisorReport,
    advise,
    compute_features,
    load_dataset,
    load_pattern_set,
    write_csv,
)
from homcount.refinement import (
    Coloring,
    TupleColoring,
    Verdict,
    distinguishability_matrix,
    f_wl,
    graph_verdict,
    k_wl,
    k_wl_trace,
    wl_refine,
)
from homcount.trees import (
    EnumerationBudget,
    HarnessReport,
    PatternTree,
    enumerate_pattern_trees,
    flatten,
    hom_pattern_tree,
    tree_equivalence_report,
)

__all__ = [
    "AdvisorReport",
    "Coloring",
    "CountOverflowError",
    "CountVector",
    "EnumerationBudget",
    "FeatureMatrix",
    "Graph",
    "GraphPair",
    "HarnessReport",
    "LabelAlphabet",
    "MAX_COUNT",
    "NiceTreeDecomposition",
    "ParityVertex",
    "ParseError",
    "Partition",
    "PatternTree",
    "RootedPattern",
    "SizeGuardError",
    "TreeDecomposition",
    "TupleColoring",
    "Verdict",
    "advise",
    "automorphism_count",
    "bowtie_pattern",
    "canonical_code",
    "cfi_pair",
    "clique_pattern",
    "compute_features",
    "core_of",
    "cycle_hierarchy_pair",
    "cycle_pattern",
    "cycle_union_pair",
    "delayed_triangle_pair",
    "distinguishability_matrix",
    "enumerate_pattern_trees",
    "f_wl",
    "feature_matrix",
    "flatten",
    "graph_verdict",
    "hom_count_brute",
    "hom_count_dp",
    "hom_pattern_tree",
    "hom_vector",
    "inj_count",
    "inj_vector",
    "is_isomorphic",
    "is_join_decomposable",
    "join",
    "join_factors",
    "k_wl",
    "k_wl_trace",
    "load_dataset",
    "load_pattern_set",
    "nice_decomposition",
    "parse_graph",
    "parse_pattern",
    "path_pattern",
    "quotient",
    "serialize_graph",
    "serialize_pattern",
    "spasm",
    "sub_count",
    "sub_vector",
    "tree_equivalence_report",
    "treewidth",
    "wl_equivalent_triangle_pair",
    "wl_refine",
    "write_csv",
]
