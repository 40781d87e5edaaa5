"""Graphs with quasirandom clique counts that are not quasirandom.

The part weights come from real roots of the deformed exponential
``f_p(x) = sum_j x^j p^C(j,2) / j!`` (or its degree-k truncation); the
resulting complete multipartite graphs match ``p^C(j,2) n^j`` labeled
``K_j`` counts yet contain an independent set of linear size.
"""
from .audit import (
    AuditConfig,
    AuditReport,
    count_labeled_c4,
    count_labeled_cliques,
    count_labeled_cliques_multipartite,
    count_labeled_copies_bruteforce,
    count_labeled_cycles,
    count_labeled_stars,
    p3_check,
    quasirandomness_report,
)
from .defexp import (
    eval_deformed_exp,
    eval_deformed_exp_derivative,
    kurtz_check,
    pantograph_residual,
    truncated_coefficients,
)
from .ensemble import (
    SeededRng,
    build_multipartite,
    clique_plus_isolated,
    complete_bipartite,
    gnp,
    paley,
    sample_graphon_graph,
)
from .graph import Graph, PartitionWitness
from .numeric import DensityParam
from .spectrum import (
    find_roots_entire,
    find_roots_truncated,
    roots_to_weights,
    verify_elementary_symmetric,
    weights_below_tail,
)

__all__ = [name for name in dir() if not name.startswith("_")]
