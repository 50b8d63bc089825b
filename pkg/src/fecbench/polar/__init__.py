from .construction import (
    CodeConstruction,
    ShorteningPattern,
    bit_reverse,
    construct_ga,
    design_snr_search,
    ga_phi,
    ga_phi_inv,
    load_construction,
    make_shortening,
    save_construction,
)
from .codec import (
    PrunedTree,
    build_pruned_tree,
    count_ops_sc,
    count_ops_ssc,
    polar_encode,
    sc_decode,
    ssc_decode,
)

__all__ = [
    "CodeConstruction",
    "ShorteningPattern",
    "bit_reverse",
    "construct_ga",
    "design_snr_search",
    "ga_phi",
    "ga_phi_inv",
    "load_construction",
    "make_shortening",
    "save_construction",
    "PrunedTree",
    "build_pruned_tree",
    "count_ops_sc",
    "count_ops_ssc",
    "polar_encode",
    "sc_decode",
    "ssc_decode",
]
