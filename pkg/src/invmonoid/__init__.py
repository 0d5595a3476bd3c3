"""Finitely presented inverse monoids: approximation, certificates, languages.

The package is organised around Stephen's iterative approximation of the
automaton of a word.  words and graphs hold the base vocabulary, stephen
the expansion engine, sapling the finite certificates and their regrowth,
langtools the derived automata (geodesic acceptors, pushdown compilation,
the word problem), geometry the finite-graph hyperbolicity and
tree-likeness checks, and cli the batch front end.
"""
from .words import (
    InvWord,
    Letter,
    Presentation,
    format_presentation,
    format_word,
    free_reduce,
    invert_word,
    parse_presentation,
    parse_word,
    presentation,
)
from .graphs import (
    BirootedAutomaton,
    ColoredBall,
    InvWordGraph,
    colored_iso,
    cut_components,
    export_dot,
    export_json,
    fold,
    fold_with_map,
    import_json,
    neighborhood,
    rooted_iso,
)
from .stephen import (
    ApproxAutomaton,
    approx_accepts,
    build_e_presentation,
    decide_semi,
    exp_step,
    expand,
    fim_equal,
    full_p_expansion,
    is_p_complete,
    is_relatively_p_complete,
    munn_tree,
)
from .sapling import (
    Exhausted,
    FiniteGraph,
    Sapling,
    SaplingCandidate,
    Violation,
    candidate_check,
    color_neighborhood,
    find_sapling,
    grow,
    grow_chain,
    load_sapling,
    materialize,
    partition_width_bound,
    proof_partition,
    sapling_check,
    save_sapling,
    verify_sapling,
)
from .geometry import (
    DiscType,
    TreeDecomposition,
    TreeOfHyperbolicReport,
    cone,
    disc_type,
    disc_type_equiv,
    dump_partition,
    four_point_gaps,
    gromov_delta,
    load_partition,
    polygon_hyperbolic_check,
    quotient_graph,
    strong_tree_check,
    tree_of_hyperbolic_verify,
)
from .langtools import (
    Fsa,
    Pda,
    PdaTransition,
    build_pda,
    determinize,
    export_fsa,
    export_pda,
    fsa_equal,
    fsa_language_upto,
    geodesic_automaton,
    import_fsa,
    import_pda,
    minimize,
    pda_accepts,
    word_problem,
)

__version__ = "0.1.0"
