"""grigwalk: Grigorchuk groups, permutational wreath products, and
random-walk boundary diagnostics.

The package provides exact group arithmetic for the Grigorchuk family G_omega
(with a decidable word problem), the right action on the rooted-tree boundary
with lazy Schreier graphs, wreath products A wr_X G, finitely supported
measure calculus (convolution, entropy, heavy-tailed block mixtures),
simulation and exact series for induced random walks, the renormalization of
self-similar measures, centered Markov chain decompositions, and the
substitution-word combinatorics that certify maximal inverted-orbit growth.
"""

__version__ = "0.1.0"

from .boundary import (
    ProductPoint,
    Ray,
    SchreierGraph,
    apply,
    apply_diagonal,
    apply_product,
    export_graph,
    fixes,
    rho1,
    rho2,
    rho_pair,
)
from .core import (
    GroupElement,
    GroupSpec,
    OmegaSequence,
    Section,
    ball_profile,
    canonical_key,
    element_order,
    first_group,
    geodesic_length,
    is_trivial,
    make_group,
    multiply,
    reduce_word,
    wreath_recurse,
)
from .measures import (
    FiniteMeasure,
    GroupOps,
    MixtureMeasure,
    NuGamma,
    beta_moment,
    dirac,
    first_moment_partial,
    fit_decay_exponent,
    kaimanovich_measure,
    negative_moment,
    negative_moment_series,
    nu_gamma,
    nu_power_table,
    ops_for_group,
    ops_for_tuple,
    ops_for_wreath,
    product_measure,
    product_switch_measure,
    stirling_expected,
    sup_bound_series,
    torsion_product_measure,
    uniform_generator_measure,
)
from .wreath import (
    BUILTIN_GROUPS,
    FiniteGroupA,
    GroupAction,
    WreathElement,
    WreathProduct,
    cyclic_group,
    klein_group,
    standard_generators,
    symmetric3,
    w_canonical_key,
    w_multiply,
)
from .walks import (
    EstimateSeries,
    OrbitIndex,
    WalkConfig,
    consistency_report,
    drift_series,
    exact_entropy_series,
    exact_induced_series,
    expected_delta_series,
    explore_orbit,
    fit_power_law,
    inverted_orbit_literal,
    inverted_orbit_size,
    mixture_return_series,
    phi_sigma_trace,
    simulate,
)
from .chains import (
    CenteredChain,
    Cycle,
    cycles_from_torsion_measure,
    escape_probability,
    escape_profile,
    symmetrize,
    validate_centered,
)
from .renorm import (
    RenormResult,
    beta_exponent,
    coordinate_flip_mass,
    entropy_bound_experiment,
    laziness_split,
    renormalize,
    stopping_law_two_state,
    verify_self_similar,
)
from .subst import (
    TreeEmbedding,
    alternating_words,
    classify_stabilizer_word,
    eta_root,
    flatten,
    growth_rate,
    min_stabilizer_word_length,
    orbit_counts,
    section_identity_check,
    strongly_linear_word,
    tree_embedding,
    verify_distinct_inverted_orbit,
    w_n,
    zeta,
)
