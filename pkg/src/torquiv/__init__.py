"""torquiv: exact arithmetic for quiver polyhedra and toric quiver varieties."""

__version__ = "0.1.0"

from .quiver import (
    Arrow,
    Quiver,
    canonical_weight,
    components,
    euler_characteristic,
    is_strongly_connected,
    is_theta_stable,
    primitive_cycles,
    quiver_from_dict,
)
from .polytope import (
    BoundedFlowSpec,
    bounded_lattice_points,
    check_normality,
    dimension,
    facet_arrows,
    lattice_points,
    recession_hilbert_basis,
    to_quiver_polytope,
    vertices,
)
from .reductions import (
    ReductionTrace,
    contract,
    double_quiver,
    in_rd_form,
    is_contractible,
    is_prime,
    is_removable,
    is_tight,
    normalize_to_Rd,
    prime_decompose,
    reflect,
    skeleton,
    tighten,
    vertex_localization,
)
from .multigraph import (
    Multigraph,
    are_isomorphic,
    canonical_key,
    directed_canonical_key,
    from_canonical_key,
)
from .classify import (
    Fan2D,
    REFERENCE_FANS,
    build_Rd_quiver,
    classify_2d,
    enumerate_Rd,
    enumerate_affine_Rdd,
    enumerate_maximal_skeletons,
    enumerate_skeletons,
    kronecker_quiver,
    loop_quiver,
    normal_fan_2d,
    quiver_key,
    realize_Rprime,
)
from .ideal import (
    BinomialGen,
    DegreeViolation,
    DivisorGraph,
    GradedSemigroup,
    affine_relation_degree,
    certify_degree_bound,
    collapse_parallel,
    complete_to_equal_parts,
    divisor_graph,
    lift_generators,
    minimal_generators,
    osm_certify_degree3,
    osm_lattice_points,
)

__all__ = [
    "Arrow",
    "BinomialGen",
    "BoundedFlowSpec",
    "DegreeViolation",
    "DivisorGraph",
    "Fan2D",
    "GradedSemigroup",
    "Multigraph",
    "Quiver",
    "REFERENCE_FANS",
    "ReductionTrace",
    "affine_relation_degree",
    "are_isomorphic",
    "bounded_lattice_points",
    "build_Rd_quiver",
    "canonical_key",
    "canonical_weight",
    "certify_degree_bound",
    "check_normality",
    "classify_2d",
    "collapse_parallel",
    "complete_to_equal_parts",
    "components",
    "contract",
    "dimension",
    "directed_canonical_key",
    "divisor_graph",
    "double_quiver",
    "enumerate_Rd",
    "enumerate_affine_Rdd",
    "enumerate_maximal_skeletons",
    "enumerate_skeletons",
    "euler_characteristic",
    "facet_arrows",
    "from_canonical_key",
    "in_rd_form",
    "is_contractible",
    "is_prime",
    "is_removable",
    "is_strongly_connected",
    "is_theta_stable",
    "is_tight",
    "kronecker_quiver",
    "lattice_points",
    "lift_generators",
    "loop_quiver",
    "minimal_generators",
    "normal_fan_2d",
    "normalize_to_Rd",
    "osm_certify_degree3",
    "osm_lattice_points",
    "prime_decompose",
    "primitive_cycles",
    "quiver_from_dict",
    "quiver_key",
    "realize_Rprime",
    "recession_hilbert_basis",
    "reflect",
    "skeleton",
    "tighten",
    "to_quiver_polytope",
    "vertex_localization",
    "vertices",
]
