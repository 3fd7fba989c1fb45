"""Coupled matrix families: reducibility, intertwining equations, and
Schur-type dichotomies.

A coupled family is a grid of blocks A = {A_ij}, where A_ij maps the j-th
space into the i-th.  The package decides coupled reducibility (plain,
proper, strong), solves the coupled intertwining equations
A_ij X_j = X_i B_ij, classifies the solutions against the zero-or-nonsingular
dichotomies, and handles the coupled-normal refinements where solutions are
scalar multiples of unitaries.
"""

from .linalg import (
    DEFAULT_TOL,
    GaussianRational,
    NonHermitianError,
    SingularMatrixError,
    TolerancePolicy,
)
from .family import (
    CoupledFamily,
    InvalidFamilyError,
    SimilarityWitness,
    apply_coupled_similarity,
    coupled_normality_violations,
    is_coupled_normal,
)
from .graphs import (
    DimensionReport,
    FamilyDigraph,
    LinkedGraph,
    family_digraph,
    is_strongly_connected,
    linked_graph,
    solution_rank_report,
    strongly_connected_components,
    subspace_dimension_report,
)
from .reduce import (
    BlockFormResult,
    BudgetExceededError,
    BurnsideCertificate,
    PreconditionError,
    ReducibilityVerdict,
    Strength,
    SubspaceFamily,
    block_form_transform,
    chain_classify,
    closure_from_seed,
    complement_family,
    containment_table,
    coupled_irreducible_burnside,
    search_witness,
    verify_reducing,
)
from .sylvester import (
    DichotomyReport,
    FamilyReducibilityAudit,
    HypothesisAudit,
    PropagationReport,
    SchurClassification,
    SolutionSpace,
    SylvesterSystem,
    audit_family,
    audit_hypotheses,
    build_system,
    classify_solution,
    dichotomy_report,
    exact_solution_holds,
    propagation_checks,
    solution_residual,
    solve,
)
from .normality import (
    CoupledCommuteReport,
    EmbeddedPair,
    NormalityEquivalenceReport,
    PerpInvarianceResult,
    coupled_commute_checks,
    embed_pair,
    normal_equivalence_suite,
    perp_invariance_check,
    unitary_schur_classify,
)
from .fixtures import (
    FixtureSpec,
    RandomPairResult,
    classical_schur_embed,
    example_51,
    example_51_planted_solution,
    figure1_pair,
    jordan_nilpotent,
    make_fixture,
    nilpotent_block,
    proper_not_strong,
    random_pair,
    red_not_proper,
    rotation_block,
    rotation_family,
)
from .familyfile import FamilyFileError, family_meta, parse_family, serialize_family

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "GaussianRational",
    "NonHermitianError",
    "SingularMatrixError",
    "TolerancePolicy",
    "CoupledFamily",
    "InvalidFamilyError",
    "SimilarityWitness",
    "apply_coupled_similarity",
    "coupled_normality_violations",
    "is_coupled_normal",
    "DimensionReport",
    "FamilyDigraph",
    "LinkedGraph",
    "family_digraph",
    "is_strongly_connected",
    "linked_graph",
    "solution_rank_report",
    "strongly_connected_components",
    "subspace_dimension_report",
    "BlockFormResult",
    "BudgetExceededError",
    "BurnsideCertificate",
    "PreconditionError",
    "ReducibilityVerdict",
    "Strength",
    "SubspaceFamily",
    "block_form_transform",
    "chain_classify",
    "closure_from_seed",
    "complement_family",
    "containment_table",
    "coupled_irreducible_burnside",
    "search_witness",
    "verify_reducing",
    "DichotomyReport",
    "FamilyReducibilityAudit",
    "HypothesisAudit",
    "PropagationReport",
    "SchurClassification",
    "SolutionSpace",
    "SylvesterSystem",
    "audit_family",
    "audit_hypotheses",
    "build_system",
    "classify_solution",
    "dichotomy_report",
    "exact_solution_holds",
    "propagation_checks",
    "solution_residual",
    "solve",
    "CoupledCommuteReport",
    "EmbeddedPair",
    "NormalityEquivalenceReport",
    "PerpInvarianceResult",
    "coupled_commute_checks",
    "embed_pair",
    "normal_equivalence_suite",
    "perp_invariance_check",
    "unitary_schur_classify",
    "FixtureSpec",
    "RandomPairResult",
    "classical_schur_embed",
    "example_51",
    "example_51_planted_solution",
    "figure1_pair",
    "jordan_nilpotent",
    "make_fixture",
    "nilpotent_block",
    "proper_not_strong",
    "random_pair",
    "red_not_proper",
    "rotation_block",
    "rotation_family",
    "FamilyFileError",
    "family_meta",
    "parse_family",
    "serialize_family",
    "__version__",
]
