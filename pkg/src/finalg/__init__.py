"""Finite universal algebra: congruences, commutators, traces and links.

Everything operates on small finite algebras given by explicit operation
tables.  The central objects are meet-irreducible congruences, the
centralizer machinery around their unique upper covers, and certified
four-column linking relations between pairs of such congruences; the
verify module replays the whole body of certified facts over a corpus.
"""

from .algebra import (
    ElementMap,
    FiniteAlgebra,
    Operation,
    dump_algebra,
    find_isomorphism,
    is_subuniverse,
    load_algebra,
    product,
    sg,
)
from .bridges import (
    AdjacencyResult,
    BridgeCert,
    BruteResult,
    OptBridgeResult,
    adjacency_search,
    bridge_from_json,
    bridge_to_json,
    certify_bridge,
    compact_restrict,
    compose,
    converse,
    cross_cover_bridge,
    extract_b3,
    good_bridge_between,
    identity_bridge,
    induced_iso,
    is_bridge,
    is_good,
    lift_bridge,
    opt,
    opt_bridge,
    opt_bruteforce,
    project_bridge,
    quad_generate,
)
from .commutator import (
    ClassGroup,
    centralizer,
    centralizes,
    centrality_violation,
    class_group,
    is_abelian,
    is_abelian_algebra,
    is_abelian_modulo,
)
from .congruences import (
    ConLattice,
    Congruence,
    bar_rho,
    cg,
    con_lattice,
    cov,
    cov_plus,
    format_partition,
    is_irreducible,
    is_si,
    meet_irreducibles,
    monolith,
    parse_partition,
    quotient_of,
    saturate_generate,
)
from .corpus import (
    CorpusEntry,
    build_corpus,
    builtin_corpus,
    enumerate_groupoids,
    load_corpus_dir,
    verify_witnesses,
    write_corpus_dir,
)
from .deltasim import (
    DResult,
    ZetaResult,
    build_D,
    build_T_DA,
    build_theta_algebra,
    build_zeta,
    check_similarity_bridge,
    delta,
    is_similar,
)
from .errors import (
    FinalgError,
    HypothesisError,
    NotACongruence,
    ResourceLimitError,
    SignatureError,
    TheoremViolation,
)
from .limits import DEFAULT_LIMITS, Limits
from .relations import BinRel, QuadRel
from .terms import (
    eval_term,
    format_term,
    is_maltsev,
    is_weak_difference_term,
    is_wnu,
    parse_term,
    search_term,
    term_table,
)
from .verify import (
    CheckRecord,
    VerificationReport,
    build_bridge_pool,
    report_to_json,
    verify_all,
    verify_suite,
)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyResult",
    "BinRel",
    "BridgeCert",
    "BruteResult",
    "CheckRecord",
    "ClassGroup",
    "ConLattice",
    "Congruence",
    "CorpusEntry",
    "DEFAULT_LIMITS",
    "DResult",
    "ElementMap",
    "FinalgError",
    "FiniteAlgebra",
    "HypothesisError",
    "Limits",
    "NotACongruence",
    "Operation",
    "OptBridgeResult",
    "QuadRel",
    "ResourceLimitError",
    "SignatureError",
    "TheoremViolation",
    "VerificationReport",
    "ZetaResult",
    "adjacency_search",
    "bar_rho",
    "bridge_from_json",
    "bridge_to_json",
    "build_D",
    "build_T_DA",
    "build_bridge_pool",
    "build_corpus",
    "build_theta_algebra",
    "build_zeta",
    "builtin_corpus",
    "centralizer",
    "centralizes",
    "centrality_violation",
    "certify_bridge",
    "cg",
    "check_similarity_bridge",
    "class_group",
    "compact_restrict",
    "compose",
    "con_lattice",
    "converse",
    "cov",
    "cov_plus",
    "cross_cover_bridge",
    "delta",
    "dump_algebra",
    "enumerate_groupoids",
    "eval_term",
    "extract_b3",
    "find_isomorphism",
    "format_partition",
    "format_term",
    "good_bridge_between",
    "identity_bridge",
    "induced_iso",
    "is_abelian",
    "is_abelian_algebra",
    "is_abelian_modulo",
    "is_bridge",
    "is_good",
    "is_irreducible",
    "is_maltsev",
    "is_si",
    "is_similar",
    "is_subuniverse",
    "is_weak_difference_term",
    "is_wnu",
    "lift_bridge",
    "load_algebra",
    "load_corpus_dir",
    "meet_irreducibles",
    "monolith",
    "opt",
    "opt_bridge",
    "opt_bruteforce",
    "parse_partition",
    "parse_term",
    "product",
    "project_bridge",
    "quad_generate",
    "quotient_of",
    "report_to_json",
    "saturate_generate",
    "search_term",
    "sg",
    "term_table",
    "verify_all",
    "verify_suite",
    "verify_witnesses",
    "write_corpus_dir",
]
