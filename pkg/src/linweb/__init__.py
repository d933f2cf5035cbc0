"""Linear inferences in Boolean logic: terms, relation webs, monotone
functions, rewriting, triviality analysis and atomic flows."""

from .terms import (
    BOT,
    TOP,
    And,
    Const,
    Or,
    ParseError,
    TermError,
    Var,
    ac_canonical,
    normalize_acu_prime,
    parse_term,
    render,
)
from .webs import LabelledGraph, RelationWeb, is_p4_free, term_of_web, web_of
from .semantics import entails, implies, is_read_once, is_tautology, maxterms, minterms, threshold, truth_table
from .inference import (
    Derivation,
    Inference,
    critical_chains,
    check_increasing_measure,
    eliminate_negation,
    erasure_trivialities,
    is_sound,
    remove_trivialities,
    trivial_at,
)
from .rewriting import (
    RewriteRule,
    RuleSet,
    builtin_rules,
    enumerate_linear_terms,
    is_minimal,
    match_steps,
    medial_preorder,
    reachable,
    rule_set,
)
from .reduction import reduce_tautology
from .flows import AtomicFlow, eliminate_loops, extract_flow, has_contraction_loop, rewrite_flow
from .graphlogic import chain_search, rel_and, rel_or

__version__ = "0.1.0"


__all__ = [
    "BOT",
    "TOP",
    "And",
    "Const",
    "Or",
    "ParseError",
    "TermError",
    "Var",
    "ac_canonical",
    "normalize_acu_prime",
    "parse_term",
    "render",
    "LabelledGraph",
    "RelationWeb",
    "is_p4_free",
    "term_of_web",
    "web_of",
    "entails",
    "implies",
    "is_tautology",
    "is_read_once",
    "maxterms",
    "minterms",
    "threshold",
    "truth_table",
    "Derivation",
    "Inference",
    "critical_chains",
    "check_increasing_measure",
    "eliminate_negation",
    "erasure_trivialities",
    "is_sound",
    "remove_trivialities",
    "trivial_at",
    "RewriteRule",
    "RuleSet",
    "builtin_rules",
    "enumerate_linear_terms",
    "is_minimal",
    "match_steps",
    "medial_preorder",
    "reachable",
    "rule_set",
    "reduce_tautology",
    "AtomicFlow",
    "eliminate_loops",
    "extract_flow",
    "has_contraction_loop",
    "rewrite_flow",
    "chain_search",
    "rel_and",
    "rel_or",
]
