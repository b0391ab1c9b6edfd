"""Generic Mamdani fuzzy-inference toolkit: membership functions, linguistic
variables, a textual rule DSL, and a traced inference engine."""
from .membership import (
    LinguisticVariable,
    MembershipFunction,
    Trapezoid,
    Triangle,
    Universe,
    mf_from_params,
)
from .rules import (
    And,
    Atom,
    DuplicateRuleIdError,
    Expr,
    Or,
    Rule,
    RuleBase,
    UnboundInputError,
    antecedent_strength,
    evaluate_expr,
    expr_atoms,
)
from .dsl import (
    RuleSyntaxError,
    UnknownNameError,
    format_rule,
    format_rules,
    parse_rules,
)
from .engine import (
    ActivationTrace,
    InferenceError,
    MamdaniEngine,
    RuleActivation,
    defuzz_centroid,
)

__all__ = [
    "ActivationTrace",
    "And",
    "Atom",
    "DuplicateRuleIdError",
    "Expr",
    "InferenceError",
    "LinguisticVariable",
    "MamdaniEngine",
    "MembershipFunction",
    "Or",
    "Rule",
    "RuleActivation",
    "RuleBase",
    "RuleSyntaxError",
    "Trapezoid",
    "Triangle",
    "UnboundInputError",
    "Universe",
    "UnknownNameError",
    "antecedent_strength",
    "defuzz_centroid",
    "evaluate_expr",
    "expr_atoms",
    "format_rule",
    "format_rules",
    "mf_from_params",
    "parse_rules",
]
