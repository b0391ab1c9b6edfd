"""Rule expression trees, rules, and rule bases.

Antecedents are boolean expression trees over `variable IS term` atoms,
combined with AND (min) and OR (max). Trees are immutable and compare
structurally, which is what the DSL round-trip guarantees rely on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .membership import LinguisticVariable


class UnboundInputError(KeyError):
    """An antecedent referenced a variable with no crisp input bound."""

    def __init__(self, variable: str):
        super().__init__(variable)
        self.variable = variable

    def __str__(self) -> str:
        return f"no input bound for variable {self.variable!r}"


@dataclass(frozen=True)
class Atom:
    variable: str
    term: str


@dataclass(frozen=True)
class And:
    operands: tuple["Expr", ...]

    def __post_init__(self) -> None:
        if len(self.operands) < 2:
            raise ValueError("AND needs at least two operands")


@dataclass(frozen=True)
class Or:
    operands: tuple["Expr", ...]

    def __post_init__(self) -> None:
        if len(self.operands) < 2:
            raise ValueError("OR needs at least two operands")


Expr = Union[Atom, And, Or]


def expr_atoms(expr: Expr) -> Iterator[Atom]:
    """All atoms in an expression, left to right."""
    if isinstance(expr, Atom):
        yield expr
    else:
        for op in expr.operands:
            yield from expr_atoms(op)


def evaluate_expr(expr: Expr, degrees: Mapping[str, Mapping[str, float]]) -> float:
    """Evaluate a tree against pre-fuzzified degrees (min for AND, max for OR)."""
    if isinstance(expr, Atom):
        if expr.variable not in degrees:
            raise UnboundInputError(expr.variable)
        return degrees[expr.variable][expr.term]
    values = [evaluate_expr(op, degrees) for op in expr.operands]
    return min(values) if isinstance(expr, And) else max(values)


def antecedent_strength(
    expr: Expr,
    inputs: Mapping[str, float],
    variables: Mapping[str, LinguisticVariable],
) -> float:
    """Degree of an antecedent at crisp inputs, before any rule weight."""
    degrees: dict[str, Mapping[str, float]] = {}
    for atom in expr_atoms(expr):
        if atom.variable in degrees:
            continue
        if atom.variable not in inputs:
            raise UnboundInputError(atom.variable)
        degrees[atom.variable] = variables[atom.variable].fuzzify(inputs[atom.variable])
    return evaluate_expr(expr, degrees)


@dataclass(frozen=True)
class Rule:
    """One fuzzy rule: IF antecedent THEN consequent_variable IS consequent_term."""

    id: str
    antecedent: Expr
    consequent_variable: str
    consequent_term: str
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("rule id must be non-empty")
        if not 0.0 < self.weight <= 1.0:
            raise ValueError(f"rule {self.id}: weight must be in (0, 1], got {self.weight}")


class DuplicateRuleIdError(ValueError):
    pass


@dataclass(frozen=True)
class RuleBase:
    """Ordered, id-indexed collection of rules."""

    rules: tuple[Rule, ...]
    _by_id: Mapping[str, Rule] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[str, Rule] = {}
        for rule in self.rules:
            if rule.id in index:
                raise DuplicateRuleIdError(f"duplicate rule id {rule.id!r}")
            index[rule.id] = rule
        object.__setattr__(self, "_by_id", index)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __getitem__(self, rule_id: str) -> Rule:
        return self._by_id[rule_id]

    def ids(self) -> tuple[str, ...]:
        return tuple(rule.id for rule in self.rules)

    def validate_names(self, variables: Mapping[str, LinguisticVariable]) -> None:
        """Check that every referenced variable and term exists."""
        for rule in self.rules:
            for atom in expr_atoms(rule.antecedent):
                if atom.variable not in variables:
                    raise KeyError(f"rule {rule.id}: unknown variable {atom.variable!r}")
                if atom.term not in variables[atom.variable].terms:
                    raise KeyError(
                        f"rule {rule.id}: variable {atom.variable!r} has no term {atom.term!r}"
                    )
            if rule.consequent_variable not in variables:
                raise KeyError(f"rule {rule.id}: unknown variable {rule.consequent_variable!r}")
            if rule.consequent_term not in variables[rule.consequent_variable].terms:
                raise KeyError(
                    f"rule {rule.id}: variable {rule.consequent_variable!r} "
                    f"has no term {rule.consequent_term!r}"
                )
