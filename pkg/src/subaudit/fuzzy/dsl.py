"""Textual rule DSL: tokenizer, recursive-descent parser, pretty-printer.

Grammar (keywords case-insensitive, `#` starts a comment):

    rule  := RULE <id> : IF <expr> THEN <var> IS <term> [WEIGHT <number>]
    expr  := and_expr (OR and_expr)*
    and_expr := primary (AND primary)*
    primary  := '(' expr ')' | <var> IS <term>

AND binds tighter than OR. Identifiers are case-sensitive and resolved
against the supplied variable definitions at parse time.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .membership import LinguisticVariable
from .rules import And, Atom, Expr, Or, Rule, RuleBase

_KEYWORDS = {"RULE", "IF", "THEN", "IS", "AND", "OR", "WEIGHT"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<number>\d+(\.\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<colon>:)
    """,
    re.VERBOSE,
)


class RuleSyntaxError(ValueError):
    """Malformed rule text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownNameError(ValueError):
    """A rule referenced a variable or term that is not defined."""

    def __init__(self, message: str, name: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.name = name
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # keyword | name | number | lparen | rparen | colon | eof
    value: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        value = match.group()
        column = pos - line_start + 1
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind == "name":
            if value.upper() in _KEYWORDS:
                tokens.append(_Token("keyword", value.upper(), line, column))
            else:
                tokens.append(_Token("name", value, line, column))
        elif kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, column))
        pos = match.end()
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], variables: Mapping[str, LinguisticVariable]):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        token = self.current
        self.pos += 1
        return token

    def _fail(self, message: str) -> RuleSyntaxError:
        tok = self.current
        return RuleSyntaxError(message, tok.line, tok.column)

    def _expect_keyword(self, keyword: str) -> _Token:
        tok = self.current
        if tok.kind != "keyword" or tok.value != keyword:
            raise self._fail(f"expected {keyword}, found {tok.value or 'end of input'!r}")
        return self._advance()

    def _expect(self, kind: str, what: str) -> _Token:
        tok = self.current
        if tok.kind != kind:
            raise self._fail(f"expected {what}, found {tok.value or 'end of input'!r}")
        return self._advance()

    def parse_rules(self) -> list[Rule]:
        rules = []
        while self.current.kind != "eof":
            rules.append(self._parse_rule())
        return rules

    def _parse_rule(self) -> Rule:
        self._expect_keyword("RULE")
        rule_id = self._expect("name", "rule id").value
        self._expect("colon", "':'")
        self._expect_keyword("IF")
        antecedent = self._parse_or()
        self._expect_keyword("THEN")
        out_var = self._parse_variable()
        self._expect_keyword("IS")
        out_term = self._parse_term(out_var)
        weight = 1.0
        if self.current.kind == "keyword" and self.current.value == "WEIGHT":
            self._advance()
            weight = float(self._expect("number", "weight value").value)
        return Rule(rule_id, antecedent, out_var, out_term, weight)

    def _parse_or(self) -> Expr:
        operands = [self._parse_and()]
        while self.current.kind == "keyword" and self.current.value == "OR":
            self._advance()
            operands.append(self._parse_and())
        return operands[0] if len(operands) == 1 else Or(tuple(operands))

    def _parse_and(self) -> Expr:
        operands = [self._parse_primary()]
        while self.current.kind == "keyword" and self.current.value == "AND":
            self._advance()
            operands.append(self._parse_primary())
        return operands[0] if len(operands) == 1 else And(tuple(operands))

    def _parse_primary(self) -> Expr:
        if self.current.kind == "lparen":
            self._advance()
            expr = self._parse_or()
            self._expect("rparen", "')'")
            return expr
        variable = self._parse_variable()
        self._expect_keyword("IS")
        term = self._parse_term(variable)
        return Atom(variable, term)

    def _parse_variable(self) -> str:
        tok = self._expect("name", "variable name")
        if tok.value not in self.variables:
            raise UnknownNameError(f"unknown variable {tok.value!r}", tok.value, tok.line, tok.column)
        return tok.value

    def _parse_term(self, variable: str) -> str:
        tok = self._expect("name", "term name")
        if tok.value not in self.variables[variable].terms:
            raise UnknownNameError(
                f"variable {variable!r} has no term {tok.value!r}", tok.value, tok.line, tok.column
            )
        return tok.value


def parse_rules(text: str, variables: Mapping[str, LinguisticVariable]) -> RuleBase:
    """Parse DSL text into a RuleBase, resolving all names against `variables`."""
    rules = _Parser(_tokenize(text), variables).parse_rules()
    return RuleBase(tuple(rules))


def _format_expr(expr: Expr, parent: str = "") -> str:
    if isinstance(expr, Atom):
        return f"{expr.variable} IS {expr.term}"
    if isinstance(expr, And):
        body = " AND ".join(_format_expr(op, "AND") for op in expr.operands)
        return body
    body = " OR ".join(_format_expr(op, "OR") for op in expr.operands)
    # OR under AND needs parentheses; top level and OR-under-OR do not.
    return f"({body})" if parent == "AND" else body


def format_rule(rule: Rule) -> str:
    text = (
        f"RULE {rule.id}: IF {_format_expr(rule.antecedent)} "
        f"THEN {rule.consequent_variable} IS {rule.consequent_term}"
    )
    if rule.weight != 1.0:
        text += f" WEIGHT {rule.weight:g}"
    return text


def format_rules(rulebase: RuleBase) -> str:
    """Pretty-print a rule base; re-parsing yields a structurally equal base."""
    return "\n".join(format_rule(rule) for rule in rulebase) + "\n"
