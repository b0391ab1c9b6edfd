"""Bundled substitution-priority fuzzy system and its validator.

The concrete system lives in two text assets so every number is auditable
and recalibratable without code changes:

* ``assets/variables.json`` -- linguistic variables with per-term origin
  notes (``anchor`` = fixed characteristic point, ``tuned`` = free default).
* ``assets/rules.fis`` -- the rule base in the textual DSL.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

import numpy as np

from .fuzzy import (
    LinguisticVariable,
    MamdaniEngine,
    RuleBase,
    Universe,
    expr_atoms,
    mf_from_params,
    parse_rules,
)

VARIABLES_ASSET = "variables.json"
RULES_ASSET = "rules.fis"

# Pinned composition contract. Only the architecture and the centroid are
# externally fixed; the rest are the conventional defaults, recorded here so
# every run's audit trail names them explicitly.
INFERENCE_CONTRACT = {
    "and": "min",
    "or": "max",
    "implication": "min-clip",
    "aggregation": "max",
    "defuzzification": "centroid",
    "empty_aggregate_output": 0.0,
}


def _asset_text(name: str) -> str:
    return (resources.files("subaudit") / "assets" / name).read_text(encoding="utf-8")


@dataclass(frozen=True)
class SystemConfig:
    """A validated variable set plus rule base, ready to build an engine."""

    variables: Mapping[str, LinguisticVariable]
    rules: RuleBase
    output: str
    origins: Mapping[str, str]  # "Variable.Term" -> "anchor" | "tuned"
    coverage_exempt: frozenset[str]  # pseudo-binary switches with deliberate gaps
    _engine: list = field(default_factory=list, repr=False, compare=False)

    def engine(self) -> MamdaniEngine:
        if not self._engine:
            self._engine.append(MamdaniEngine(self.variables, self.rules, self.output))
        return self._engine[0]

    def input_universe(self, name: str) -> Universe:
        return self.variables[name].universe


def load_variables(
    text: str, output_resolution: int = 2001
) -> tuple[dict[str, LinguisticVariable], str, dict[str, str], frozenset[str]]:
    """Parse a variables document into LinguisticVariables plus metadata."""
    doc = json.loads(text)
    output = doc["output"]
    variables: dict[str, LinguisticVariable] = {}
    origins: dict[str, str] = {}
    exempt: set[str] = set()
    for entry in doc["variables"]:
        name = entry["name"]
        lo, hi = entry["universe"]
        resolution = output_resolution if name == output else 2001
        terms = {}
        for term in entry["terms"]:
            terms[term["name"]] = mf_from_params(term["shape"], term["params"])
            origins[f"{name}.{term['name']}"] = term.get("origin", "tuned")
        variables[name] = LinguisticVariable(name, Universe(lo, hi, resolution), terms)
        if entry.get("coverage") == "switch":
            exempt.add(name)
    return variables, output, origins, frozenset(exempt)


def build_bundled_system(output_resolution: int = 2001) -> SystemConfig:
    """Load the bundled variables and rules into a validated SystemConfig."""
    variables, output, origins, exempt = load_variables(
        _asset_text(VARIABLES_ASSET), output_resolution
    )
    rules = parse_rules(_asset_text(RULES_ASSET), variables)
    config = SystemConfig(
        variables=variables,
        rules=rules,
        output=output,
        origins=origins,
        coverage_exempt=exempt,
    )
    violations = validate_system(config)
    if violations:
        raise ValueError("bundled system failed validation: " + "; ".join(violations))
    return config


def validate_system(config: SystemConfig) -> list[str]:
    """Structural checks; returns a list of violations (empty means valid).

    Checks: membership parameters are ordered (enforced at construction but
    re-verified), every rule resolves, every non-switch input universe is
    fully covered by at least one term, and the output terms jointly cover
    the whole output universe.
    """
    violations: list[str] = []

    for var in config.variables.values():
        for term, mf in var.terms.items():
            params = mf.params
            if any(a > b for a, b in zip(params, params[1:])):
                violations.append(f"{var.name}.{term}: parameters out of order {params}")

    known = config.variables
    for rule in config.rules:
        for atom in expr_atoms(rule.antecedent):
            if atom.variable not in known:
                violations.append(f"rule {rule.id}: unknown variable {atom.variable!r}")
            elif atom.term not in known[atom.variable].terms:
                violations.append(f"rule {rule.id}: dangling term {atom.variable}.{atom.term}")
        if rule.consequent_variable not in known:
            violations.append(f"rule {rule.id}: unknown output {rule.consequent_variable!r}")
        elif rule.consequent_term not in known[rule.consequent_variable].terms:
            violations.append(
                f"rule {rule.id}: dangling term {rule.consequent_variable}.{rule.consequent_term}"
            )

    for var in config.variables.values():
        if var.name in config.coverage_exempt:
            continue
        grid = var.universe.grid()
        peak = np.zeros_like(grid)
        for mf in var.terms.values():
            np.maximum(peak, np.asarray(mf(grid), dtype=float), out=peak)
        if not np.all(peak > 0.0):
            gap = grid[peak <= 0.0]
            violations.append(
                f"{var.name}: universe not covered near {gap[0]:.4g}"
                + (f"..{gap[-1]:.4g}" if gap.size > 1 else "")
            )

    return violations
