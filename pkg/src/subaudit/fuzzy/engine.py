"""Mamdani inference: min/max composition, min-clip, max-aggregate, centroid.

The engine is immutable after construction and inference is a pure function
of the crisp inputs, so a single engine can serve concurrent callers. Every
inference returns an ActivationTrace recording the firing strength of every
rule (zeros included), which is sufficient to reproduce the defuzzified
output via `aggregate_from_strengths`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .membership import LinguisticVariable, Universe
from .rules import RuleBase, UnboundInputError, evaluate_expr, expr_atoms


class InferenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class RuleActivation:
    """Firing record for one rule in one inference."""

    rule_id: str
    strength: float
    consequent_term: str
    contributed: bool  # True when the clipped consequent added area

    def as_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "strength": self.strength,
            "consequent": self.consequent_term,
            "contributed": self.contributed,
        }


@dataclass(frozen=True)
class ActivationTrace:
    """Full audit record of one inference: inputs and every rule's strength."""

    activations: tuple[RuleActivation, ...]
    inputs: Mapping[str, float]
    overridden: tuple[str, ...] = ()

    def strength(self, rule_id: str) -> float:
        for act in self.activations:
            if act.rule_id == rule_id:
                return act.strength
        raise KeyError(rule_id)

    def strengths(self) -> dict[str, float]:
        return {act.rule_id: act.strength for act in self.activations}

    def fired(self) -> tuple[RuleActivation, ...]:
        return tuple(act for act in self.activations if act.contributed)

    def as_dict(self) -> dict:
        return {
            "inputs": {k: float(v) for k, v in self.inputs.items()},
            "overridden": list(self.overridden),
            "activations": [act.as_dict() for act in self.activations],
        }


def defuzz_centroid(curve: np.ndarray, universe: Universe) -> float:
    """Center of mass of a membership curve sampled on the universe grid.

    A zero-area curve defuzzifies to 0 by convention (neutral output).
    """
    grid = universe.grid()
    if curve.shape != grid.shape:
        raise ValueError(f"curve has {curve.shape[0]} samples, universe grid has {grid.shape[0]}")
    area = float(np.trapezoid(curve, grid))
    if area <= 0.0:
        return 0.0
    return float(np.trapezoid(curve * grid, grid) / area)


class MamdaniEngine:
    """Inference engine over a fixed variable set and rule base."""

    def __init__(
        self,
        variables: Iterable[LinguisticVariable] | Mapping[str, LinguisticVariable],
        rulebase: RuleBase,
        output: str,
    ):
        if isinstance(variables, Mapping):
            self.variables: dict[str, LinguisticVariable] = dict(variables)
        else:
            self.variables = {var.name: var for var in variables}
        if output not in self.variables:
            raise ValueError(f"output variable {output!r} is not defined")
        self.output = output
        self.rulebase = rulebase
        rulebase.validate_names(self.variables)
        for rule in rulebase:
            if rule.consequent_variable != output:
                raise ValueError(
                    f"rule {rule.id} targets {rule.consequent_variable!r}, engine output is {output!r}"
                )
        self.output_universe = self.variables[output].universe
        self._grid = self.output_universe.grid()
        # Consequent membership curves are input-independent; sample them once.
        self._consequent_curves = {
            term: np.asarray(mf(self._grid), dtype=float)
            for term, mf in self.variables[output].terms.items()
        }
        self._input_names = sorted(
            {atom.variable for rule in rulebase for atom in expr_atoms(rule.antecedent)}
        )

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(self._input_names)

    def fuzzify(self, inputs: Mapping[str, float]) -> dict[str, dict[str, float]]:
        """Term degrees for every referenced input (values clipped to universes)."""
        degrees: dict[str, dict[str, float]] = {}
        for name in self._input_names:
            if name not in inputs:
                raise UnboundInputError(name)
            degrees[name] = self.variables[name].fuzzify(inputs[name])
        return degrees

    def rule_strengths(self, inputs: Mapping[str, float]) -> dict[str, float]:
        """Firing strength (weight applied) of every rule at the crisp inputs."""
        degrees = self.fuzzify(inputs)
        return {
            rule.id: rule.weight * evaluate_expr(rule.antecedent, degrees)
            for rule in self.rulebase
        }

    def aggregate_from_strengths(self, strengths: Mapping[str, float]) -> np.ndarray:
        """Max-aggregate the min-clipped consequents for given firing strengths.

        This is the replay path: feeding the strengths recorded in a trace
        reproduces that inference's aggregated output curve exactly.
        """
        aggregate = np.zeros_like(self._grid)
        for rule in self.rulebase:
            strength = strengths.get(rule.id, 0.0)
            if strength <= 0.0:
                continue
            clipped = np.minimum(self._consequent_curves[rule.consequent_term], strength)
            np.maximum(aggregate, clipped, out=aggregate)
        return aggregate

    def infer(
        self, inputs: Mapping[str, float], overridden: Iterable[str] = ()
    ) -> tuple[np.ndarray, ActivationTrace]:
        """Aggregated output curve plus the full activation trace."""
        strengths = self.rule_strengths(inputs)
        curve = self.aggregate_from_strengths(strengths)
        trace = ActivationTrace(
            activations=tuple(
                RuleActivation(
                    rule_id=rule.id,
                    strength=float(strengths[rule.id]),
                    consequent_term=rule.consequent_term,
                    contributed=strengths[rule.id] > 0.0,
                )
                for rule in self.rulebase
            ),
            inputs={name: float(inputs[name]) for name in self._input_names},
            overridden=tuple(overridden),
        )
        return curve, trace

    def evaluate(
        self, inputs: Mapping[str, float], overridden: Iterable[str] = ()
    ) -> tuple[float, ActivationTrace]:
        """Crisp output (centroid of the aggregate) plus the trace."""
        curve, trace = self.infer(inputs, overridden)
        return defuzz_centroid(curve, self.output_universe), trace

    def replay(self, trace: ActivationTrace) -> float:
        """Recompute the crisp output from a trace's recorded strengths."""
        curve = self.aggregate_from_strengths(trace.strengths())
        return defuzz_centroid(curve, self.output_universe)
