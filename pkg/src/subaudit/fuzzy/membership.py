"""Universes of discourse, membership functions, and linguistic variables.

Membership functions are plain piecewise-linear shapes (triangles and
trapezoids) evaluating into [0, 1]. They accept scalars or numpy arrays so
the same objects serve both crisp fuzzification and sampling onto a
discretized output grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class Universe:
    """Closed numeric interval a linguistic variable is defined over."""

    lo: float
    hi: float
    resolution: int = 2001

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"universe requires lo < hi, got [{self.lo}, {self.hi}]")
        if self.resolution < 3:
            raise ValueError(f"universe resolution must be >= 3, got {self.resolution}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.resolution)

    def clip(self, x: float) -> float:
        return float(min(max(x, self.lo), self.hi))

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def _rising(x: ArrayLike, a: float, b: float) -> np.ndarray:
    """Edge going 0 -> 1 over [a, b]; a == b degenerates to a step at a."""
    x = np.asarray(x, dtype=float)
    if a == b:
        return (x >= a).astype(float)
    return np.clip((x - a) / (b - a), 0.0, 1.0)


def _falling(x: ArrayLike, c: float, d: float) -> np.ndarray:
    """Edge going 1 -> 0 over [c, d]; c == d degenerates to a step at d."""
    x = np.asarray(x, dtype=float)
    if c == d:
        return (x <= d).astype(float)
    return np.clip((d - x) / (d - c), 0.0, 1.0)


def _as_result(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values) if scalar else values


@dataclass(frozen=True)
class Triangle:
    """Triangular membership function with vertices (a, 0), (b, 1), (c, 0)."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if not (self.a <= self.b <= self.c):
            raise ValueError(f"triangle parameters must be non-decreasing: {(self.a, self.b, self.c)}")

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.c)

    @property
    def params(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        scalar = np.isscalar(x)
        xs = np.asarray(x, dtype=float)
        up = _rising(xs, self.a, self.b)
        down = _falling(xs, self.b, self.c)
        inside = (xs >= self.a) & (xs <= self.c)
        return _as_result(np.where(inside, np.minimum(up, down), 0.0), scalar)


@dataclass(frozen=True)
class Trapezoid:
    """Trapezoidal membership function with plateau [b, c] at degree 1."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if not (self.a <= self.b <= self.c <= self.d):
            raise ValueError(
                f"trapezoid parameters must be non-decreasing: {(self.a, self.b, self.c, self.d)}"
            )

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.d)

    @property
    def params(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        scalar = np.isscalar(x)
        xs = np.asarray(x, dtype=float)
        up = _rising(xs, self.a, self.b)
        down = _falling(xs, self.c, self.d)
        inside = (xs >= self.a) & (xs <= self.d)
        return _as_result(np.where(inside, np.minimum(up, down), 0.0), scalar)


MembershipFunction = Union[Triangle, Trapezoid]

_SHAPES = {"triangle": (Triangle, 3), "trapezoid": (Trapezoid, 4)}


def mf_from_params(shape: str, params: list[float] | tuple[float, ...]) -> MembershipFunction:
    """Build a membership function from a shape name and its parameter list."""
    key = shape.lower()
    if key not in _SHAPES:
        raise ValueError(f"unknown membership shape {shape!r} (expected triangle or trapezoid)")
    cls, arity = _SHAPES[key]
    if len(params) != arity:
        raise ValueError(f"{key} takes {arity} parameters, got {len(params)}")
    return cls(*[float(p) for p in params])


class LinguisticVariable:
    """Named variable partitioned into linguistic terms over one universe."""

    def __init__(self, name: str, universe: Universe, terms: Mapping[str, MembershipFunction]):
        if not terms:
            raise ValueError(f"variable {name!r} needs at least one term")
        for term, mf in terms.items():
            lo, hi = mf.support
            if lo < universe.lo or hi > universe.hi:
                raise ValueError(
                    f"term {name}.{term} support [{lo}, {hi}] exceeds universe "
                    f"[{universe.lo}, {universe.hi}]"
                )
        self.name = name
        self.universe = universe
        self.terms: Mapping[str, MembershipFunction] = MappingProxyType(dict(terms))

    def fuzzify(self, x: float) -> dict[str, float]:
        """Degrees of every term at a crisp value, clipped into the universe."""
        cx = self.universe.clip(float(x))
        return {term: float(mf(cx)) for term, mf in self.terms.items()}

    def __repr__(self) -> str:
        return (
            f"LinguisticVariable({self.name!r}, [{self.universe.lo}, {self.universe.hi}], "
            f"terms={list(self.terms)})"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinguisticVariable):
            return NotImplemented
        return (
            self.name == other.name
            and self.universe == other.universe
            and dict(self.terms) == dict(other.terms)
        )
