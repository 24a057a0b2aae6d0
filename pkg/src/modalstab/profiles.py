"""Input-shape and output-weight profiles on [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DomainError

#: Rational endpoints with larger reduced denominators are rejected.
MAX_DENOMINATOR = 10**6


def as_rational(value) -> Fraction:
    """Exact rational from an int, Fraction or ``"num/den"`` / decimal string."""
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"not a rational: {value!r}")
        value = Fraction(value)
    try:
        r = Fraction(value) if not isinstance(value, str) else Fraction(value.strip())
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise DomainError(f"not a rational: {value!r}") from exc
    if r.denominator > MAX_DENOMINATOR:
        raise DomainError(f"denominator of {r} exceeds {MAX_DENOMINATOR}")
    return r


@dataclass(frozen=True)
class Indicator:
    """Characteristic function of ``[p, q]`` with exact rational endpoints."""

    p: Fraction
    q: Fraction

    def __post_init__(self):
        p, q = as_rational(self.p), as_rational(self.q)
        if not (0 <= p < q <= 1):
            raise DomainError(f"indicator needs 0 <= p < q <= 1, got [{p}, {q}]")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def __call__(self, xi):
        x = np.asarray(xi, dtype=float)
        return np.where((x >= float(self.p)) & (x <= float(self.q)), 1.0, 0.0)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (float(self.p), float(self.q))

    def describe(self) -> str:
        return f"indicator({self.p}, {self.q})"


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear interpolant through ``(nodes[i], values[i])``."""

    nodes: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        values = tuple(float(v) for v in self.values)
        if len(nodes) < 2 or len(nodes) != len(values):
            raise DomainError("tabulated profile needs >= 2 nodes and one value per node")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise DomainError("tabulated nodes must start at 0 and end at 1")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise DomainError("tabulated nodes must be strictly increasing")
        if not all(math.isfinite(v) for v in values):
            raise DomainError("tabulated values must be finite")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, func, n_nodes: int) -> "Tabulated":
        nodes = np.linspace(0.0, 1.0, n_nodes)
        return cls(tuple(nodes), tuple(np.asarray(func(nodes), dtype=float)))

    def __call__(self, xi):
        return np.interp(np.asarray(xi, dtype=float), self.nodes, self.values)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.nodes

    def describe(self) -> str:
        pairs = ", ".join(f"{x!r}:{v!r}" for x, v in zip(self.nodes, self.values))
        return f"tabulated({pairs})"


Profile = Union[Indicator, Tabulated]
