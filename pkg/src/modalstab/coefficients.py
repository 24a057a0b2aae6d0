"""Fourier coefficients ``<profile, phi_n>_H`` and their zero classification.

Sign convention: coefficients are defined by direct integration against
``phi_n``.  For ``alpha = 0`` and ``[1/4, 3/4]`` this gives ``b_1 = +2/pi``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError, UnsupportedConfigurationError
from .profiles import Indicator, Profile
from .quadrature import QuadratureSettings
from .spectral import (
    SQRT2,
    SystemParams,
    _check_index,
    cospi,
    eigenfunction,
    sinpi,
    weighted_inner_product,
)


def coeff_indicator(params: SystemParams, interval: Indicator, n: int) -> float:
    """Closed form of ``sqrt(2) int_p^q exp(-alpha xi/2) sin(n pi xi) dxi``."""
    n = _check_index(n)
    p, q = interval.p, interval.q
    if params.alpha == 0.0:
        half_sum = n * (p + q) / 2
        half_diff = n * (q - p) / 2
        # + 0.0 folds a signed zero into 0.0
        return 2.0 * SQRT2 / (n * math.pi) * sinpi(half_sum) * sinpi(half_diff) + 0.0
    a = params.alpha
    npi = n * math.pi
    denom = a * a / 4.0 + npi * npi

    def antiderivative(x: Fraction) -> float:
        nx = n * x
        return -math.exp(-a * float(x) / 2.0) * (a / 2.0 * sinpi(nx) + npi * cospi(nx)) / denom

    return SQRT2 * (antiderivative(q) - antiderivative(p))


def coeff_quadrature(
    params: SystemParams,
    profile: Profile,
    n: int,
    q: QuadratureSettings | None = None,
) -> float:
    """``<profile, phi_n>_H`` by adaptive quadrature split at the profile's breakpoints."""
    settings = (q or QuadratureSettings()).with_breakpoints(profile.breakpoints)
    return weighted_inner_product(profile, eigenfunction(params, n), params, settings)


def coefficient(
    params: SystemParams,
    profile: Profile,
    n: int,
    q: QuadratureSettings | None = None,
) -> float:
    """Closed form for indicators, quadrature otherwise."""
    if isinstance(profile, Indicator):
        return coeff_indicator(params, profile, n)
    return coeff_quadrature(params, profile, n, q)


def coefficients(
    params: SystemParams,
    profile: Profile,
    N: int,
    q: QuadratureSettings | None = None,
) -> np.ndarray:
    return np.array([coefficient(params, profile, n, q) for n in range(1, N + 1)])


class ZeroKind(enum.Enum):
    EXACT_ZERO = "exact_zero"
    EXACT_NONZERO = "exact_nonzero"
    NUMERIC_ZERO = "numeric_zero"
    NUMERIC_NONZERO = "numeric_nonzero"


@dataclass(frozen=True)
class ZeroCertainty:
    """Zero/nonzero verdict on one coefficient and how it was reached.

    ``magnitude`` and ``threshold`` are only meaningful for numeric kinds.
    """

    kind: ZeroKind
    magnitude: float | None = None
    threshold: float | None = None
    borderline_factor: float = 10.0

    def __post_init__(self):
        if self.kind is ZeroKind.NUMERIC_ZERO and not self.magnitude <= self.threshold:
            raise DomainError("NumericZero requires magnitude <= threshold")
        if self.kind is ZeroKind.NUMERIC_NONZERO and not self.magnitude > self.threshold:
            raise DomainError("NumericNonZero requires magnitude > threshold")

    @property
    def is_zero(self) -> bool:
        return self.kind in (ZeroKind.EXACT_ZERO, ZeroKind.NUMERIC_ZERO)

    @property
    def is_exact(self) -> bool:
        return self.kind in (ZeroKind.EXACT_ZERO, ZeroKind.EXACT_NONZERO)

    @property
    def borderline(self) -> bool:
        """Classified nonzero but within ``borderline_factor`` of the threshold."""
        return (
            self.kind is ZeroKind.NUMERIC_NONZERO
            and self.magnitude <= self.borderline_factor * self.threshold
        )

    @classmethod
    def exact(cls, zero: bool) -> "ZeroCertainty":
        return cls(ZeroKind.EXACT_ZERO if zero else ZeroKind.EXACT_NONZERO)

    @classmethod
    def numeric(cls, magnitude: float, threshold: float, borderline_factor: float = 10.0):
        kind = ZeroKind.NUMERIC_ZERO if magnitude <= threshold else ZeroKind.NUMERIC_NONZERO
        return cls(kind, float(magnitude), float(threshold), borderline_factor)


@dataclass(frozen=True)
class ThresholdPolicy:
    """Relative zero threshold ``rel * max_{m <= window} |coef_m|``."""

    rel: float = 1e-9
    window: int = 64
    borderline_factor: float = 10.0

    def __post_init__(self):
        if not self.rel > 0 or self.window < 1 or self.borderline_factor < 1:
            raise DomainError("invalid threshold policy")


def has_exact_zeros(params: SystemParams, profile: Profile) -> bool:
    """True when zero detection is pure rational arithmetic."""
    return params.alpha == 0.0 and isinstance(profile, Indicator)


def exact_indicator_zero(interval: Indicator, n: int) -> bool:
    """``sin(n pi (p+q)/2) sin(n pi (q-p)/2) == 0`` decided with integers."""
    return (
        (n * (interval.p + interval.q) / 2).denominator == 1
        or (n * (interval.q - interval.p) / 2).denominator == 1
    )


def coefficient_scale(
    params: SystemParams,
    profile: Profile,
    window: int,
    q: QuadratureSettings | None = None,
    values: Sequence[float] | None = None,
) -> float:
    if values is None:
        values = coefficients(params, profile, window, q)
    return float(np.max(np.abs(values))) if len(values) else 0.0


def classify_zero(
    params: SystemParams,
    profile: Profile,
    n: int,
    policy: ThresholdPolicy | None = None,
    *,
    value: float | None = None,
    scale: float | None = None,
    q: QuadratureSettings | None = None,
) -> ZeroCertainty:
    """Zero classification of ``<profile, phi_n>_H``.

    Exact for ``alpha == 0`` indicators; otherwise ``|coef_n|`` is compared
    against ``policy.rel`` times the largest magnitude in the policy window.
    ``value`` and ``scale`` may be passed to reuse already computed numbers.
    """
    n = _check_index(n)
    if has_exact_zeros(params, profile):
        return ZeroCertainty.exact(exact_indicator_zero(profile, n))
    policy = policy or ThresholdPolicy()
    if value is None:
        value = coefficient(params, profile, n, q)
    if scale is None:
        scale = coefficient_scale(params, profile, max(policy.window, n), q)
    return ZeroCertainty.numeric(abs(value), policy.rel * scale, policy.borderline_factor)


@dataclass(frozen=True)
class PeriodicSet:
    """All positive integers ``n`` with ``n mod period`` in ``residues``."""

    period: int
    residues: frozenset[int]

    def __contains__(self, n: int) -> bool:
        return n % self.period in self.residues

    def members(self, upto: int) -> list[int]:
        return [n for n in range(1, upto + 1) if n in self]

    def least(self) -> int | None:
        reps = [r if r else self.period for r in self.residues]
        return min(reps) if reps else None


def least_period(indicator: Sequence[bool]) -> int:
    """Smallest divisor ``d`` of ``len(indicator)`` under which the cyclic pattern repeats."""
    L = len(indicator)
    for d in range(1, L + 1):
        if L % d == 0 and all(indicator[i] == indicator[i % d] for i in range(L)):
            return d
    return L


def periodic_from_pattern(pattern: Sequence[bool]) -> PeriodicSet:
    """Reduce a pattern over residues ``0..L-1`` to its least period."""
    P = least_period(pattern)
    return PeriodicSet(P, frozenset(r for r in range(P) if pattern[r]))


def zero_pattern(interval: Indicator, alpha: float = 0.0) -> PeriodicSet:
    """Residue description of ``{n : <chi_[p,q], phi_n> = 0}`` for ``alpha = 0``."""
    if alpha != 0.0:
        raise UnsupportedConfigurationError(
            "zero pattern is periodic only for alpha = 0"
        )
    d1 = ((interval.p + interval.q) / 2).denominator
    d2 = ((interval.q - interval.p) / 2).denominator
    L = math.lcm(d1, d2)
    # residue 0 stands for n = L
    return periodic_from_pattern([exact_indicator_zero(interval, r or L) for r in range(L)])


def zero_pattern_period(interval: Indicator, alpha: float = 0.0) -> int:
    """Least ``P`` with ``zero(n) <=> zero(n + P)`` for every ``n >= 1``."""
    return zero_pattern(interval, alpha).period
