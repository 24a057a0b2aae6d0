"""Closed-form eigen-structure of the drifted Dirichlet operator on [0, 1].

The operator ``h'' - alpha h' + k h`` with ``h(0) = h(1) = 0`` is self-adjoint
in the weighted inner product ``<f, g> = int_0^1 exp(-alpha xi) f g dxi``; its
eigenpairs are

    lambda_n = -alpha^2 / 4 - n^2 pi^2 + k,
    phi_n(xi) = sqrt(2) exp(alpha xi / 2) sin(n pi xi),   n = 1, 2, ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DomainError
from .quadrature import QuadratureSettings, integrate

SQRT2 = math.sqrt(2.0)
PI2 = math.pi * math.pi

#: Largest drift accepted by field reconstruction; exp(alpha xi / 2) overflows
#: the useful range of doubles well past this.
DEFAULT_ALPHA_CAP = 50.0


@dataclass(frozen=True)
class SystemParams:
    """Drift ``alpha >= 0`` (1/length) and reaction rate ``k`` (1/time)."""

    alpha: float
    k: float

    def __post_init__(self):
        alpha, k = float(self.alpha), float(self.k)
        if not (math.isfinite(alpha) and math.isfinite(k)):
            raise DomainError("alpha and k must be finite")
        if alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "k", k)

    def with_k(self, k: float) -> "SystemParams":
        return SystemParams(self.alpha, k)


def _check_index(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"mode index must be a positive integer, got {n!r}")
    return int(n)


def eigenvalue(params: SystemParams, n: int) -> float:
    n = _check_index(n)
    return -params.alpha**2 / 4.0 - n * n * PI2 + params.k


def eigenvalues(params: SystemParams, N: int) -> np.ndarray:
    """``lambda_1 .. lambda_N`` as an array."""
    n = np.arange(1, N + 1, dtype=float)
    return -params.alpha**2 / 4.0 - n * n * PI2 + params.k


def n_max_unstable(params: SystemParams) -> int:
    """Largest ``n`` with ``lambda_n >= 0`` (zero counts as unstable), else 0."""
    margin = params.k - params.alpha**2 / 4.0
    if margin < PI2:
        # lambda_1 may still be exactly zero through rounding of the formula
        return 1 if eigenvalue(params, 1) >= 0 else 0
    n = int(math.floor(math.sqrt(margin) / math.pi))
    # floor(sqrt) can land one off either way in floating point
    while n >= 1 and eigenvalue(params, n) < 0:
        n -= 1
    while eigenvalue(params, n + 1) >= 0:
        n += 1
    return n


def reduce_mod2(x):
    """Reduce ``x`` into ``[-1, 1)`` modulo 2, exactly for Fractions."""
    if isinstance(x, (Fraction, int)):
        num, den = x.numerator, x.denominator
        m = num % (2 * den)
        if m >= den:
            m -= 2 * den
        return m / den
    x = np.asarray(x, dtype=float)
    return np.remainder(x + 1.0, 2.0) - 1.0


def _sinpi_scalar(r: float) -> float:
    ar = abs(r)
    if ar > 0.5:
        return math.copysign(math.sin(math.pi * (1.0 - ar)), r)
    return math.sin(math.pi * r)


def sinpi(x):
    """``sin(pi x)`` with argument reduction; exact zeros at integers."""
    if isinstance(x, (Fraction, int, float)):
        if isinstance(x, float):
            return _sinpi_scalar(math.fmod(math.fmod(x + 1.0, 2.0) + 2.0, 2.0) - 1.0)
        return _sinpi_scalar(reduce_mod2(x))
    r = np.asarray(reduce_mod2(x), dtype=float)
    ar = np.abs(r)
    # reflect |r| > 1/2 onto [0, 1/2] so integers map to sin(0)
    out = np.where(ar > 0.5, np.sign(r) * np.sin(math.pi * (1.0 - ar)), np.sin(math.pi * r))
    return out if out.ndim else float(out)


def cospi(x):
    """``cos(pi x)`` computed as ``sin(pi (1/2 - x))`` after reduction."""
    if isinstance(x, (Fraction, int)):
        return sinpi(Fraction(1, 2) - Fraction(x))
    return sinpi(0.5 - np.asarray(reduce_mod2(x), dtype=float))


def eigenfunction_eval(params: SystemParams, n: int, xi):
    """``phi_n(xi)``; ``xi`` may be a scalar or array inside [0, 1]."""
    n = _check_index(n)
    x = np.asarray(xi, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)) or np.any(np.isnan(x)):
        raise DomainError("xi must lie in [0, 1]")
    out = SQRT2 * np.exp(params.alpha * x / 2.0) * sinpi(n * x)
    return out if np.ndim(out) else float(out)


def eigenfunction(params: SystemParams, n: int) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised callable for ``phi_n``."""
    n = _check_index(n)
    return lambda x: eigenfunction_eval(params, n, x)


def weighted_inner_product(
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    params: SystemParams,
    q: QuadratureSettings | None = None,
) -> float:
    """``int_0^1 exp(-alpha xi) f(xi) g(xi) dxi`` by adaptive quadrature."""
    alpha = params.alpha

    def integrand(x):
        # weight applied last so that f, g commute bitwise
        return np.exp(-alpha * x) * (np.asarray(f(x), dtype=float) * np.asarray(g(x), dtype=float))

    return integrate(integrand, 0.0, 1.0, q).value


def check_alpha_cap(params: SystemParams, cap: float = DEFAULT_ALPHA_CAP) -> None:
    if params.alpha > cap:
        raise ConfigurationError(
            f"alpha={params.alpha!r} exceeds the reconstruction cap {cap!r}"
        )
