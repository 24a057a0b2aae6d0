"""Open- and closed-loop modal simulation, output series and decay fitting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import expm

from .coefficients import coefficients
from .errors import DomainError, EstimationError, SimulationDiverged
from .feedback import FeedbackLaw, closed_loop_matrix
from .profiles import Profile
from .quadrature import QuadratureSettings
from .spectral import (
    DEFAULT_ALPHA_CAP,
    SystemParams,
    check_alpha_cap,
    eigenfunction_eval,
    eigenvalues,
)

DIVERGENCE_GUARD = 1e12


@dataclass(frozen=True)
class ModalState:
    """Coordinates ``a_1..a_N`` of the state in the eigenfunction basis."""

    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        if a.size < 1:
            raise DomainError("modal state needs N >= 1")
        if not np.all(np.isfinite(a)):
            raise DomainError("modal state entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def N(self) -> int:
        return self.a.size

    @classmethod
    def unit(cls, n: int, N: int) -> "ModalState":
        if not 1 <= n <= N:
            raise DomainError(f"unit mode {n} outside truncation 1..{N}")
        a = np.zeros(N)
        a[n - 1] = 1.0
        return cls(a)

    @classmethod
    def zeros(cls, N: int) -> "ModalState":
        return cls(np.zeros(N))

    def truncated(self, N: int) -> "ModalState":
        a = np.zeros(N)
        m = min(N, self.N)
        a[:m] = self.a[:m]
        return ModalState(a)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    y: np.ndarray
    u: np.ndarray
    state_norm: np.ndarray
    states: np.ndarray | None = None  # shape (len(times), N)

    def __len__(self) -> int:
        return len(self.times)

    def head(self, m: int) -> "Trajectory":
        return Trajectory(
            self.times[:m], self.y[:m], self.u[:m], self.state_norm[:m],
            None if self.states is None else self.states[:m],
        )


def _grid(t_grid: Iterable[float]) -> np.ndarray:
    t = np.asarray(list(t_grid) if not isinstance(t_grid, np.ndarray) else t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1 or t[0] != 0.0:
        raise DomainError("time grid must be a 1-D sequence starting at 0")
    if np.any(np.diff(t) <= 0):
        raise DomainError("time grid must be strictly increasing")
    return t


def time_grid(t_final: float, dt: float) -> np.ndarray:
    if not (t_final > 0 and dt > 0):
        raise DomainError("t_final and dt must be positive")
    steps = int(round(t_final / dt))
    if steps < 1:
        raise DomainError("dt exceeds t_final")
    return np.arange(steps + 1) * (t_final / steps)


def _coeffs(profile_or_values, params: SystemParams, N: int, q=None) -> np.ndarray:
    if isinstance(profile_or_values, (np.ndarray, list, tuple)):
        v = np.asarray(profile_or_values, dtype=float)
        if v.size < N:
            raise DomainError(f"need {N} coefficients, got {v.size}")
        return v[:N]
    return coefficients(params, profile_or_values, N, q)


def project_initial(
    z0: Profile,
    params: SystemParams,
    N: int,
    q: QuadratureSettings | None = None,
) -> ModalState:
    """``a_n = <z0, phi_n>_H`` for ``n = 1..N``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    return ModalState(coefficients(params, z0, N, q))


def simulate_open_loop(state: ModalState, params: SystemParams, b, c, t_grid) -> Trajectory:
    """Exact diagonal propagation ``a_n(t) = exp(lambda_n t) a_n(0)``; ``u = 0``.

    ``b`` is accepted for signature symmetry with :func:`simulate_closed_loop`
    and is unused.  ``c`` may be a profile or precomputed coefficients.
    """
    t = _grid(t_grid)
    cn = _coeffs(c, params, state.N)
    lams = eigenvalues(params, state.N)
    with np.errstate(over="ignore"):
        states = np.exp(np.outer(t, lams)) * state.a
    return Trajectory(t, states @ cn, np.zeros_like(t), np.linalg.norm(states, axis=1), states)


def y2_series(state: ModalState, params: SystemParams, K: Iterable[int], c, t: float) -> float:
    """Output contribution of the modes in ``K`` (restricted to the truncation)."""
    cn = _coeffs(c, params, state.N)
    lams = eigenvalues(params, state.N)
    idx = np.array(sorted(n for n in K if 1 <= n <= state.N), dtype=int) - 1
    if idx.size == 0:
        return 0.0
    return float(np.sum(np.exp(lams[idx] * t) * state.a[idx] * cn[idx]))


def simulate_closed_loop(
    state: ModalState,
    params: SystemParams,
    b,
    c,
    law: FeedbackLaw,
    t_grid,
    N: int | None = None,
    guard: float = DIVERGENCE_GUARD,
) -> Trajectory:
    """Step ``a' = (diag(lambda) + b f^T) a`` with one matrix exponential per distinct step.

    Raises :class:`SimulationDiverged` with the samples up to the last one
    within ``guard`` once the state norm exceeds it.
    """
    t = _grid(t_grid)
    N = state.N if N is None else int(N)
    if law.support and max(law.support) > N:
        raise DomainError("truncation must cover the feedback support")
    x = state.truncated(N).a.copy()
    bn = _coeffs(b, params, N)
    cn = _coeffs(c, params, N)
    f = law.gain_vector(N)
    A = closed_loop_matrix(params, law, bn)

    states = np.empty((t.size, N))
    states[0] = x
    propagators: dict[float, np.ndarray] = {}
    for i in range(1, t.size):
        h = float(t[i] - t[i - 1])
        # spacings of a uniform grid differ only in the last bits
        key = float(f"{h:.12g}")
        P = propagators.get(key)
        if P is None:
            P = propagators[key] = expm(A * key)
        x = P @ x
        norm = float(np.linalg.norm(x))
        if not np.isfinite(norm) or norm > guard:
            partial = _trajectory(t[:i], states[:i], cn, f)
            raise SimulationDiverged(partial, guard)
        states[i] = x
    return _trajectory(t, states, cn, f)


def _trajectory(t, states, cn, f) -> Trajectory:
    return Trajectory(t, states @ cn, states @ f, np.linalg.norm(states, axis=1), states)


def reconstruct_field(
    state: ModalState,
    params: SystemParams,
    xi_grid,
    alpha_cap: float = DEFAULT_ALPHA_CAP,
) -> np.ndarray:
    """``z(xi) = sum_n a_n phi_n(xi)`` on ``xi_grid``."""
    check_alpha_cap(params, alpha_cap)
    xi = np.asarray(xi_grid, dtype=float)
    z = np.zeros_like(xi)
    for n, a in enumerate(state.a, start=1):
        if a != 0.0:
            z = z + a * eigenfunction_eval(params, n, xi)
    return z


def estimate_decay_rate(traj: Trajectory, floor: float = 1e-12, min_samples: int = 10) -> float:
    """Least-squares slope of ``log|y|`` on the last contiguous run with ``|y| > floor``."""
    y = np.abs(np.asarray(traj.y, dtype=float))
    above = y > floor
    if not np.any(above):
        raise EstimationError("no samples above the floor")
    end = int(np.nonzero(above)[0][-1])
    start = end
    while start > 0 and above[start - 1]:
        start -= 1
    if end - start + 1 < min_samples:
        raise EstimationError(
            f"only {end - start + 1} usable samples, need {min_samples}"
        )
    tt = np.asarray(traj.times[start:end + 1], dtype=float)
    slope, _ = np.polyfit(tt, np.log(y[start:end + 1]), 1)
    return float(slope)
