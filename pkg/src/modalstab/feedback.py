"""Finite-support modal feedback ``u = sum_{n in S} f_n a_n``.

With ``S`` listed first, the truncated closed-loop matrix
``diag(lambda) + b f^T`` is block lower-triangular::

    [ Lambda_S + b_S f_S^T      0      ]
    [ b_R f_S^T             Lambda_R   ]

so its spectrum is the placed poles plus the untouched open-loop eigenvalues,
and rows with ``b_n = 0`` keep only their diagonal entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, NotStateStabilizableError, NumericError
from .modes import ModeRecord
from .spectral import SystemParams, eigenvalues


@dataclass(frozen=True)
class FeedbackLaw:
    gains: Mapping[int, float] = field(default_factory=dict)
    targets: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if set(self.gains) != set(self.targets):
            raise DomainError("gains and targets must share one support")
        if any(not t < 0 for t in self.targets.values()):
            raise DomainError("placed poles must be strictly negative")
        object.__setattr__(self, "gains", {int(n): float(f) for n, f in sorted(self.gains.items())})
        object.__setattr__(self, "targets", {int(n): float(t) for n, t in sorted(self.targets.items())})

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.gains)

    @property
    def empty(self) -> bool:
        return not self.gains

    def gain_vector(self, N: int) -> np.ndarray:
        f = np.zeros(N)
        for n, g in self.gains.items():
            if n > N:
                raise DomainError(f"truncation {N} does not cover supported mode {n}")
            f[n - 1] = g
        return f


def default_targets(lams: Sequence[float]) -> list[float]:
    """``mu_n = -max(1, |lambda_n| + 1)``."""
    return [-max(1.0, abs(lam) + 1.0) for lam in lams]


def rank_one_gains(lams: Sequence[float], b: Sequence[float], targets: Sequence[float]) -> np.ndarray:
    """Gains placing the spectrum of ``diag(lams) + b f^T`` at ``targets``.

    Partial-fraction residues of the closed-loop characteristic polynomial::

        f_n = -prod_j (lambda_n - mu_j) / (b_n prod_{m != n} (lambda_n - lambda_m))
    """
    lams = np.asarray(lams, dtype=float)
    b = np.asarray(b, dtype=float)
    mu = np.asarray(targets, dtype=float)
    if not (lams.shape == b.shape == mu.shape):
        raise DomainError("need one target and one input coefficient per mode")
    if len(set(lams.tolist())) != lams.size:
        raise DomainError("open-loop eigenvalues must be pairwise distinct")
    if np.any(b == 0):
        raise DomainError("every supported mode needs b_n != 0")
    f = np.empty_like(lams)
    for i, lam in enumerate(lams):
        others = np.delete(lams, i)
        f[i] = -np.prod(lam - mu) / (b[i] * np.prod(lam - others))
    return f


def synthesize(
    params: SystemParams,
    records: Sequence[ModeRecord],
    targets: Sequence[float] | None = None,
    best_effort: bool = False,
) -> FeedbackLaw:
    """Place every unstable controllable mode.

    Raises :class:`NotStateStabilizableError` when an unstable mode has
    ``b_n = 0``, unless ``best_effort`` is set, in which case the law covers
    the reachable unstable modes only.
    """
    unstable = [r for r in records if r.lam >= 0]
    for r in unstable:
        if r.b_zero.is_zero and not best_effort:
            raise NotStateStabilizableError(r)
    support = [r for r in unstable if not r.b_zero.is_zero]
    if not support:
        return FeedbackLaw()
    lams = [r.lam for r in support]
    mu = default_targets(lams) if targets is None else [float(t) for t in targets]
    if len(mu) != len(support):
        raise DomainError(
            f"{len(mu)} targets given for {len(support)} unstable controllable modes"
        )
    gains = rank_one_gains(lams, [r.b for r in support], mu)
    return FeedbackLaw(
        gains={r.n: g for r, g in zip(support, gains)},
        targets={r.n: m for r, m in zip(support, mu)},
    )


def closed_loop_matrix(params: SystemParams, law: FeedbackLaw, b: Sequence[float]) -> np.ndarray:
    """``diag(lambda_1..lambda_N) + b f^T`` for ``N = len(b)``."""
    b = np.asarray(b, dtype=float)
    N = b.size
    return np.diag(eigenvalues(params, N)) + np.outer(b, law.gain_vector(N))


@dataclass(frozen=True)
class SpectrumReport:
    placed: tuple[float, ...]
    untouched: tuple[float, ...]
    max_real_part: float
    residual: float


def rank_one_eigvals(lams: Sequence[float], b: Sequence[float], f: Sequence[float]) -> np.ndarray:
    """Eigenvalues of ``diag(lams) + b f^T`` using its rank-one structure.

    Indices with ``b_i f_i = 0`` contribute ``lams[i]`` exactly.  The others
    are the roots of the secular function

        g(s) = 1 - sum_i b_i f_i / (s - lams[i]),

    seeded by a dense solve of the active block and polished with Newton
    steps.  The polish matters once the gains are large: a dense solver's
    backward error ``eps * |b f^T|`` is amplified by the eigenvector
    condition number, while ``g`` is evaluated to relative accuracy.
    """
    lams = np.asarray(lams, dtype=float)
    w = np.asarray(b, dtype=float) * np.asarray(f, dtype=float)
    active = w != 0.0
    fixed = lams[~active].astype(complex)
    la, wa = lams[active], w[active]
    if la.size == 0:
        return fixed
    try:
        seeds = np.linalg.eigvals(np.diag(la) + np.outer(np.asarray(b, dtype=float)[active],
                                                          np.asarray(f, dtype=float)[active]))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue solver failed: {exc}") from exc

    def g(s):
        return 1.0 - np.sum(wa / (s - la))

    roots = []
    for s in seeds.astype(complex):
        gs = g(s)
        for _ in range(20):
            d = s - la
            if np.any(d == 0):
                break
            slope = np.sum(wa / d**2)
            if slope == 0:
                break
            # g' = sum w / (s - l)^2, so the Newton step is -g / g'
            cand = s - gs / slope
            gc = g(cand)
            if not abs(gc) < abs(gs):
                break
            s, gs = cand, gc
        if abs(s.imag) <= 1e-14 * max(1.0, abs(s.real)):
            s = complex(s.real, 0.0)
        roots.append(s)
    return np.concatenate([np.array(roots), fixed])


def closed_loop_spectrum(
    params: SystemParams,
    law: FeedbackLaw,
    b: Sequence[float],
    c: Sequence[float] | None = None,
) -> SpectrumReport:
    """Spectrum of the truncated closed loop, split into placed and untouched.

    Computed by :func:`rank_one_eigvals`.

    ``residual`` is the largest distance between the computed spectrum and
    ``targets | {lambda_m : m not in S}``.  ``max_real_part`` runs over the
    placed poles and the untouched modes that the output sees (all untouched
    modes when ``c`` is omitted).
    """
    b = np.asarray(b, dtype=float)
    N = b.size
    if law.support and max(law.support) > N:
        raise DomainError("truncation must cover the feedback support")
    lams = eigenvalues(params, N)
    ev = rank_one_eigvals(lams, b, law.gain_vector(N))
    untouched_idx = [m for m in range(1, N + 1) if m not in law.gains]
    expected = np.sort(np.concatenate([list(law.targets.values()), lams[np.array(untouched_idx, dtype=int) - 1]]))

    remaining = list(ev)
    placed = []
    for mu in law.targets.values():
        j = int(np.argmin([abs(z - mu) for z in remaining]))
        placed.append(remaining.pop(j))
    untouched = sorted(remaining, key=lambda z: -z.real)

    got = np.sort(ev.real)
    residual = float(max(np.max(np.abs(got - expected)), np.max(np.abs(ev.imag))))

    visible = [z.real for z in placed]
    for m in untouched_idx:
        if c is None or np.asarray(c, dtype=float)[m - 1] != 0.0:
            visible.append(lams[m - 1])
    return SpectrumReport(
        placed=tuple(float(z.real) for z in placed),
        untouched=tuple(float(z.real) for z in untouched),
        max_real_part=float(max(visible)) if visible else -np.inf,
        residual=residual,
    )
