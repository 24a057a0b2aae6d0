"""Mode classification, index sets and the three verdicts.

For every mode ``n`` the coefficients ``b_n`` and ``c_n`` decide membership in

* ``I`` (controllable, ``b_n != 0``) and ``U`` (uncontrollable, ``b_n == 0``),
* ``O`` (observable, ``c_n != 0``),
* ``K = U & O``, the modes the output sees but the input cannot reach.

The output is stabilizable iff ``lambda_n < 0`` on ``K``; the state is
stabilizable iff ``lambda_n < 0`` on ``U``.  Since ``lambda_n < 0`` for every
``n > n_max_unstable``, both checks only ever consult finitely many modes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .coefficients import (
    PeriodicSet,
    ThresholdPolicy,
    ZeroCertainty,
    classify_zero,
    coefficients,
    has_exact_zeros,
    periodic_from_pattern,
    zero_pattern,
)
from .errors import DomainError
from .profiles import Profile
from .quadrature import QuadratureSettings
from .spectral import PI2, SystemParams, eigenvalue, n_max_unstable


@dataclass(frozen=True)
class ModeRecord:
    n: int
    lam: float
    b: float
    c: float
    b_zero: ZeroCertainty
    c_zero: ZeroCertainty

    @property
    def exact(self) -> bool:
        return self.b_zero.is_exact and self.c_zero.is_exact

    @property
    def in_K(self) -> bool:
        return self.b_zero.is_zero and not self.c_zero.is_zero


def default_window(params: SystemParams) -> int:
    return max(64, 2 * n_max_unstable(params))


def classify_modes(
    params: SystemParams,
    b: Profile,
    c: Profile,
    N: int,
    policy: ThresholdPolicy | None = None,
    q: QuadratureSettings | None = None,
) -> list[ModeRecord]:
    """Mode records for ``n = 1..N``, ordered by ``n``."""
    if N < 1:
        raise DomainError("window must be >= 1")
    policy = policy or ThresholdPolicy()
    # threshold scale is taken over at least the policy window so that small
    # analysis windows classify exactly like large ones
    M = max(N, policy.window)
    bv = coefficients(params, b, M, q)
    cv = coefficients(params, c, M, q)
    b_scale, c_scale = float(max(abs(bv))), float(max(abs(cv)))
    return [
        ModeRecord(
            n=n,
            lam=eigenvalue(params, n),
            b=float(bv[n - 1]),
            c=float(cv[n - 1]),
            b_zero=classify_zero(params, b, n, policy, value=bv[n - 1], scale=b_scale),
            c_zero=classify_zero(params, c, n, policy, value=cv[n - 1], scale=c_scale),
        )
        for n in range(1, N + 1)
    ]


def classify_mode(
    params: SystemParams,
    b: Profile,
    c: Profile,
    n: int,
    policy: ThresholdPolicy | None = None,
    q: QuadratureSettings | None = None,
) -> ModeRecord:
    """Single record, with thresholds scaled as in :func:`classify_modes`."""
    policy = policy or ThresholdPolicy()
    M = max(n, policy.window)
    bv = coefficients(params, b, M, q)
    cv = coefficients(params, c, M, q)
    return ModeRecord(
        n=n,
        lam=eigenvalue(params, n),
        b=float(bv[n - 1]),
        c=float(cv[n - 1]),
        b_zero=classify_zero(params, b, n, policy, value=bv[n - 1], scale=float(max(abs(bv)))),
        c_zero=classify_zero(params, c, n, policy, value=cv[n - 1], scale=float(max(abs(cv)))),
    )


@dataclass(frozen=True)
class IndexSetSummary:
    window: int
    I: frozenset[int]
    U: frozenset[int]
    O: frozenset[int]
    K: frozenset[int]
    periodic_K: PeriodicSet | None
    records: tuple[ModeRecord, ...]
    b_zeros: PeriodicSet | None = None
    # records outside the window that a verdict needs as its witness
    extra_records: Mapping[int, ModeRecord] = field(default_factory=dict)

    def record(self, n: int) -> ModeRecord:
        if 1 <= n <= self.window:
            return self.records[n - 1]
        try:
            return self.extra_records[n]
        except KeyError:
            raise DomainError(f"mode {n} lies outside the analysis window") from None

    def in_K(self, n: int) -> bool:
        if self.periodic_K is not None:
            return n in self.periodic_K
        return self.record(n).in_K


def build_index_sets(
    records: Sequence[ModeRecord],
    b_zeros: PeriodicSet | None = None,
    c_zeros: PeriodicSet | None = None,
    extra_records: Iterable[ModeRecord] = (),
) -> IndexSetSummary:
    """Index sets over the record window.

    ``b_zeros`` / ``c_zeros`` are exact all-``n`` zero patterns; when both are
    given ``periodic_K`` is derived from them with period ``lcm`` of the two
    (reduced to the least period).
    """
    if not records:
        raise DomainError("records must be nonempty")
    records = tuple(sorted(records, key=lambda r: r.n))
    if [r.n for r in records] != list(range(1, len(records) + 1)):
        raise DomainError("records must cover n = 1..N contiguously")
    I = frozenset(r.n for r in records if not r.b_zero.is_zero)
    U = frozenset(r.n for r in records if r.b_zero.is_zero)
    O = frozenset(r.n for r in records if not r.c_zero.is_zero)
    periodic_K = None
    if b_zeros is not None and c_zeros is not None:
        P = math.lcm(b_zeros.period, c_zeros.period)
        periodic_K = periodic_from_pattern(
            [(r in b_zeros) and (r not in c_zeros) for r in range(P)]
        )
    return IndexSetSummary(
        window=len(records),
        I=I,
        U=U,
        O=O,
        K=U & O,
        periodic_K=periodic_K,
        records=records,
        b_zeros=b_zeros,
        extra_records={r.n: r for r in extra_records},
    )


class Status(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"
    YES_UP_TO = "yes_up_to"


class Certainty(enum.Enum):
    EXACT = "exact"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class Decision:
    """One verdict component.  ``NO`` always carries a ``witness`` record."""

    status: Status
    certainty: Certainty
    witness: ModeRecord | None = None
    borderline: tuple[int, ...] = ()
    up_to: int | None = None

    def __post_init__(self):
        if self.status is Status.NO and self.witness is None:
            raise DomainError("a NO decision needs a witness mode")

    @property
    def positive(self) -> bool:
        return self.status in (Status.YES, Status.YES_UP_TO)

    def describe(self) -> str:
        if self.status is Status.NO:
            return f"no (witness n={self.witness.n}, {self.certainty.value})"
        if self.status is Status.YES_UP_TO:
            return f"yes up to n={self.up_to} ({self.certainty.value})"
        if self.status is Status.UNKNOWN:
            return f"unknown (borderline modes {list(self.borderline)})"
        return f"yes ({self.certainty.value})"


def _certainty(records: Iterable[ModeRecord]) -> Certainty:
    return Certainty.EXACT if all(r.exact for r in records) else Certainty.NUMERIC


def _check_window(params: SystemParams, summary: IndexSetSummary) -> int:
    n_max = n_max_unstable(params)
    if summary.window < n_max:
        raise DomainError(
            f"window {summary.window} is below n_max_unstable = {n_max}"
        )
    return n_max


def decide_output_stabilizability(params: SystemParams, summary: IndexSetSummary) -> Decision:
    """``NO`` iff some ``n`` in ``K`` has ``lambda_n >= 0``.

    Eigenvalues come from ``params`` rather than the records so that one
    summary can be reused across reaction rates.
    """
    n_max = _check_window(params, summary)
    consulted = [summary.record(n) for n in range(1, n_max + 1)]
    certainty = _certainty(consulted)
    for rec in consulted:
        if summary.in_K(rec.n):
            return Decision(Status.NO, certainty, witness=_relabel(rec, params))
    risky = tuple(
        r.n for r in consulted
        if not r.c_zero.is_zero and r.b_zero.borderline
    )
    if risky:
        return Decision(Status.UNKNOWN, certainty, borderline=risky)
    return Decision(Status.YES, certainty)


def decide_state_stabilizability(params: SystemParams, summary: IndexSetSummary) -> Decision:
    """``NO`` iff some uncontrollable ``n`` has ``lambda_n >= 0``."""
    n_max = _check_window(params, summary)
    consulted = [summary.record(n) for n in range(1, n_max + 1)]
    certainty = Certainty.EXACT if all(r.b_zero.is_exact for r in consulted) else Certainty.NUMERIC
    for rec in consulted:
        if rec.b_zero.is_zero:
            return Decision(Status.NO, certainty, witness=_relabel(rec, params))
    risky = tuple(r.n for r in consulted if r.b_zero.borderline)
    if risky:
        return Decision(Status.UNKNOWN, certainty, borderline=risky)
    return Decision(Status.YES, certainty)


def decide_approx_controllability(summary: IndexSetSummary) -> Decision:
    """``NO`` on the first zero ``b_n``; exact ``YES`` needs a zero-free period."""
    if summary.b_zeros is not None:
        first = summary.b_zeros.least()
        if first is None:
            return Decision(Status.YES, Certainty.EXACT)
        return Decision(Status.NO, Certainty.EXACT, witness=summary.record(first))
    for rec in summary.records:
        if rec.b_zero.is_zero:
            certainty = Certainty.EXACT if rec.b_zero.is_exact else Certainty.NUMERIC
            return Decision(Status.NO, certainty, witness=rec)
    certainty = (
        Certainty.EXACT if all(r.b_zero.is_exact for r in summary.records) else Certainty.NUMERIC
    )
    borderline = tuple(r.n for r in summary.records if r.b_zero.borderline)
    return Decision(Status.YES_UP_TO, certainty, borderline=borderline, up_to=summary.window)


def critical_k(params: SystemParams, summary: IndexSetSummary) -> float:
    """Supremum of ``k`` keeping the output verdict positive (``+inf`` if ``K`` is empty)."""
    if summary.periodic_K is not None:
        least = summary.periodic_K.least()
    else:
        least = min(summary.K) if summary.K else None
    if least is None:
        return math.inf
    return params.alpha**2 / 4.0 + least * least * PI2


def _relabel(rec: ModeRecord, params: SystemParams) -> ModeRecord:
    lam = eigenvalue(params, rec.n)
    if lam == rec.lam:
        return rec
    return ModeRecord(rec.n, lam, rec.b, rec.c, rec.b_zero, rec.c_zero)


@dataclass(frozen=True)
class Verdict:
    output_stabilizable: Decision
    state_stabilizable: Decision
    approx_controllable: Decision

    @property
    def certainty(self) -> Certainty:
        parts = (self.output_stabilizable, self.state_stabilizable, self.approx_controllable)
        if all(d.certainty is Certainty.EXACT for d in parts):
            return Certainty.EXACT
        return Certainty.NUMERIC


@dataclass(frozen=True)
class Analysis:
    params: SystemParams
    b: Profile
    c: Profile
    records: tuple[ModeRecord, ...]
    summary: IndexSetSummary
    verdict: Verdict
    critical_k: float
    policy: ThresholdPolicy

    def at_k(self, k: float) -> "Analysis":
        """Re-decide for another reaction rate; coefficients do not depend on ``k``."""
        params = self.params.with_k(k)
        if self.summary.window < n_max_unstable(params):
            return analyze(params, self.b, self.c, policy=self.policy)
        return Analysis(
            params, self.b, self.c, self.records, self.summary,
            decide(params, self.summary), critical_k(params, self.summary), self.policy,
        )


def decide(params: SystemParams, summary: IndexSetSummary) -> Verdict:
    return Verdict(
        output_stabilizable=decide_output_stabilizability(params, summary),
        state_stabilizable=decide_state_stabilizability(params, summary),
        approx_controllable=decide_approx_controllability(summary),
    )


def analyze(
    params: SystemParams,
    b: Profile,
    c: Profile,
    window: int | None = None,
    policy: ThresholdPolicy | None = None,
    q: QuadratureSettings | None = None,
) -> Analysis:
    """Records, index sets, verdicts and critical ``k`` in one call."""
    policy = policy or ThresholdPolicy()
    N = default_window(params) if window is None else int(window)
    if N < max(1, n_max_unstable(params)):
        raise DomainError(
            f"window {N} is below n_max_unstable = {n_max_unstable(params)}"
        )
    records = classify_modes(params, b, c, N, policy, q)
    b_zeros = zero_pattern(b) if has_exact_zeros(params, b) else None
    c_zeros = zero_pattern(c) if has_exact_zeros(params, c) else None
    extra = []
    if b_zeros is not None:
        first = b_zeros.least()
        if first is not None and first > N:
            extra.append(classify_mode(params, b, c, first, policy, q))
    summary = build_index_sets(records, b_zeros, c_zeros, extra)
    return Analysis(
        params, b, c, tuple(records), summary,
        decide(params, summary), critical_k(params, summary), policy,
    )
