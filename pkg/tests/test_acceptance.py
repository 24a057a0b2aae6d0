"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line summary through the ``criterion`` fixture; the
``acceptance criteria`` section at the end of the pytest run lists them with
PASS/FAIL.
"""

import math
import random
from fractions import Fraction as F

import numpy as np

from modalstab.cli import bisect_flip
from modalstab.coefficients import ThresholdPolicy, coeff_indicator, coeff_quadrature, coefficients
from modalstab.feedback import (
    FeedbackLaw,
    closed_loop_spectrum,
    default_targets,
    rank_one_eigvals,
    rank_one_gains,
    synthesize,
)
from modalstab.modes import Certainty, Status, analyze, default_window
from modalstab.profiles import Indicator
from modalstab.simulation import (
    ModalState,
    estimate_decay_rate,
    simulate_closed_loop,
    time_grid,
)
from modalstab.spectral import (
    PI2,
    SystemParams,
    eigenfunction,
    eigenvalues,
    n_max_unstable,
    weighted_inner_product,
)

B_BASE = Indicator(F(1, 4), F(3, 4))
C_BASE = Indicator(F(1, 4), F(1, 2))
B_DRIFT = Indicator(F(1, 4), F(1, 2))
C_DRIFT = Indicator(F(1, 4), F(3, 4))


def test_ac1_index_set_K_reproduction(criterion):
    a = analyze(SystemParams(0.0, PI2), B_BASE, C_BASE, window=200)
    K = set(a.summary.K)
    expected = {8 * p + r for p in range(26) for r in (2, 4, 6)} & set(range(1, 201))
    criterion.note(f"|K cap [1,200]| = {len(K)}, expected {len(expected)}")
    assert K == expected
    per = a.summary.periodic_K
    criterion.note(f"periodic_K = (P={per.period}, R={sorted(per.residues)})")
    assert per.period == 8 and set(per.residues) == {2, 4, 6}
    # the periodic description also agrees far beyond the window
    assert all((n in per) == (n in expected) for n in range(1, 201))


def test_ac2_base_system_verdicts_and_flip(criterion):
    yes = analyze(SystemParams(0.0, PI2), B_BASE, C_BASE).verdict.output_stabilizable
    criterion.note(f"k=pi^2: {yes.status.value}/{yes.certainty.value}")
    assert yes.status is Status.YES and yes.certainty is Certainty.EXACT

    no = analyze(SystemParams(0.0, 5 * PI2), B_BASE, C_BASE).verdict.output_stabilizable
    criterion.note(f"k=5pi^2: {no.status.value}, witness {no.witness.n}")
    assert no.status is Status.NO and no.witness.n == 2

    base = analyze(SystemParams(0.0, 50.0), B_BASE, C_BASE)
    lo, hi = bisect_flip(base, 0.0, 50.0, tol=1e-9)
    err = max(abs(lo - 4 * PI2), abs(hi - 4 * PI2))
    criterion.note(f"flip bracket [{lo:.12f}, {hi:.12f}], max distance to 4pi^2 {err:.2e}")
    assert hi - lo <= 1e-9 and err <= 1e-9


def test_ac3_drift_system_verdict(criterion):
    p = SystemParams(1.0, PI2)
    policy = ThresholdPolicy()
    a = analyze(p, B_DRIFT, C_DRIFT, window=64, policy=policy)
    approx = a.verdict.approx_controllable
    criterion.note(f"approx_controllable = {approx.status.value}{{{approx.up_to}}}")
    assert approx.status is Status.YES_UP_TO and approx.up_to == 64

    quad = np.array([coeff_quadrature(p, B_DRIFT, n) for n in range(1, 65)])
    closed = coefficients(p, B_DRIFT, 64)
    threshold = policy.rel * np.max(np.abs(quad))
    criterion.note(
        f"min |b_n| (quadrature) = {np.min(np.abs(quad)):.3e} vs threshold {threshold:.1e}; "
        f"max closed-form gap {np.max(np.abs(quad - closed)):.1e}"
    )
    assert np.all(np.abs(quad) > threshold)
    assert np.max(np.abs(quad - closed)) <= 1e-10

    out = a.verdict.output_stabilizable
    criterion.note(f"output_stabilizable = {out.status.value}")
    assert out.status is Status.YES


def _random_rational_intervals(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        den = rng.randint(2, 60)
        i, j = sorted(rng.sample(range(den + 1), 2))
        out.append(Indicator(F(i, den), F(j, den)))
    return out


def test_ac4_coefficient_oracle_equivalence(criterion):
    worst = 0.0
    intervals = _random_rational_intervals(20, seed=4)
    for alpha in (0.0, 0.5, 2.0):
        p = SystemParams(alpha, 0.0)
        for iv in intervals:
            for n in range(1, 51):
                worst = max(worst, abs(coeff_indicator(p, iv, n) - coeff_quadrature(p, iv, n)))
    criterion.note(f"max |closed form - quadrature| = {worst:.2e} over 3000 cases")
    assert worst <= 1e-10

    p0 = SystemParams(0.0, PI2)
    b1, c1 = coeff_indicator(p0, B_BASE, 1), coeff_indicator(p0, C_BASE, 1)
    criterion.note(f"b_1 = {b1:.15f} (2/pi), c_1 = {c1:.15f} (1/pi)")
    assert abs(abs(b1) - 2 / math.pi) <= 1e-12
    assert abs(abs(c1) - 1 / math.pi) <= 1e-12


def test_ac5_spectral_sanity(criterion):
    worst = 0.0
    for alpha in (0.0, 0.5, 2.0):
        p = SystemParams(alpha, 0.0)
        phis = [eigenfunction(p, n) for n in range(1, 21)]
        G = np.array([[weighted_inner_product(f, g, p) for g in phis] for f in phis])
        worst = max(worst, float(np.max(np.abs(G - np.eye(20)))))
    criterion.note(f"max |G - I| = {worst:.2e}")
    assert worst <= 1e-10

    for alpha, k in ((0.0, PI2), (0.5, 30 * PI2), (2.0, -3.0), (3.0, 400.0)):
        p = SystemParams(alpha, k)
        nm = n_max_unstable(p)
        lam = eigenvalues(p, nm + 100)
        assert np.all(np.diff(lam) < 0)
        assert np.all(lam[nm:] < 0)
        assert nm == 0 or lam[nm - 1] >= 0
    criterion.note("monotone eigenvalues and negative tail to n_max + 100 for 4 parameter sets")


def test_ac6_dynamics_positive_case(criterion):
    p = SystemParams(0.0, PI2)
    N = 64
    a = analyze(p, B_BASE, C_BASE, window=N)
    law = synthesize(p, a.records)
    assert law.support == (1,) and law.targets[1] == -1.0
    x0 = np.zeros(N)
    x0[:8] = 1.0 / math.sqrt(8)
    grid = time_grid(8.0, 0.01)
    tr = simulate_closed_loop(ModalState(x0), p, a.b, a.c, law, grid, N)
    rate = estimate_decay_rate(tr)
    criterion.note(f"fitted output decay rate {rate:.5f}")
    assert -1.1 <= rate <= -0.9

    lams = eigenvalues(p, N)
    K = np.nonzero(np.array([r.b for r in a.records[:N]]) == 0.0)[0]
    dev = float(np.max(np.abs(tr.states[:, K] - np.exp(np.outer(grid, lams[K])) * x0[K])))
    criterion.note(f"max K-mode deviation from open loop {dev:.1e}")
    assert dev <= 1e-9


def test_ac7_dynamics_negative_case(criterion):
    p = SystemParams(0.0, 5 * PI2)
    N = 64
    a = analyze(p, B_BASE, C_BASE, window=N)
    law = synthesize(p, a.records, best_effort=True)
    tr = simulate_closed_loop(ModalState.unit(2, N), p, a.b, a.c, law, time_grid(2.0, 0.01), N)
    rate = estimate_decay_rate(tr)
    criterion.note(f"fitted growth rate {rate:.5f} = {rate / PI2:.5f} pi^2")
    assert 0.9 * PI2 <= rate <= 1.1 * PI2


def test_ac8_pole_placement(criterion):
    rng = np.random.default_rng(8)
    worst = 0.0
    for size in range(1, 6):
        for _ in range(200):
            gap = 1.0
            lams = (np.sort(rng.uniform(-5.0, 5.0 - (size - 1) * gap, size)) + gap * np.arange(size))[::-1]
            mu = np.sort(rng.uniform(-6.0, -0.5 - (size - 1) * gap, size)) + gap * np.arange(size)
            b = rng.uniform(0.5, 2.0, size) * rng.choice([-1.0, 1.0], size)
            f = rank_one_gains(lams, b, mu)
            ev = rank_one_eigvals(lams, b, f)
            worst = max(worst, float(np.max(np.abs(np.sort(ev.real) - np.sort(mu)))),
                        float(np.max(np.abs(ev.imag))))
    criterion.note(f"max placement error {worst:.1e} over 1000 systems of size 1-5")
    assert worst <= 1e-8

    drift = 0.0
    for size in (1, 2, 3, 4):
        p = SystemParams(0.0, PI2 * size**2 + 0.5)
        b = rng.uniform(0.3, 1.0, 64)
        b[size + 3::4] = 0.0
        lam = eigenvalues(p, size)
        mu = np.array(default_targets(lam))
        law = FeedbackLaw(gains=dict(enumerate(rank_one_gains(lam, b[:size], mu), start=1)),
                          targets=dict(enumerate(mu, start=1)))
        for N in (size, 2 * size, 16, 64):
            rep = closed_loop_spectrum(p, law, b[:N])
            drift = max(drift, float(np.max(np.abs(np.sort(rep.placed) - np.sort(mu)))), rep.residual)
    criterion.note(f"max spectrum deviation across truncations {drift:.1e}")
    assert drift <= 1e-8


def test_ac9_implications_randomized(criterion):
    rng = random.Random(9)

    def interval():
        den = rng.randint(2, 16)
        i, j = sorted(rng.sample(range(den + 1), 2))
        return Indicator(F(i, den), F(j, den))

    checked = {"state=>output": 0, "window": 0}
    for _ in range(200):
        p = SystemParams(0.0, rng.uniform(-5.0, 40.0 * PI2))
        b, c = interval(), interval()
        base = analyze(p, b, c)
        v = base.verdict
        if v.state_stabilizable.status is Status.YES:
            checked["state=>output"] += 1
            assert v.output_stabilizable.status is Status.YES
        if v.approx_controllable.status is Status.YES:
            assert v.state_stabilizable.status is Status.YES
            assert v.output_stabilizable.status is Status.YES
        for window in (max(1, n_max_unstable(p)), default_window(p) + 37):
            other = analyze(p, b, c, window=window).verdict
            for name in ("output_stabilizable", "state_stabilizable", "approx_controllable"):
                d0, d1 = getattr(v, name), getattr(other, name)
                assert d0.status == d1.status
                assert (d0.witness and d0.witness.n) == (d1.witness and d1.witness.n)
            checked["window"] += 1
    criterion.note(
        f"200 systems; state=>output exercised {checked['state=>output']} times; "
        f"{checked['window']} window comparisons; exact approx-controllability never holds for indicators"
    )
