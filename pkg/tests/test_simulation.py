import math

import numpy as np
import pytest

from modalstab.coefficients import coefficients
from modalstab.errors import ConfigurationError, DomainError, EstimationError, SimulationDiverged
from modalstab.feedback import FeedbackLaw, synthesize
from modalstab.modes import classify_modes
from modalstab.profiles import Indicator, Tabulated
from modalstab.simulation import (
    ModalState,
    Trajectory,
    estimate_decay_rate,
    project_initial,
    reconstruct_field,
    simulate_closed_loop,
    simulate_open_loop,
    time_grid,
    y2_series,
)
from modalstab.spectral import PI2, SystemParams, eigenfunction, eigenvalues

# c_2 for c = indicator(1/4, 1/2), alpha = 0, and its scalar evolution at k = pi^2
C2 = 0.225079079039276517
Y_E2_T01 = 0.0116530795312369738
Y_E2_T1 = 3.1145186771118e-14

P_BASE = SystemParams(0.0, PI2)


def mixed_state(N=64, m=8):
    a = np.zeros(N)
    a[:m] = 1.0 / math.sqrt(m)
    return ModalState(a)


# -- project_initial ---------------------------------------------------------

def test_projection_of_sampled_eigenfunction():
    z0 = Tabulated.sample(eigenfunction(SystemParams(0, 0), 2), 40001)
    a = project_initial(z0, SystemParams(0, 0), 4).a
    np.testing.assert_allclose(a, [0, 1, 0, 0], atol=1e-8)


def test_projection_of_indicator():
    a = project_initial(Indicator(0.25, 0.75), SystemParams(0, 0), 2).a
    assert a[0] == pytest.approx(2 / math.pi, abs=1e-14)
    assert a[1] == 0.0


def test_projection_of_zero_profile():
    z0 = Tabulated([0.0, 1.0], [0.0, 0.0])
    assert not np.any(project_initial(z0, SystemParams(0.7, 0), 6).a)


def test_projection_rejects_bad_N():
    with pytest.raises(DomainError):
        project_initial(Indicator(0.25, 0.75), P_BASE, 0)


def test_modal_state_validation():
    with pytest.raises(DomainError):
        ModalState([])
    with pytest.raises(DomainError):
        ModalState([1.0, math.nan])
    with pytest.raises(DomainError):
        ModalState.unit(5, 4)


# -- open loop ---------------------------------------------------------------

def test_open_loop_unit_mode_values(base_b, base_c):
    tr = simulate_open_loop(ModalState.unit(2, 4), P_BASE, base_b, base_c, [0.0, 0.1, 1.0])
    assert tr.y[0] == pytest.approx(C2, rel=1e-14)
    assert tr.y[1] == pytest.approx(Y_E2_T01, rel=1e-12)
    assert tr.y[2] == pytest.approx(Y_E2_T1, rel=1e-12)
    assert not np.any(tr.u)


def test_open_loop_zero_state(base_b, base_c):
    tr = simulate_open_loop(ModalState.zeros(8), P_BASE, base_b, base_c, time_grid(1, 0.1))
    assert not np.any(tr.y)
    assert not np.any(tr.state_norm)


def test_open_loop_grid_independence(base_b, base_c):
    s = mixed_state(16)
    coarse = simulate_open_loop(s, P_BASE, base_b, base_c, time_grid(2.0, 0.5))
    fine = simulate_open_loop(s, P_BASE, base_b, base_c, time_grid(2.0, 0.01))
    np.testing.assert_allclose(fine.y[::50], coarse.y, rtol=1e-15, atol=1e-300)


def test_open_loop_semigroup(base_b, base_c):
    s = mixed_state(16)
    t1, t2 = 0.3, 0.45
    mid = simulate_open_loop(s, P_BASE, base_b, base_c, [0.0, t1]).states[-1]
    two = simulate_open_loop(ModalState(mid), P_BASE, base_b, base_c, [0.0, t2]).states[-1]
    one = simulate_open_loop(s, P_BASE, base_b, base_c, [0.0, t1 + t2]).states[-1]
    # exp(x)exp(y) and exp(x+y) differ by about |x| ulps, so compare against the norm
    np.testing.assert_allclose(two, one, rtol=0, atol=1e-15 * np.linalg.norm(one))


def test_grid_validation(base_b, base_c):
    s = ModalState.unit(1, 2)
    for bad in ([0.1, 0.2], [0.0, 0.2, 0.2], [[0.0, 1.0]]):
        with pytest.raises(DomainError):
            simulate_open_loop(s, P_BASE, base_b, base_c, bad)
    with pytest.raises(DomainError):
        time_grid(1.0, 0.0)


# -- y-split ------------------------------------------------------------------

def test_y2_matches_open_loop_on_K_support(base_b, base_c):
    N = 24
    b = coefficients(P_BASE, base_b, N)
    K = [n for n in range(1, N + 1) if b[n - 1] == 0.0]
    assert K[:3] == [2, 4, 6]
    a = np.zeros(N)
    a[np.array(K) - 1] = 1.0
    s = ModalState(a)
    assert y2_series(s, P_BASE, K, base_c, 1.0) == pytest.approx(
        simulate_open_loop(s, P_BASE, base_b, base_c, [0.0, 1.0]).y[1], rel=1e-14
    )


def test_y2_example_value(base_c):
    assert y2_series(ModalState.unit(2, 4), P_BASE, [2, 4], base_c, 1.0) == pytest.approx(
        math.sqrt(2) / (2 * math.pi) * math.exp(-3 * PI2), rel=1e-12
    )


def test_y2_vanishes_on_disjoint_support(base_c):
    assert y2_series(ModalState.unit(1, 8), P_BASE, [2, 4, 6, 8], base_c, 0.5) == 0.0


def test_y_split(base_b, base_c):
    N = 32
    s = mixed_state(N, 16)
    b = coefficients(P_BASE, base_b, N)
    K = [n for n in range(1, N + 1) if b[n - 1] == 0.0]
    rest = [n for n in range(1, N + 1) if n not in K]
    tr = simulate_open_loop(s, P_BASE, base_b, base_c, time_grid(1.0, 0.05))
    for t, y in zip(tr.times, tr.y):
        split = y2_series(s, P_BASE, K, base_c, t) + y2_series(s, P_BASE, rest, base_c, t)
        assert y == pytest.approx(split, abs=1e-10)


def test_truncation_tail_bound(base_b, base_c):
    z0 = Indicator("1/10", "7/20")
    N = 16
    a2 = project_initial(z0, P_BASE, 2 * N).a
    c2 = coefficients(P_BASE, base_c, 2 * N)
    grid = time_grid(1.0, 0.01)
    y_small = simulate_open_loop(ModalState(a2[:N]), P_BASE, base_b, base_c, grid).y
    y_big = simulate_open_loop(ModalState(a2), P_BASE, base_b, base_c, grid).y
    bound = float(np.sum(np.abs(c2[N:] * a2[N:])))
    assert bound > 0
    assert np.max(np.abs(y_big - y_small)) <= bound


# -- closed loop -------------------------------------------------------------

def test_empty_law_is_open_loop(base_b, base_c):
    s = mixed_state(32)
    grid = time_grid(1.0, 0.01)
    cl = simulate_closed_loop(s, P_BASE, base_b, base_c, FeedbackLaw(), grid)
    ol = simulate_open_loop(s, P_BASE, base_b, base_c, grid)
    np.testing.assert_allclose(cl.y, ol.y, atol=1e-10)
    assert not np.any(cl.u)


def test_closed_loop_decay_rate(base_b, base_c):
    N = 64
    law = synthesize(P_BASE, classify_modes(P_BASE, base_b, base_c, N))
    tr = simulate_closed_loop(mixed_state(N), P_BASE, base_b, base_c, law, time_grid(8.0, 0.01))
    rate = estimate_decay_rate(tr)
    assert -1.1 <= rate <= -0.9


def test_K_modes_unaffected_by_feedback(base_b, base_c):
    N = 64
    rng = np.random.default_rng(3)
    b = coefficients(P_BASE, base_b, N)
    K = np.nonzero(b == 0.0)[0]
    # an arbitrary law touching several controllable modes
    law = FeedbackLaw(gains={1: -2.0, 3: 0.5, 5: 4.0}, targets={1: -1.0, 3: -2.0, 5: -3.0})
    s = ModalState(rng.normal(size=N) / np.arange(1, N + 1))
    grid = time_grid(2.0, 0.01)
    tr = simulate_closed_loop(s, P_BASE, b, base_c, law, grid)
    lams = eigenvalues(P_BASE, N)
    expected = np.exp(np.outer(grid, lams[K])) * s.a[K]
    np.testing.assert_allclose(tr.states[:, K], expected, atol=1e-9)


def test_best_effort_growth_rate(base_b, base_c):
    p = SystemParams(0.0, 5 * PI2)
    N = 64
    law = synthesize(p, classify_modes(p, base_b, base_c, N), best_effort=True)
    tr = simulate_closed_loop(ModalState.unit(2, N), p, base_b, base_c, law, time_grid(2.0, 0.01))
    rate = estimate_decay_rate(tr)
    assert 0.9 * PI2 <= rate <= 1.1 * PI2


def test_divergence_guard_returns_partial_trajectory(base_b, base_c):
    p = SystemParams(0.0, 5 * PI2)
    with pytest.raises(SimulationDiverged) as info:
        simulate_closed_loop(ModalState.unit(2, 8), p, base_b, base_c, FeedbackLaw(), time_grid(8.0, 0.01))
    partial = info.value.trajectory
    assert 0 < len(partial) < 801
    assert np.all(partial.state_norm <= 1e12)
    assert partial.times[-1] < math.log(1e12) / PI2 + 0.02


def test_closed_loop_needs_support_in_truncation(base_b, base_c):
    law = FeedbackLaw(gains={5: -1.0}, targets={5: -1.0})
    with pytest.raises(DomainError):
        simulate_closed_loop(ModalState.unit(1, 4), P_BASE, base_b, base_c, law, [0.0, 0.1])


# -- field reconstruction ----------------------------------------------------

def test_reconstruct_unit_mode():
    z = reconstruct_field(ModalState.unit(1, 3), SystemParams(0, 0), [0.5])
    assert z[0] == pytest.approx(math.sqrt(2), abs=1e-15)


def test_reconstruct_zero_state():
    assert not np.any(reconstruct_field(ModalState.zeros(5), SystemParams(1, 0), np.linspace(0, 1, 11)))


def test_reconstruct_one_term_projection():
    p = SystemParams(0, 0)
    s = project_initial(Indicator(0.25, 0.75), p, 1)
    z = reconstruct_field(s, p, [0.5])
    assert z[0] == pytest.approx(2 / math.pi * math.sqrt(2), abs=1e-14)
    assert z[0] == pytest.approx(0.9003, abs=1e-4)


def test_reconstruct_alpha_cap():
    with pytest.raises(ConfigurationError):
        reconstruct_field(ModalState.unit(1, 2), SystemParams(80, 0), [0.5])


# -- decay fit ---------------------------------------------------------------

def _traj(t, y):
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    return Trajectory(t, y, np.zeros_like(t), np.abs(y))


def test_decay_pure_mode():
    t = time_grid(1.0, 0.01)
    rate = estimate_decay_rate(_traj(t, 0.3 * np.exp(-3 * PI2 * t)))
    assert rate == pytest.approx(-3 * PI2, abs=1e-6)


def test_decay_slow_pole_dominates():
    t = time_grid(20.0, 0.01)
    rate = estimate_decay_rate(_traj(t, np.exp(-t) + 5 * np.exp(-30 * t)))
    assert rate == pytest.approx(-1.0, abs=1e-2)


def test_decay_zero_signal():
    t = time_grid(1.0, 0.01)
    with pytest.raises(EstimationError):
        estimate_decay_rate(_traj(t, np.zeros_like(t)))


def test_decay_too_few_samples():
    t = np.arange(5) * 0.1
    with pytest.raises(EstimationError):
        estimate_decay_rate(_traj(t, np.exp(-t)))
