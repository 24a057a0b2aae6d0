import math

import numpy as np
import pytest

from modalstab.errors import DomainError, QuadratureError
from modalstab.quadrature import _GW, _KW, _NODES, QuadratureSettings, gk15, integrate


def test_gauss_subrule_matches_legendre():
    nodes, weights = np.polynomial.legendre.leggauss(7)
    gauss_nodes = _NODES[_GW != 0]
    np.testing.assert_allclose(np.sort(gauss_nodes), np.sort(nodes), atol=1e-15)
    np.testing.assert_allclose(_GW[_GW != 0][np.argsort(gauss_nodes)], weights[np.argsort(nodes)], atol=1e-15)


def test_kronrod_rule_is_exact_to_degree_22():
    assert math.isclose(_KW.sum(), 2.0, abs_tol=1e-15)
    for deg in range(0, 23):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert abs(_KW @ _NODES**deg - exact) < 1e-14, deg


def test_single_panel_polynomial():
    val, err = gk15(lambda x: 3 * x**2, 0.0, 2.0)
    assert abs(val - 8.0) < 1e-13
    assert err < 1e-12


@pytest.mark.parametrize("n", [1, 7, 50, 200])
def test_oscillatory_sine_square(n):
    res = integrate(lambda x: np.sin(n * np.pi * x) ** 2)
    assert abs(res.value - 0.5) < 1e-12


def test_breakpoints_restore_accuracy_for_jumps():
    step = lambda x: np.where(x >= 1 / 3, 1.0, 0.0) * np.exp(x)
    exact = math.e - math.exp(1 / 3)
    res = integrate(step, settings=QuadratureSettings(breakpoints=(1 / 3,)))
    assert abs(res.value - exact) < 1e-13
    assert res.panels <= 4


def test_failure_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        # unannounced jump at an irrational point
        integrate(lambda x: np.where(x > 1 / math.pi, 1.0, -1.0),
                  settings=QuadratureSettings(rtol=1e-14, atol=1e-15, max_panels=8))
    assert math.isfinite(info.value.estimate)
    assert info.value.error > 0


def test_settings_validation():
    with pytest.raises(DomainError):
        QuadratureSettings(rtol=0)
    with pytest.raises(DomainError):
        QuadratureSettings(breakpoints=(0.6, 0.2))
    with pytest.raises(DomainError):
        QuadratureSettings(breakpoints=(1.5,))
    merged = QuadratureSettings(breakpoints=(0.5,)).with_breakpoints([0.25, 0.5])
    assert merged.breakpoints == (0.25, 0.5)
