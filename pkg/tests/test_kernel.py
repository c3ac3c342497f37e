import numpy as np
import pytest

from surfspec.errors import SingularEvaluationError
from surfspec.kernel import (SpectralPoint, green, green_grad_x, green_grad_y,
                             green_is_real_for_negative_lambda, sqrt_branch)


def test_sqrt_branch_values():
    assert sqrt_branch(-1.0) == 1j
    assert sqrt_branch(4.0) == 2.0
    w = sqrt_branch(-8.955)
    assert abs(w - 2.9925j) < 1e-4
    assert w.real == 0.0


def test_sqrt_branch_upper_halfplane():
    rng = np.random.default_rng(0)
    for lam in rng.standard_normal(50) + 1j * rng.standard_normal(50):
        w = sqrt_branch(lam)
        assert w.imag >= 0.0
        assert abs(w * w - lam) < 1e-14 * abs(lam)


def test_sqrt_branch_real_negative_exact():
    for lam in (-1.0, -4.0, -8.955, -1e-8, -1e8):
        w = sqrt_branch(lam)
        assert w.real == 0.0
        assert w.imag == np.sqrt(-lam)


def test_spectral_point_consistency():
    sp = SpectralPoint(-6.25 + 0.3j)
    assert abs(sp.k ** 2 - sp.lam) < 1e-14 * abs(sp.lam)
    assert sp.k.imag >= 0


def test_green_laplace_value():
    sp = SpectralPoint(0.0)
    val = green(sp, np.array([0.0, 0, 0]), np.array([1.0, 0, 0]))
    assert abs(val - 1.0 / (4 * np.pi)) < 1e-15


def test_green_yukawa_value():
    sp = SpectralPoint(-1.0)
    val = green(sp, np.array([0.0, 0, 0]), np.array([1.0, 0, 0]))
    assert abs(val - np.exp(-1.0) / (4 * np.pi)) < 1e-15
    assert val.imag == 0.0


def test_green_symmetry(rng):
    sp = SpectralPoint(-3.7 + 0.2j)
    for _ in range(10):
        x = rng.standard_normal(3)
        y = rng.standard_normal(3)
        assert green(sp, x, y) == green(sp, y, x)


def test_green_singular():
    sp = SpectralPoint(-1.0)
    x = np.array([0.3, 0.2, 0.1])
    with pytest.raises(SingularEvaluationError):
        green(sp, x, x)
    with pytest.raises(SingularEvaluationError):
        green_grad_y(sp, x, x)


def test_grad_laplace_double_layer_form(rng):
    # lambda = 0: nu . grad_y G = (x - y) . nu / (4 pi r^3)
    sp = SpectralPoint(0.0)
    x = np.array([0.9, -0.3, 0.4])
    y = np.array([0.1, 0.2, -0.2])
    nu = rng.standard_normal(3)
    nu /= np.linalg.norm(nu)
    g = green_grad_y(sp, x, y) @ nu
    r = np.linalg.norm(x - y)
    assert abs(g - (x - y) @ nu / (4 * np.pi * r ** 3)) < 1e-14


def test_grad_orthogonal_direction_vanishes():
    sp = SpectralPoint(-2.0)
    x = np.array([1.0, 0, 0.5])
    y = np.array([0.0, 0, 0.5])
    nu = np.array([0.0, 1.0, 0.0])  # perpendicular to x - y
    assert abs(green_grad_y(sp, x, y) @ nu) < 1e-16


def test_grad_finite_difference():
    sp = SpectralPoint(-2.3 + 0.4j)
    x = np.array([0.0, 0.0, 0.0])
    y = np.array([0.6, -0.5, 0.62])  # r ~ 1
    h = 1e-5
    g = green_grad_y(sp, x, y)
    for d in range(3):
        e = np.zeros(3)
        e[d] = h
        fd = (green(sp, x, y + e) - green(sp, x, y - e)) / (2 * h)
        assert abs(g[d] - fd) < 1e-6
    assert np.allclose(green_grad_x(sp, x, y), -g)


def test_helmholtz_residual_finite_difference():
    # (-Delta_x - lambda) G = 0 away from the source
    sp = SpectralPoint(-2.0)
    x = np.array([0.3, 0.4, 0.1])
    y = x + np.array([1.0, 0.0, 0.0])
    h = 1e-3
    lap = -6.0 * green(sp, x, y)
    for d in range(3):
        for s in (-1, 1):
            xs = x.copy()
            xs[d] += s * h
            lap += green(sp, xs, y)
    lap /= h * h
    assert abs(-lap - sp.lam * green(sp, x, y)) < 1e-4


def test_decay_bound(rng):
    for lam in (-4.0, -0.5, 2.0 + 1.5j):
        sp = SpectralPoint(lam)
        for _ in range(5):
            x = rng.standard_normal(3)
            y = rng.standard_normal(3)
            r = np.linalg.norm(x - y)
            bound = np.exp(-sp.k.imag * r) / (4 * np.pi * r)
            val = abs(green(sp, x, y))
            assert val <= bound * (1 + 1e-14)
            if sp.lam.imag == 0 and sp.lam.real <= 0:
                assert abs(val - bound) < 1e-14 * bound


def test_real_negative_diagnostic():
    assert green_is_real_for_negative_lambda(SpectralPoint(-6.25))
    assert not green_is_real_for_negative_lambda(SpectralPoint(1.0))
    assert not green_is_real_for_negative_lambda(SpectralPoint(-1 + 0.1j))
