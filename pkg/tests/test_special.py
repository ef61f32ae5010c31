import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldbach_ap.errors import KernelSingularityError, PoleError
from goldbach_ap.special import W_kernel, gamma, log_gamma, power


def test_gamma_examples():
    assert gamma(1) == pytest.approx(1, rel=1e-15)
    assert gamma(2) == pytest.approx(1, rel=1e-15)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    # mpmath reference at the first zeta ordinate
    ref = complex(-1.44555384376069643909e-10, -5.52278876877406558495e-10)
    g = gamma(complex(0.5, 14.134725))
    assert abs(g - ref) / abs(ref) < 1e-12
    assert abs(g) == pytest.approx(math.sqrt(math.pi / math.cosh(math.pi * 14.134725)), rel=1e-12)


def test_gamma_poles():
    for k in (0, -1, -7):
        with pytest.raises(PoleError) as info:
            gamma(k)
        assert info.value.pole == k


@pytest.mark.parametrize(
    "s",
    [3.7, complex(0.2, 3), complex(-4.5, 0.3), complex(12, -40), complex(0.5, 500), complex(-30.25, 7),
     complex(2, 1e4), complex(0.5, 1e6)],
)
def test_log_gamma_against_mpmath(s):
    ref = complex(mpmath.loggamma(s))
    assert abs(log_gamma(s) - ref) <= 1e-15 * max(1, abs(s) * math.log(abs(s) + 2)) * 10


def test_gamma_underflow_returns_zero():
    assert gamma(complex(0.5, 1000)) == 0


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_gamma_recurrence(x, y):
    s = complex(x, y)
    # stay away from the poles, where Gamma overflows double precision
    if abs(s) > 50 or (x < 0.5 and abs(s - round(x)) < 1e-6):
        return
    g1 = gamma(s + 1)
    g0 = gamma(s)
    if g1 == 0 or g0 == 0:
        return
    assert abs(g1 - s * g0) <= 1e-11 * abs(g1)


def test_gamma_recurrence_grid():
    rng = np.random.default_rng(7)
    r = 50 * np.sqrt(rng.random(1000))
    th = 2 * np.pi * rng.random(1000)
    s = r * np.exp(1j * th)
    g1, g0 = gamma(s + 1), gamma(s)
    ok = (g1 != 0) & (g0 != 0)
    rel = np.abs(g1[ok] - s[ok] * g0[ok]) / np.abs(g1[ok])
    assert rel.max() < 1e-11


def test_power():
    assert power(7.5, 0) == 1
    assert power(100, 0.5) == pytest.approx(10, rel=1e-15)
    assert power(10, 1j) == pytest.approx(complex(math.cos(math.log(10)), math.sin(math.log(10))), rel=1e-15)
    assert power(10, 1j) == pytest.approx(complex(-0.66820, 0.74398), abs=1e-5)
    with pytest.raises(ValueError):
        power(0, 1)


def test_W_examples():
    for X in (2.0, 10.0, 1e5):
        assert W_kernel(X, 1, 1) == pytest.approx(X * X / 2, rel=1e-13)
    assert W_kernel(16, 0.5, 0.5) == pytest.approx(16 * math.pi, rel=1e-14)
    rho = complex(0.5, 14.134725141734695)
    assert W_kernel(100, rho, 1) == pytest.approx(100 ** (rho + 1) / (rho * (rho + 1)), rel=1e-12)


@pytest.mark.parametrize(
    "X,z,w,ref",
    [
        (100, complex(0.5, 14.134725141734695), 1, complex(3.67480188156615977, -3.35236414877190030)),
        (1000, complex(0.5, 21.022039638771556), 0.75, complex(-13.0850670685792030, -30.6509235922662724)),
        (50, complex(0.3, 2), complex(0.7, -1), complex(-3.30566199060643022, -0.111231639752501614)),
    ],
)
def test_W_against_mpmath(X, z, w, ref):
    assert abs(W_kernel(X, z, w) - ref) <= 1e-12 * abs(ref)


def test_W_singular():
    with pytest.raises(KernelSingularityError):
        W_kernel(10, 0.5, -0.5)
    with pytest.raises(KernelSingularityError):
        W_kernel(10, -2, 0.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 1), st.floats(-200, 200), st.floats(0.1, 2), st.floats(-5, 5), st.floats(2, 1e6))
def test_W_conjugate_symmetry(a, b, c, d, X):
    z, w = complex(a, b), complex(c, d)
    lhs = W_kernel(X, z.conjugate(), w.conjugate())
    rhs = np.conj(W_kernel(X, z, w))
    assert abs(lhs - rhs) <= 1e-13 * max(abs(rhs), 1e-300)


def test_W_decay_in_gamma():
    X = 1e4
    g = np.array([50.0, 200.0, 1000.0, 5000.0])
    vals = np.abs(W_kernel(X, 0.5 + 1j * g, 1))
    scaled = vals * g**2 / X**1.5
    assert np.all(scaled < 1.01) and np.all(scaled > 0.99)


@settings(max_examples=200, deadline=None)
@given(st.floats(-5000, -60), st.floats(-3000, 3000))
def test_log_gamma_branch_far_left(x, y):
    z = complex(x, y)
    if y == 0 and x == round(x):
        return
    ref = complex(mpmath.loggamma(z))
    assert abs(complex(log_gamma(z)) - ref) <= 1e-13 * max(1.0, abs(ref))
