import math

import mpmath
import numpy as np
import pytest

from fraccalc.special import beta_fn, gamma_fn, log_gamma_fn, rgamma

XS = [1e-6, 0.01, 0.1, 0.25, 0.5, 0.7, 1.0, 1.5, 2.0, 3.3, 7.5, 20.0, 50.0]


@pytest.mark.parametrize("x", XS)
def test_gamma_matches_mpmath(x):
    ref = float(mpmath.gamma(x))
    assert gamma_fn(x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("x", XS)
def test_log_gamma_matches_mpmath(x):
    ref = float(mpmath.loggamma(x))
    assert log_gamma_fn(x) == pytest.approx(ref, rel=1e-12, abs=1e-13)


def test_known_values():
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-14)


def test_recurrence_on_a_sweep():
    x = np.linspace(0.05, 10.0, 400)
    assert np.allclose(gamma_fn(x + 1.0), x * gamma_fn(x), rtol=1e-12)


def test_array_and_scalar_agree():
    x = np.array([0.3, 1.7, 4.2])
    arr = gamma_fn(x)
    assert isinstance(gamma_fn(0.3), float)
    assert np.allclose(arr, [gamma_fn(v) for v in x], rtol=0, atol=0)


def test_beta_and_rgamma():
    assert beta_fn(0.5, 0.5) == pytest.approx(math.pi, rel=1e-13)
    assert beta_fn(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-13)
    assert rgamma(0.5) == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-13)


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
def test_rejects_non_positive(bad):
    with pytest.raises(ValueError):
        gamma_fn(bad)
