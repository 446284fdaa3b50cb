import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from refreshalloc import DomainError, lambert_w0, lambert_w0_array

# omega constant, from 200 bisection steps on w*exp(w) = 1 at 40 digits
OMEGA = 0.5671432904097838


def _bisect_w(x):
    lo, hi = 0.0, max(1.0, math.log1p(x))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) < x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (math.e, 1.0), (1.0, OMEGA)])
def test_known_values(x, expected):
    r = lambert_w0(x)
    assert r.value == pytest.approx(expected, rel=1e-15, abs=1e-300)
    assert r.residual <= 1e-12 * max(1.0, x)


def test_zero_needs_no_iterations():
    assert lambert_w0(0.0).iterations == 0


def test_halley_converges_fast():
    for x in np.geomspace(1e-12, 1e12, 50):
        assert lambert_w0(x).iterations <= 8


@pytest.mark.parametrize("bad", [-1e-300, -1.0, math.inf, math.nan])
def test_domain(bad):
    with pytest.raises(DomainError):
        lambert_w0(bad)
    with pytest.raises(DomainError):
        lambert_w0_array([1.0, bad])


@given(st.floats(min_value=0.0, max_value=1e12, allow_nan=False))
def test_identity_and_bisection_oracle(x):
    r = lambert_w0(x)
    assert r.value >= 0.0
    assert abs(r.value * math.exp(r.value) - x) <= 1e-12 * max(1.0, x)
    assert r.value == pytest.approx(_bisect_w(x), rel=1e-12, abs=1e-15)


def test_matches_scipy():
    from scipy.special import lambertw

    x = np.geomspace(1e-20, 1e15, 400)
    np.testing.assert_allclose(lambert_w0_array(x), lambertw(x).real, rtol=1e-13)


@given(st.floats(min_value=0.0, max_value=50.0))
def test_round_trip(w):
    assert lambert_w0(w * math.exp(w)).value == pytest.approx(w, rel=1e-12, abs=1e-300)


def test_monotone_on_sorted_sample():
    rng = np.random.default_rng(3)
    x = np.sort(10.0 ** rng.uniform(-10, 12, 5000))
    w = lambert_w0_array(x)
    assert np.all(np.diff(w) >= 0)


def test_scalar_and_array_agree():
    x = np.geomspace(1e-8, 1e10, 97)
    np.testing.assert_allclose(lambert_w0_array(x), [lambert_w0(v).value for v in x], rtol=4e-16)


def test_huge_argument_no_overflow():
    r = lambert_w0(1e300)
    assert math.isfinite(r.value)
    assert r.residual <= 1e-12 * 1e300
