import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from decompfnn.transforms import (
    SpectralCoefficients,
    dct_forward,
    dct_inverse,
    dct_smooth,
    kept_count_for,
    truncate_high_freq,
)
from tests.oracles import naive_dct, naive_idct

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
signals = arrays(np.float64, st.integers(1, 300), elements=finite)


@pytest.mark.parametrize("N", [1, 2, 7, 32])
def test_constant_signal_has_only_dc(N):
    c = 3.25
    y = dct_forward(np.full(N, c)).values
    assert y[0] == pytest.approx(c * math.sqrt(N), rel=1e-12)
    np.testing.assert_allclose(y[1:], 0.0, atol=1e-12)


def test_two_sample_hand_value():
    y = dct_forward([1.0, 0.0])
    np.testing.assert_allclose(y.values, [0.7071068, 0.7071068], atol=1e-7)
    assert y.kept_count == 3 and y.source_length == 2


def test_matches_naive_sum_length_64():
    x = np.random.default_rng(0).normal(size=64)
    np.testing.assert_allclose(dct_forward(x).values, naive_dct(x), rtol=0, atol=1e-10)


def test_forward_rejects_bad_input():
    with pytest.raises(ValueError):
        dct_forward([])
    with pytest.raises(ValueError):
        dct_forward([1.0, np.nan])
    with pytest.raises(ValueError):
        dct_forward([1.0, np.inf])


def test_inverse_of_dc_only_spectrum():
    N = 10
    c = SpectralCoefficients(np.r_[5.0, np.zeros(N - 1)], N + 1, N)
    np.testing.assert_allclose(dct_inverse(c), 5.0 / math.sqrt(N), rtol=1e-13)


def test_inverse_of_truncated_two_tone_matches_naive():
    t = np.arange(200)
    x = np.sin(2 * np.pi * 0.02 * t) + 0.3 * np.sin(2 * np.pi * 0.35 * t)
    c = truncate_high_freq(dct_forward(x), 60)
    np.testing.assert_allclose(dct_inverse(c), naive_idct(c.values), rtol=0, atol=1e-10)


def test_inverse_rejects_empty():
    class Empty:
        values = np.array([])

    with pytest.raises(ValueError):
        dct_inverse(Empty())


def test_round_trip_long_signal():
    x = np.random.default_rng(1).normal(scale=1e3, size=4096)
    assert np.max(np.abs(dct_inverse(dct_forward(x)) - x)) <= 1e-9 * max(1.0, np.abs(x).max())


def test_truncation_arithmetic_p10_lambda80():
    c = dct_forward(np.arange(1.0, 11.0))
    tr = truncate_high_freq(c, 80)
    assert tr.kept_count == 3
    np.testing.assert_array_equal(tr.values[:2], c.values[:2])
    np.testing.assert_array_equal(tr.values[2:], 0.0)


def test_lambda_zero_is_identity():
    c = dct_forward(np.random.default_rng(2).normal(size=50))
    tr = truncate_high_freq(c, 0)
    assert tr.kept_count == 51
    np.testing.assert_array_equal(tr.values, c.values)


def test_sse_length_with_lambda85():
    assert kept_count_for(2218, 85) == 333
    c = SpectralCoefficients(np.ones(2218), 2219, 2218)
    tr = truncate_high_freq(c, 85)
    assert np.all(tr.values[:332] == 1.0)
    assert np.all(tr.values[332:] == 0.0)


@pytest.mark.parametrize("lam", [-0.1, 100.5, float("nan")])
def test_lambda_out_of_range(lam):
    with pytest.raises(ValueError):
        truncate_high_freq(dct_forward([1.0, 2.0]), lam)


def test_lambda_100_zeroes_everything():
    assert kept_count_for(10, 100) == 1
    np.testing.assert_array_equal(dct_smooth(np.arange(1.0, 11.0), 100), 0.0)


def test_smooth_lambda_zero_returns_input_exactly():
    x = np.random.default_rng(3).normal(size=77)
    np.testing.assert_array_equal(dct_smooth(x, 0), x)


def test_coefficients_validate_shape():
    with pytest.raises(ValueError):
        SpectralCoefficients(np.ones(3), 1, 4)
    with pytest.raises(ValueError):
        SpectralCoefficients(np.ones(3), 5, 3)


@settings(max_examples=60, deadline=None)
@given(signals)
def test_round_trip_property(x):
    err = np.max(np.abs(dct_inverse(dct_forward(x)) - x))
    assert err <= 1e-9 * max(1.0, np.abs(x).max())


@settings(max_examples=60, deadline=None)
@given(signals)
def test_parseval(x):
    y = dct_forward(x).values
    ex, ey = float(x @ x), float(y @ y)
    assert abs(ex - ey) <= 1e-9 * max(ex, 1e-300)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 200).flatmap(lambda n: st.tuples(
    arrays(np.float64, n, elements=st.floats(-100, 100)),
    arrays(np.float64, n, elements=st.floats(-100, 100)),
)), st.floats(-10, 10), st.floats(-10, 10))
def test_linearity(xz, a, b):
    x, z = xz
    lhs = dct_forward(a * x + b * z).values
    rhs = a * dct_forward(x).values + b * dct_forward(z).values
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-10 * max(1.0, np.abs(lhs).max()))


@settings(max_examples=60, deadline=None)
@given(signals, st.floats(0, 100))
def test_truncation_idempotent(x, lam):
    once = truncate_high_freq(dct_forward(x), lam)
    twice = truncate_high_freq(once, lam)
    np.testing.assert_array_equal(once.values, twice.values)
    n = once.kept_count
    assert np.all(once.values[n - 1 :] == 0.0)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.integers(2, 200), elements=finite))
def test_energy_non_increasing_in_lambda(x):
    energies = [float(np.sum(dct_smooth(x, lam) ** 2)) for lam in np.linspace(0, 100, 21)]
    for a, b in zip(energies, energies[1:]):
        assert b <= a * (1 + 1e-9) + 1e-9
