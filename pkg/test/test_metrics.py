"""Tests for correlation and maximal error."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fresnel_phase_mcp.errors import ConfigurationError
from fresnel_phase_mcp.metrics import correlation, max_error_percent

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_identical_arrays():
    a = np.arange(16.0).reshape(4, 4)
    assert correlation(a, a) == pytest.approx(1.0, abs=1e-15)


def test_anti_correlated():
    a = np.arange(16.0).reshape(4, 4)
    assert correlation(a, -a) == pytest.approx(-1.0, abs=1e-15)


def test_affine_example():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert correlation(a, 2 * a + 3) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_matches_numpy(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(size=(8, 8)), rng.uniform(size=(8, 8))
    assert correlation(a, b) == pytest.approx(np.corrcoef(a.ravel(), b.ravel())[0, 1], abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(seeds, st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=-5.0, max_value=5.0))
def test_affine_invariance(seed, scale, shift):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(size=(8, 8)), rng.uniform(size=(8, 8))
    assert correlation(scale * a + shift, b) == pytest.approx(correlation(a, b), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(6, 6)), rng.normal(size=(6, 6))
    assert correlation(a, b) == correlation(b, a)
    assert abs(correlation(a, b)) <= 1 + 1e-12


def test_constant_array_rejected():
    with pytest.raises(ConfigurationError):
        correlation(np.ones((3, 3)), np.arange(9.0).reshape(3, 3))


@pytest.mark.parametrize("value", [0.1, 0.7, 1 / 3, 1.0])
def test_constant_image_rejected_despite_rounded_mean(value):
    constant = np.full((512, 512), value)
    other = np.random.default_rng(7).uniform(size=(512, 512))
    with pytest.raises(ConfigurationError):
        correlation(constant, other)
    with pytest.raises(ConfigurationError):
        correlation(other, constant)


def test_shape_mismatch_rejected():
    with pytest.raises(ConfigurationError):
        correlation(np.ones((3, 3)), np.ones((2, 2)))


def test_max_error_percent():
    reference = np.array([[0.5, 1.0], [0.25, 0.0]])
    assert max_error_percent(reference, reference) == 0.0
    estimate = reference.copy()
    estimate[0, 1] = 0.9
    assert max_error_percent(reference, estimate) == pytest.approx(10.0, rel=1e-12)


def test_max_error_needs_nonzero_reference():
    with pytest.raises(ConfigurationError):
        max_error_percent(np.zeros((2, 2)), np.ones((2, 2)))
