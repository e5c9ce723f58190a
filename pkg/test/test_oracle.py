"""Tests comparing the FFT transform with the direct summation."""

import numpy as np
import pytest

from fresnel_phase_mcp.errors import ConfigurationError
from fresnel_phase_mcp.field_grid import FieldGrid
from fresnel_phase_mcp.fresnel import build_kernel, frt, ifrt
from fresnel_phase_mcp.oracle import OracleConfig, direct_fresnel, direct_inverse_fresnel
from fresnel_phase_mcp.presets import desk_setup, reference_setup


def random_field(rng, side):
    return FieldGrid(rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side)), 1.0)


def relative_error(reference, estimate):
    return np.abs(reference - estimate).max() / np.abs(reference).max()


@pytest.mark.parametrize("domain_side", [8, 16, 32])
def test_fft_matches_direct_sum(rng, domain_side):
    setup = desk_setup(domain_side // 2)
    assert setup.domain_side == domain_side
    config = OracleConfig(setup)
    kernel = build_kernel(setup)
    for _ in range(20):
        u = random_field(rng, domain_side)
        assert relative_error(direct_fresnel(u, config).samples, frt(u, kernel).samples) <= 1e-8


def test_inverse_fft_matches_direct_sum(rng):
    setup = desk_setup(8)
    config = OracleConfig(setup)
    kernel = build_kernel(setup)
    u = random_field(rng, 16)
    assert relative_error(direct_inverse_fresnel(u, config).samples, ifrt(u, kernel).samples) <= 1e-8


def test_direct_sums_invert_each_other(rng):
    config = OracleConfig(desk_setup(8))
    u = random_field(rng, 16)
    back = direct_inverse_fresnel(direct_fresnel(u, config), config)
    assert relative_error(u.samples, back.samples) <= 1e-10


def test_centre_impulse_has_constant_modulus():
    setup = desk_setup(8)
    samples = np.zeros((16, 16), dtype=complex)
    samples[8, 8] = 1.0
    out = direct_fresnel(FieldGrid(samples, 1.0), OracleConfig(setup)).samples
    np.testing.assert_allclose(np.abs(out), abs(build_kernel(setup).prefactor), rtol=1e-12)


def test_zero_field():
    out = direct_fresnel(FieldGrid(np.zeros((8, 8)), 1.0), OracleConfig(desk_setup(4)))
    assert np.all(out.samples == 0)


def test_oracle_refuses_large_domains():
    with pytest.raises(ConfigurationError):
        OracleConfig(reference_setup())


def test_oracle_rejects_side_mismatch():
    with pytest.raises(ConfigurationError):
        direct_fresnel(FieldGrid(np.zeros((4, 4)), 1.0), OracleConfig(desk_setup(4)))
