"""Tests for field lattices, coordinates and embed/crop."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fresnel_phase_mcp.errors import ConfigurationError
from fresnel_phase_mcp.field_grid import FieldGrid, OpticalSetup, axis, coordinate, crop, embed
from fresnel_phase_mcp.presets import desk_setup, reference_setup


@pytest.fixture
def tiny_setup():
    """2 x 2 image inside a 4 x 4 domain."""
    return OpticalSetup(wavelength=0.5, distance=8.0, pitch=1.0, image_side=2, domain_side=4)


def test_coordinate_center_is_zero():
    setup = reference_setup()
    assert coordinate(setup.domain_side // 2, setup) == 0.0


def test_coordinate_first_index():
    setup = reference_setup()
    assert setup.domain_side == 950
    assert coordinate(0, setup) == -475.0


def test_coordinate_out_of_range():
    setup = reference_setup()
    with pytest.raises(ConfigurationError):
        coordinate(setup.domain_side, setup)
    with pytest.raises(ConfigurationError):
        coordinate(-1, setup)


@given(st.integers(min_value=0, max_value=948))
def test_coordinate_strictly_increasing_with_constant_step(index):
    setup = reference_setup()
    step = coordinate(index + 1, setup) - coordinate(index, setup)
    assert step == pytest.approx(setup.pitch, rel=1e-12)


def test_axis_matches_coordinate(small_setup):
    positions = axis(small_setup)
    assert [coordinate(i, small_setup) for i in range(small_setup.domain_side)] == list(positions)


def test_reference_offset():
    setup = reference_setup()
    assert setup.offset == 219
    rows, cols = setup.image_region
    assert (rows.start, rows.stop) == (219, 731)
    assert (cols.start, cols.stop) == (219, 731)
    assert setup.domain_width == 950.0
    assert setup.image_width == 512.0


def test_embed_without_padding_is_identity(rng):
    setup = desk_setup(32, padding_factor=1.0)
    assert setup.domain_side == 32
    image = rng.uniform(size=(32, 32))
    grid = embed(image, setup, 0.7)
    np.testing.assert_array_equal(grid.samples, image)


def test_embed_small_grid(tiny_setup):
    image = np.array([[0.1, 0.2], [0.3, 0.4]])
    grid = embed(image, tiny_setup, 0.0)
    assert grid.side == 4
    np.testing.assert_array_equal(grid.samples[1:3, 1:3], image)
    border = np.ones((4, 4), dtype=bool)
    border[1:3, 1:3] = False
    assert border.sum() == 12
    assert np.all(grid.samples[border] == 0)


@settings(max_examples=50)
@given(
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_crop_inverts_embed_for_any_fill(fill, seed):
    setup = OpticalSetup(wavelength=0.5, distance=24.0, pitch=1.0, image_side=5, domain_side=12)
    image = np.random.default_rng(seed).uniform(size=(5, 5))
    grid = embed(image, setup, fill)
    np.testing.assert_array_equal(crop(grid, setup), image)
    padding = np.ones((12, 12), dtype=bool)
    padding[setup.image_region] = False
    assert np.all(grid.samples[padding] == fill)


def test_odd_padding_extra_pixel_goes_high(rng):
    setup = OpticalSetup(wavelength=0.5, distance=12.0, pitch=1.0, image_side=3, domain_side=6)
    assert setup.offset == 1
    grid = embed(rng.uniform(size=(3, 3)) + 1.0, setup, 0.0)
    assert np.all(grid.samples[4:, :] == 0)
    assert np.all(grid.samples[:1, :] == 0)


def test_embed_rejects_wrong_side(tiny_setup):
    with pytest.raises(ConfigurationError):
        embed(np.ones((3, 3)), tiny_setup)


def test_crop_rejects_wrong_side(tiny_setup):
    with pytest.raises(ConfigurationError):
        crop(FieldGrid(np.zeros((5, 5)), 1.0), tiny_setup)


def test_field_grid_invariants():
    with pytest.raises(ConfigurationError):
        FieldGrid(np.zeros((2, 3)), 1.0)
    with pytest.raises(ConfigurationError):
        FieldGrid(np.zeros((2, 2)), 0.0)
    with pytest.raises(ConfigurationError):
        FieldGrid(np.array([[np.nan, 0], [0, 0]]), 1.0)


def test_field_grid_is_immutable():
    source = np.ones((3, 3), dtype=complex)
    grid = FieldGrid(source, 1.0)
    source[0, 0] = 5
    assert grid.samples[0, 0] == 1
    with pytest.raises(ValueError):
        grid.samples[0, 0] = 2


def test_optical_setup_rejects_inconsistent_domain():
    with pytest.raises(ConfigurationError):
        OpticalSetup(wavelength=0.633, distance=1500.0, pitch=1.0, image_side=512, domain_side=1024)
    with pytest.raises(ConfigurationError):
        OpticalSetup(wavelength=0.5, distance=8.0, pitch=1.0, image_side=5, domain_side=4)
    with pytest.raises(ConfigurationError):
        OpticalSetup(wavelength=-0.5, distance=8.0, pitch=1.0, image_side=2, domain_side=4)
