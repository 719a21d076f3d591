import numpy as np
import pytest

from curvglyph.curves import circle, parametric_curvature
from curvglyph.features import (
    FEATURE_DIM,
    assemble_features,
    channel_images,
    curvature_map,
    extract_features,
    orientation_map,
    sobel_derivatives,
)
from curvglyph.fixtures import CENTER, constant_image, horizontal_ramp, random_smooth_images, render_disc
from curvglyph.idx import GlyphImage
from curvglyph.schemas import FeatureConfig

INTERIOR = (slice(2, -2), slice(2, -2))


def grid():
    return np.meshgrid(np.arange(28.0), np.arange(28.0), indexing="xy")  # (x, y): x = column, y = row


def test_constant_image_gives_the_flat_vector():
    flat = assemble_features(GlyphImage(pixels=constant_image(0.3))).flat
    assert flat.shape == (FEATURE_DIM,)
    expected = np.concatenate([np.zeros(784), np.zeros(784), np.full(784, 0.5)])
    np.testing.assert_array_equal(flat, expected)


@pytest.mark.parametrize("value", [0.1, 0.3, 0.7, 0.9])
def test_constant_images_have_exactly_zero_derivatives(value):
    d = sobel_derivatives(constant_image(value))
    for name in ("Ix", "Iy", "Ixx", "Iyy", "Ixy"):
        np.testing.assert_array_equal(getattr(d, name), 0.0, err_msg=name)
    np.testing.assert_array_equal(orientation_map(d), 0.5)
    maps = assemble_features(constant_image(value))
    np.testing.assert_array_equal(maps.kappa_mag, 0.0)
    np.testing.assert_array_equal(maps.kappa_sign, 0.0)


def brute_force_correlate(image, kernel):
    padded = np.pad(image, 1, mode="reflect")  # numpy "reflect" is scipy "mirror"
    out = np.zeros_like(image)
    for r in range(image.shape[0]):
        for c in range(image.shape[1]):
            out[r, c] = np.sum(kernel * padded[r : r + 3, c : c + 3])
    return out


def test_derivatives_match_a_direct_3x3_correlation():
    image = random_smooth_images(1, seed=11)[0]
    smooth, diff, second = np.array([1.0, 2.0, 1.0]), np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])
    sobel_x, sobel_xx = np.outer(smooth, diff), np.outer(smooth, second)
    d = sobel_derivatives(image, unit_gain=False)
    ix = brute_force_correlate(image, sobel_x)
    np.testing.assert_allclose(d.Ix, ix, atol=1e-12)
    np.testing.assert_allclose(d.Iy, brute_force_correlate(image, sobel_x.T), atol=1e-12)
    np.testing.assert_allclose(d.Ixx, brute_force_correlate(image, sobel_xx), atol=1e-12)
    np.testing.assert_allclose(d.Iyy, brute_force_correlate(image, sobel_xx.T), atol=1e-12)
    np.testing.assert_allclose(d.Ixy, brute_force_correlate(ix, sobel_x.T), atol=1e-12)


def test_unit_gain_derivatives_of_polynomials():
    x, y = grid()
    d = sobel_derivatives(x)
    np.testing.assert_allclose(d.Ix[INTERIOR], 1.0)
    np.testing.assert_allclose(d.Iy[INTERIOR], 0.0, atol=1e-12)

    d = sobel_derivatives(x**2)
    np.testing.assert_allclose(d.Ixx[INTERIOR], 2.0)
    np.testing.assert_allclose(d.Iyy[INTERIOR], 0.0, atol=1e-12)

    d = sobel_derivatives(x * y)
    np.testing.assert_allclose(d.Ixy[INTERIOR], 1.0)


def test_raw_kernel_gains():
    x, _ = grid()
    d = sobel_derivatives(x**2, unit_gain=False)
    np.testing.assert_allclose(d.Ixx[INTERIOR], 8.0)


def test_ramp_has_no_curvature():
    d = sobel_derivatives(horizontal_ramp())
    np.testing.assert_allclose(curvature_map(d), 0.0, atol=1e-9)
    # gradient points along +x everywhere: atan2(0, +) = 0
    np.testing.assert_allclose(orientation_map(d), 0.5)


@pytest.mark.parametrize("radius", [5, 8, 10])
def test_disc_boundary_curvature_matches_one_over_radius(radius):
    analytic = parametric_curvature(circle(radius))
    assert np.max(np.abs(analytic - 1.0 / radius)) < 1e-3

    d = sobel_derivatives(render_disc(radius))
    kappa = curvature_map(d)
    magnitude = np.hypot(d.Ix, d.Iy)
    x, y = grid()
    band = (np.abs(np.hypot(x - CENTER, y - CENTER) - radius) <= 1.0) & (magnitude >= 0.2 * magnitude.max())
    assert band.sum() > 20
    median = np.median(np.abs(kappa[band]))
    assert abs(median - 1.0 / radius) <= 0.25 / radius
    # bright disc, y axis pointing down: the rim curves negatively
    assert np.median(kappa[band]) < 0


def test_inverting_intensities_flips_curvature_sign():
    image = random_smooth_images(1, seed=9)[0]
    kappa = curvature_map(sobel_derivatives(image))
    inverted = curvature_map(sobel_derivatives(1.0 - image))
    strong = np.abs(kappa) > 1e-3 * np.abs(kappa).max()
    np.testing.assert_array_equal(np.sign(inverted[strong]), -np.sign(kappa[strong]))


@pytest.mark.parametrize("scale", [0.25, 4.0])
def test_descriptor_ignores_contrast(scale):
    image = random_smooth_images(1, seed=2)[0]
    cfg = FeatureConfig(eps=1e-30)
    base, scaled = assemble_features(image, cfg), assemble_features(image * scale, cfg)
    np.testing.assert_allclose(scaled.kappa_mag, base.kappa_mag, rtol=1e-12, atol=1e-15)
    np.testing.assert_array_equal(scaled.kappa_sign, base.kappa_sign)
    np.testing.assert_allclose(scaled.theta, base.theta, rtol=1e-12)


def test_feature_contract_on_random_glyphs():
    images = random_smooth_images(1000, seed=1)
    features = extract_features(images, chunk_size=300)
    assert features.shape == (1000, FEATURE_DIM)
    assert features.dtype == np.float32
    mag, sign, theta = features[:, :784], features[:, 784:1568], features[:, 1568:]
    assert mag.min() >= 0.0 and mag.max() <= 1.0
    assert theta.min() >= 0.0 and theta.max() <= 1.0
    assert set(np.unique(sign).tolist()) <= {-1.0, 0.0, 1.0}
    np.testing.assert_allclose(mag.max(axis=1), 1.0)


def test_chunking_does_not_change_features():
    images = random_smooth_images(5, seed=4)
    np.testing.assert_array_equal(extract_features(images, chunk_size=2), extract_features(images, chunk_size=5))


def test_sign_floor_zeroes_weak_curvature():
    image = random_smooth_images(1, seed=6)[0]
    maps = assemble_features(image, FeatureConfig(sign_floor=1e6))
    assert np.all(maps.kappa_sign == 0)


def test_pre_blur_leaves_constant_images_alone():
    maps = assemble_features(constant_image(0.8), FeatureConfig(pre_blur_sigma=1.0))
    np.testing.assert_array_equal(maps.kappa_mag, 0.0)
    np.testing.assert_array_equal(maps.theta, 0.5)


def test_channel_bytes_for_a_constant_image():
    channels = channel_images(assemble_features(constant_image()))
    assert set(channels) == {"mag", "sign", "theta"}
    assert all(c.dtype == np.uint8 and c.shape == (28, 28) for c in channels.values())
    assert np.all(channels["mag"] == 0)
    assert np.all(channels["sign"] == 128)
    assert np.all(channels["theta"] == 128)


def test_features_shift_with_the_glyph():
    image = render_disc(4)
    shifted = np.roll(image, (1, -2), axis=(0, 1))
    base, moved = assemble_features(image), assemble_features(shifted)
    np.testing.assert_array_equal(moved.kappa_mag, np.roll(base.kappa_mag, (1, -2), axis=(0, 1)))
    np.testing.assert_array_equal(moved.kappa_sign, np.roll(base.kappa_sign, (1, -2), axis=(0, 1)))
    np.testing.assert_array_equal(moved.theta, np.roll(base.theta, (1, -2), axis=(0, 1)))


def test_repeated_extraction_is_bit_identical():
    images = random_smooth_images(4, seed=13)
    first, second = extract_features(images), extract_features(images)
    assert first.tobytes() == second.tobytes()
