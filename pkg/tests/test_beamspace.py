import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beampredict.beamspace import (ArrayConfig, ComplexChannel, angle_to_bin, assemble_channel, dft_codebook,
                                   effective_channel, steering_vector)
from beampredict.errors import DimensionMismatch, EmptyPathList
from beampredict.scene import PathRecord

from oracles import channel_entrywise, steering_entry

angles = st.floats(0.0, 2 * math.pi, exclude_max=True)


def arr(n):
    return ArrayConfig.half_wavelength(n)


def test_default_spacing_is_half_wavelength():
    a = ArrayConfig(8)
    assert a.element_spacing == pytest.approx(a.wavelength / 2, rel=1e-15)


@pytest.mark.parametrize("bad", [dict(num_elements=0), dict(num_elements=4, element_spacing=0.0),
                                 dict(num_elements=4, wavelength=-1.0)])
def test_array_config_rejects_invalid(bad):
    with pytest.raises(ValueError):
        ArrayConfig(**bad)


def test_steering_vector_broadside():
    np.testing.assert_allclose(steering_vector(arr(4), 0.0), 0.5 * np.ones(4), atol=1e-15)


def test_steering_vector_endfire_alternates():
    v = steering_vector(arr(2), math.pi / 2)
    np.testing.assert_allclose(v, np.array([1, -1]) / math.sqrt(2), atol=1e-15)


def test_steering_vector_matches_elementwise_formula():
    a = arr(8)
    expected = np.array([steering_entry(8, a.element_spacing, a.wavelength, 0.4, k) for k in range(8)])
    assert np.max(np.abs(steering_vector(a, 0.4) - expected)) < 1e-12


@given(angles, st.integers(1, 64))
def test_steering_vector_unit_norm(angle, n):
    assert abs(np.linalg.norm(steering_vector(arr(n), angle)) - 1) < 1e-12


def test_dft_codebook_small_cases():
    np.testing.assert_allclose(dft_codebook(arr(1)).columns, [[1.0]])
    np.testing.assert_allclose(dft_codebook(arr(2)).columns, np.array([[1, 1], [1, -1]]) / math.sqrt(2),
                               atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 10, 64, 100])
def test_dft_codebook_unitary(n):
    w = dft_codebook(arr(n)).columns
    assert np.max(np.abs(w.conj().T @ w - np.eye(n))) < 1e-10
    assert np.max(np.abs(np.linalg.norm(w, axis=0) - 1)) < 1e-12


def test_codebook_columns_are_on_grid_steering_vectors():
    n = 16
    w = dft_codebook(arr(n)).columns
    for col in range(n):
        s = 2 * col / n if col < n / 2 else 2 * (col - n) / n
        np.testing.assert_allclose(w[:, col], steering_vector(arr(n), math.asin(s)), atol=1e-12)


@pytest.mark.parametrize("n,angle,expected", [
    (100, 0.0, 0),
    (100, math.pi / 6, 25),
    (100, math.pi + 0.02, 99),
    (10, math.pi / 2, 5),
    (10, 3 * math.pi / 2, 5),
])
def test_angle_to_bin_examples(n, angle, expected):
    assert angle_to_bin(n, angle) == expected


def test_angle_to_bin_rounds_half_to_even():
    # N sin/2 = 0.5 and 1.5 exactly
    assert angle_to_bin(4, math.asin(0.25)) == 0
    assert angle_to_bin(4, math.asin(0.75)) == 2


@given(angles, st.integers(1, 200))
def test_angle_to_bin_front_back_symmetry(angle, n):
    mirrored = (math.pi - angle) % (2 * math.pi)
    frac = (n * math.sin(angle) / 2) % 1.0
    if abs(frac - 0.5) > 1e-9:  # rounding ties may flip under float error
        assert angle_to_bin(n, angle) == angle_to_bin(n, mirrored)


def test_angle_to_bin_vectorized():
    a = np.array([0.0, math.pi / 6, math.pi + 0.02])
    np.testing.assert_array_equal(angle_to_bin(100, a), [0, 25, 99])


def _path(theta, phi, tau=1e-7, rss=0.0):
    return PathRecord(rss, tau, theta, phi, 0)


def test_assemble_single_path_integer_cycles():
    f = 28e9
    tau = 100 / f
    bs, ms = arr(8), arr(4)
    h = assemble_channel([_path(0.3, 1.1, tau)], bs, ms, f, gains=[1.0])
    expected = np.outer(steering_vector(bs, 0.3), steering_vector(ms, 1.1).conj())
    np.testing.assert_allclose(h.matrix, expected, atol=1e-9)


def test_assemble_cancelling_paths():
    p = _path(0.2, 0.5)
    h = assemble_channel([p, p], arr(6), arr(3), 28e9, gains=[0.7 - 0.2j, -0.7 + 0.2j])
    assert np.max(np.abs(h.matrix)) < 1e-15


def test_assemble_matches_entrywise_oracle(rng):
    bs, ms, f = arr(6), arr(4), 28e9
    aoa, aod = rng.uniform(0, 2 * np.pi, 3), rng.uniform(0, 2 * np.pi, 3)
    tau = rng.uniform(1e-7, 1e-6, 3)
    gains = rng.normal(size=3) + 1j * rng.normal(size=3)
    paths = [_path(a, b, t) for a, b, t in zip(aoa, aod, tau)]
    h = assemble_channel(paths, bs, ms, f, gains=gains).matrix
    ref = channel_entrywise(gains, aoa, aod, tau, 6, 4, bs.element_spacing, bs.wavelength, f)
    assert abs(np.linalg.norm(h) - np.linalg.norm(ref)) / np.linalg.norm(ref) < 1e-12
    assert np.max(np.abs(h - ref)) < 1e-12 * np.max(np.abs(ref)) * 10


def test_assemble_draws_magnitudes_from_rss():
    paths = [_path(0.0, 0.0, 1e-7, rss=-20.0)]
    h = assemble_channel(paths, arr(1), arr(1), 28e9, rng=np.random.default_rng(3))
    assert abs(abs(h.matrix[0, 0]) - 0.1) < 1e-12


def test_assemble_errors():
    with pytest.raises(EmptyPathList):
        assemble_channel([], arr(2), arr(2), 28e9)
    with pytest.raises(DimensionMismatch):
        assemble_channel([_path(0, 0)], arr(2), arr(2), 28e9, gains=[1, 2])


def test_effective_channel_of_zero_is_zero():
    out = effective_channel(np.zeros((8, 4)), dft_codebook(arr(8)), dft_codebook(arr(4)))
    assert np.all(out == 0)


@pytest.mark.parametrize("n_r,n_t", [(0, 0), (3, 1), (6, 3), (1, 2)])
def test_effective_channel_on_grid_single_entry(n_r, n_t):
    n_bs, n_ms = 8, 4
    s_r = 2 * n_r / n_bs if n_r < n_bs / 2 else 2 * (n_r - n_bs) / n_bs
    s_t = 2 * n_t / n_ms if n_t < n_ms / 2 else 2 * (n_t - n_ms) / n_ms
    theta, phi = math.asin(s_r) % (2 * math.pi), math.asin(s_t) % (2 * math.pi)
    alpha = 0.3 * np.exp(0.7j)
    h = assemble_channel([_path(theta, phi)], arr(n_bs), arr(n_ms), 28e9, gains=[alpha])
    eff = effective_channel(h, dft_codebook(arr(n_bs)), dft_codebook(arr(n_ms)))
    big = np.argwhere(np.abs(eff) > 1e-9)
    assert big.tolist() == [[angle_to_bin(n_bs, theta), angle_to_bin(n_ms, phi)]]
    assert abs(abs(eff[n_r, n_t]) - abs(alpha)) < 1e-12


def test_effective_channel_preserves_frobenius_norm(rng):
    for _ in range(20):
        h = rng.normal(size=(10, 5)) + 1j * rng.normal(size=(10, 5))
        eff = effective_channel(ComplexChannel(h, 28e9), dft_codebook(arr(10)), dft_codebook(arr(5)))
        assert abs(np.linalg.norm(eff) - np.linalg.norm(h)) < 1e-9


def test_effective_channel_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        effective_channel(np.zeros((4, 4)), dft_codebook(arr(8)), dft_codebook(arr(4)))
