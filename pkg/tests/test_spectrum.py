"""Two-frequency transform and band-estimation tests."""

import numpy as np
import pytest

from conftest import random_kernel
from ptv import (EmptySignal, GridTooSmall, InvalidArgument, Signal, build_modulator,
                 discretize, hybrid_transform, identity_kernel,
                 inverse_hybrid_transform, lift_lti, linear_band_estimate, output_band,
                 signal_band, sin_harmonics, variation_band_estimate)


def test_modulator_energy_sits_at_first_harmonic():
    kernel = discretize(build_modulator(sin_harmonics(), 16.0), 1.0, (0, 0))
    spectrum = hybrid_transform(kernel, 64)
    mags = np.abs(spectrum.values[0, 0])
    for ki, k in enumerate(spectrum.harmonic_axis):
        if abs(k) == 1:
            assert np.allclose(mags[ki], 8.0, atol=1e-12), f"harmonic {k}"
        else:
            assert np.max(mags[ki]) < 1e-12, f"harmonic {k}"


def test_parseval_energy_identity():
    rng = np.random.default_rng(21)
    for trial in range(40):
        kernel = random_kernel(rng, int(rng.integers(1, 3)), int(rng.integers(1, 3)),
                               int(rng.integers(1, 6)), int(rng.integers(-3, 1)),
                               int(rng.integers(0, 4)))
        grid = int(rng.integers(kernel.taps.shape[3], 40))
        spectrum = hybrid_transform(kernel, grid)
        lhs = np.sum(np.abs(spectrum.values) ** 2)
        rhs = kernel.period * grid * np.sum(kernel.taps ** 2)
        assert abs(lhs - rhs) <= 1e-9 * max(rhs, 1.0), f"trial {trial}"


def test_round_trip_recovers_taps():
    rng = np.random.default_rng(22)
    for trial in range(25):
        kernel = random_kernel(rng, 2, 1, int(rng.integers(1, 5)),
                               int(rng.integers(-4, 0)), int(rng.integers(0, 4)))
        back = inverse_hybrid_transform(hybrid_transform(kernel, 32))
        assert back.period == kernel.period
        assert np.max(np.abs(back.taps - kernel.taps)) < 1e-12, f"trial {trial}"


def test_variation_band_estimates():
    mod = discretize(build_modulator(sin_harmonics(), 8.0), 1.0, (0, 0))
    assert variation_band_estimate(hybrid_transform(mod, 16)) == 1
    flat = identity_kernel(period=8)
    assert variation_band_estimate(hybrid_transform(flat, 16)) == 0
    squared = discretize(build_modulator({0: 0.5, 2: 0.25, -2: 0.25}, 8.0), 1.0, (0, 0))
    assert variation_band_estimate(hybrid_transform(squared, 16)) == 2


def test_linear_band_narrows_with_smoothing():
    flat = identity_kernel()
    assert linear_band_estimate(hybrid_transform(flat, 64)) == 0.5
    boxcar = lift_lti(np.full(8, 1.0 / 8.0), period=1)
    smooth = linear_band_estimate(hybrid_transform(boxcar, 64), energy_tol=1e-2)
    assert smooth < 0.3, f"boxcar band {smooth} not narrowed"


def test_grid_must_cover_window():
    kernel = random_kernel(np.random.default_rng(23), 1, 1, 2, 0, 9)
    with pytest.raises(GridTooSmall):
        hybrid_transform(kernel, 8)
    hybrid_transform(kernel, 10)  # exactly the window is allowed


def test_threading_does_not_change_values():
    rng = np.random.default_rng(24)
    kernel = random_kernel(rng, 3, 2, 4, -2, 3)
    a = hybrid_transform(kernel, 32, threads=1)
    b = hybrid_transform(kernel, 32, threads=3)
    assert np.array_equal(a.values, b.values)


def test_output_band_arithmetic():
    assert output_band(0.1, 2, 4.0) == 0.1 + 0.5
    class A:  # duck-typed variation report
        value = 3
    assert output_band(0.0, A(), 2.0) == 1.5
    with pytest.raises(InvalidArgument):
        output_band(-0.1, 1, 1.0)


def test_signal_band_of_tone():
    n = 1024
    tone = np.sin(2.0 * np.pi * 0.21 * np.arange(n))
    band = signal_band(Signal(tone[None, :]), energy_tol=1e-3)
    assert abs(band - 0.21) <= 2.0 / n
    # with a physical rate the answer converts to Hz
    hz = signal_band(Signal(tone[None, :], 1e-3), energy_tol=1e-3)
    assert abs(hz - 210.0) <= 2.0 / (n * 1e-3)
    with pytest.raises(EmptySignal):
        signal_band(Signal(np.zeros((1, 0))))


def test_spectrum_axes_shapes():
    kernel = random_kernel(np.random.default_rng(25), 1, 1, 6, -1, 2)
    spectrum = hybrid_transform(kernel, 24)
    assert spectrum.values.shape == (1, 1, 6, 24)
    assert list(spectrum.harmonic_axis) == [-3, -2, -1, 0, 1, 2]
    assert spectrum.freq_axis[0] == -0.5
    assert spectrum.grid_size == 24
    assert spectrum.period == 6
