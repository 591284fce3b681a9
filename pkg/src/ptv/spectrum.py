"""Hybrid Fourier analysis of periodic kernels.

The phase axis of a periodic kernel is genuinely periodic, so its natural
transform is a Fourier *series* (a plain DFT over the ``K`` phases); the lag
axis is aperiodic, so its natural transform is a Fourier *transform*,
approximated on a zero-padded ``L``-point grid.  Together they map the tap
tensor to

    values[i, j, k, l] = sum_p sum_m taps[i, j, p, m]
                         * exp(-j 2 pi (k p / K + f_l m))

with integer harmonics ``k`` in ``[-floor(K/2), ceil(K/2))`` and normalized
frequencies ``f_l = (l - L//2) / L`` in cycles per sample.  The harmonic
axis tells how fast the system's behaviour rotates within a period — a
system flat across phases puts everything at ``k = 0``, and content at
harmonic ``k`` translates input spectra by ``k / K`` — while the frequency
axis is the ordinary transfer response in the lag direction.

Both directions are unitary up to the usual DFT factor, so tap energy and
spectral energy agree after dividing by ``K * L``; the estimators below use
that to find energy-concentration bandwidths, the numeric stand-in for
ideal "support" bandwidths that floating-point kernels never have.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EmptySignal, GridTooSmall, InvalidArgument
from .kernel import PeriodicKernel, Signal

#: Default zero-padding factor for the frequency axis, in lag-window lengths.
DEFAULT_PAD_FACTOR = 8


@dataclass(frozen=True)
class HybridSpectrum:
    """Hybrid transform values on the (harmonic, frequency) grid.

    ``lag_min``/``lag_max`` record the source window so the transform can be
    inverted (the zero-padding is truncated back); ``sample_period_s`` tags
    physical kernels so frequencies can be reported in Hz.
    """

    values: np.ndarray
    harmonic_axis: np.ndarray
    freq_axis: np.ndarray
    lag_min: int
    lag_max: int
    sample_period_s: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 4:
            raise InvalidArgument(f"values must be 4-dimensional, got shape {values.shape}")
        harmonic = np.asarray(self.harmonic_axis, dtype=int)
        freq = np.asarray(self.freq_axis, dtype=np.float64)
        if harmonic.shape != (values.shape[2],) or freq.shape != (values.shape[3],):
            raise InvalidArgument("axis lengths do not match the value tensor")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "harmonic_axis", harmonic)
        object.__setattr__(self, "freq_axis", freq)
        object.__setattr__(self, "lag_min", int(self.lag_min))
        object.__setattr__(self, "lag_max", int(self.lag_max))

    @property
    def n_out(self) -> int:
        return self.values.shape[0]

    @property
    def n_in(self) -> int:
        return self.values.shape[1]

    @property
    def period(self) -> int:
        return self.values.shape[2]

    @property
    def grid_size(self) -> int:
        return self.values.shape[3]


def hybrid_transform(kernel: PeriodicKernel, freq_grid_size: int | None = None,
                     threads: int = 1) -> HybridSpectrum:
    """Transform a kernel's taps to the hybrid (harmonic, frequency) grid.

    ``freq_grid_size`` defaults to ``DEFAULT_PAD_FACTOR`` times the lag
    window length and must be at least the window length, else the placed
    taps would alias.  Entries are independent, so ``threads > 1`` fans the
    per-entry FFTs over a thread pool (identical results, any thread
    count).
    """
    window = kernel.taps.shape[3]
    grid = DEFAULT_PAD_FACTOR * window if freq_grid_size is None else int(freq_grid_size)
    if grid < window:
        raise GridTooSmall(f"freq grid {grid} is shorter than the lag window {window}")
    period = kernel.period
    harmonic_axis = np.arange(period) - period // 2
    freq_axis = (np.arange(grid) - grid // 2) / grid
    # Taps at lag m go to padded slot mod(m, grid): the DFT factor
    # exp(-j 2 pi f_l m) is periodic in m with period `grid` on this f grid,
    # so the wrap is exact, not an approximation.
    padded = np.zeros(kernel.taps.shape[:3] + (grid,))
    padded[:, :, :, kernel.lags % grid] = kernel.taps

    def entry_transform(ij):
        i, j = ij
        return i, j, np.fft.fftshift(np.fft.fftn(padded[i, j], axes=(0, 1)))

    values = np.empty((kernel.n_out, kernel.n_in, period, grid), dtype=complex)
    pairs = [(i, j) for i in range(kernel.n_out) for j in range(kernel.n_in)]
    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, j, block in pool.map(entry_transform, pairs):
                values[i, j] = block
    else:
        for i, j in pairs:
            _, _, values[i, j] = entry_transform((i, j))
    return HybridSpectrum(values, harmonic_axis, freq_axis, kernel.lag_min, kernel.lag_max,
                          kernel.sample_period_s)


def inverse_hybrid_transform(spectrum: HybridSpectrum) -> PeriodicKernel:
    """Invert :func:`hybrid_transform`: inverse DFT over both axes, then
    truncate the zero-padded lag axis back to the recorded window."""
    unshifted = np.fft.ifftshift(spectrum.values, axes=(2, 3))
    dense = np.fft.ifftn(unshifted, axes=(2, 3))
    lags = np.arange(spectrum.lag_min, spectrum.lag_max + 1)
    taps = dense[:, :, :, lags % spectrum.grid_size].real
    return PeriodicKernel(taps, spectrum.lag_min, spectrum.sample_period_s)


def variation_band_estimate(spectrum: HybridSpectrum, energy_tol: float = 1e-9) -> int:
    """Smallest harmonic radius ``A`` with at least ``1 - energy_tol`` of
    the spectral energy in ``|k| <= A``."""
    if not 0.0 < energy_tol < 1.0:
        raise InvalidArgument(f"energy_tol must be in (0, 1), got {energy_tol!r}")
    energy_per_k = np.sum(np.abs(spectrum.values) ** 2, axis=(0, 1, 3))
    total = float(energy_per_k.sum())
    if total == 0.0:
        return 0
    radii = np.abs(spectrum.harmonic_axis)
    for a in range(int(radii.max()) + 1):
        if energy_per_k[radii <= a].sum() >= (1.0 - energy_tol) * total:
            return a
    return int(radii.max())


def linear_band_estimate(spectrum: HybridSpectrum, energy_tol: float = 1e-9) -> float:
    """Smallest normalized frequency ``B`` with at least ``1 - energy_tol``
    of the spectral energy in ``|f| <= B``."""
    if not 0.0 < energy_tol < 1.0:
        raise InvalidArgument(f"energy_tol must be in (0, 1), got {energy_tol!r}")
    energy_per_f = np.sum(np.abs(spectrum.values) ** 2, axis=(0, 1, 2))
    total = float(energy_per_f.sum())
    if total == 0.0:
        return 0.0
    radii = np.abs(spectrum.freq_axis)
    order = np.argsort(radii, kind="stable")
    cumulative = np.cumsum(energy_per_f[order])
    idx = np.searchsorted(cumulative, (1.0 - energy_tol) * total)
    idx = min(idx, len(order) - 1)
    return float(radii[order][idx])


def output_band(input_band: float, variation, period_s: float) -> float:
    """Widest frequency a periodic system can produce: input band plus the
    harmonic shift ``A / T``.  ``variation`` may be a plain integer or
    anything with a ``value`` attribute (e.g. ``continuous.VariationBand``)."""
    a = getattr(variation, "value", variation)
    if input_band < 0 or a < 0:
        raise InvalidArgument("bands must be non-negative")
    if not period_s > 0:
        raise InvalidArgument(f"period_s must be positive, got {period_s!r}")
    return input_band + a / period_s


def signal_band(signal: Signal, energy_tol: float = 1e-9) -> float:
    """Energy-concentration bandwidth of a signal: smallest ``B`` with at
    least ``1 - energy_tol`` of the FFT energy in ``|f| <= B``.  Returned
    in Hz when the signal has a physical rate, cycles/sample otherwise."""
    if not 0.0 < energy_tol < 1.0:
        raise InvalidArgument(f"energy_tol must be in (0, 1), got {energy_tol!r}")
    n = signal.n_samples
    if n == 0:
        raise EmptySignal("signal_band needs at least one sample")
    transform = np.fft.fft(signal.data, axis=1)
    energy_per_f = np.sum(np.abs(transform) ** 2, axis=0)
    total = float(energy_per_f.sum())
    if total == 0.0:
        return 0.0
    freqs = np.fft.fftfreq(n)
    radii = np.abs(freqs)
    order = np.argsort(radii, kind="stable")
    cumulative = np.cumsum(energy_per_f[order])
    idx = np.searchsorted(cumulative, (1.0 - energy_tol) * total)
    idx = min(idx, n - 1)
    band = float(radii[order][idx])
    if signal.sample_period_s is not None:
        return band / signal.sample_period_s
    return band
