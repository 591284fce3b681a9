"""Discrete-time periodically time-variant (DTPTV) kernels and signals.

A DTPTV system with ``n_out`` outputs, ``n_in`` inputs, period ``K`` and lag
window ``[lag_min, lag_max]`` maps a multichannel input ``x`` to

    y_i[n] = sum_j sum_m  H[i, j, mod(n, K), m] * x_j[n - m]

where the third index is the temporal phase of the output sample and the
fourth is the lag.  A kernel with ``K == 1`` is an ordinary (time-invariant)
multichannel FIR filter; larger periods let the tap set rotate while staying
linear.  Lags may be negative: analysis-side kernels (fractional-delay sinc
tails, inverses of delays, serialized multichannel systems) are non-causal by
nature, so causality is a queryable property here, never a requirement.

Signals carry an ``origin_index`` so that slicing a longer capture does not
silently change which taps apply: the phase of sample ``n`` of the stored
array is ``mod(n + origin_index, K)``, i.e. phase is attached to absolute
time, not to array position.  Samples outside the stored range are zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChannelMismatch, InvalidArgument, RateMismatch


def _as_float_array(values, name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)  # always copy: instances own their storage
    if arr.ndim != ndim:
        raise InvalidArgument(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled multichannel real signal.

    Parameters
    ----------
    data : (n_channels, n_samples) float array
        One row per channel; rows are aligned in time.
    sample_period_s : float or None
        Physical seconds per sample.  ``None`` marks a purely discrete
        signal with no physical rate attached.
    origin_index : int
        Absolute index of the first stored sample.  The signal is defined
        for all integer indices; outside ``[origin_index, origin_index +
        n_samples)`` its value is zero.
    """

    data: np.ndarray
    sample_period_s: float | None = None
    origin_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "data", _as_float_array(self.data, "data", 2))
        if self.sample_period_s is not None:
            sp = float(self.sample_period_s)
            if not (sp > 0.0 and np.isfinite(sp)):
                raise InvalidArgument(f"sample_period_s must be positive, got {sp!r}")
            object.__setattr__(self, "sample_period_s", sp)
        object.__setattr__(self, "origin_index", int(self.origin_index))

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def end_index(self) -> int:
        """Absolute index one past the last stored sample."""
        return self.origin_index + self.n_samples

    def channel(self, j: int) -> np.ndarray:
        return self.data[j]

    def delayed(self, offset: int) -> "Signal":
        """The same samples shifted ``offset`` steps later in absolute time.

        ``x.delayed(d)`` represents ``n -> x[n - d]``; only the origin moves,
        no samples are touched.
        """
        return Signal(self.data, self.sample_period_s, self.origin_index + offset)

    def window(self, start: int, stop: int) -> "Signal":
        """Restrict to absolute index range ``[start, stop)``, zero-filling
        any part of the range that lies outside the stored samples."""
        if stop < start:
            raise InvalidArgument(f"empty window [{start}, {stop})")
        out = np.zeros((self.n_channels, stop - start))
        lo = max(start, self.origin_index)
        hi = min(stop, self.end_index)
        if hi > lo:
            out[:, lo - start:hi - start] = self.data[:, lo - self.origin_index:hi - self.origin_index]
        return Signal(out, self.sample_period_s, start)

    def __eq__(self, other) -> bool:
        """Semantic equality: same channel count and rate, and identical
        sample values at every absolute index (zero outside the stored
        range, so differing padding does not break equality)."""
        if not isinstance(other, Signal):
            return NotImplemented
        if self.n_channels != other.n_channels:
            return False
        if (self.sample_period_s is None) != (other.sample_period_s is None):
            return False
        if self.sample_period_s is not None and self.sample_period_s != other.sample_period_s:
            return False
        start = min(self.origin_index, other.origin_index)
        stop = max(self.end_index, other.end_index)
        if stop <= start:
            return True
        return np.array_equal(self.window(start, stop).data, other.window(start, stop).data)


@dataclass(frozen=True, eq=False)
class PeriodicKernel:
    """Tap tensor of a DTPTV system.

    ``taps[i, j, p, m - lag_min]`` is the weight applied to input channel
    ``j`` at lag ``m`` when producing output channel ``i`` at a sample of
    phase ``p``.  The phase axis always holds the complete residue system
    mod ``period``.
    """

    taps: np.ndarray
    lag_min: int = 0
    sample_period_s: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "taps", _as_float_array(self.taps, "taps", 4))
        object.__setattr__(self, "lag_min", int(self.lag_min))
        if self.taps.shape[2] < 1:
            raise InvalidArgument("period must be >= 1")
        if self.taps.shape[3] < 1:
            raise InvalidArgument("lag window must hold at least one lag")
        if self.sample_period_s is not None:
            sp = float(self.sample_period_s)
            if not (sp > 0.0 and np.isfinite(sp)):
                raise InvalidArgument(f"sample_period_s must be positive, got {sp!r}")
            object.__setattr__(self, "sample_period_s", sp)

    @property
    def n_out(self) -> int:
        return self.taps.shape[0]

    @property
    def n_in(self) -> int:
        return self.taps.shape[1]

    @property
    def period(self) -> int:
        return self.taps.shape[2]

    @property
    def lag_max(self) -> int:
        return self.lag_min + self.taps.shape[3] - 1

    @property
    def lags(self) -> np.ndarray:
        return np.arange(self.lag_min, self.lag_max + 1)

    @property
    def is_causal(self) -> bool:
        """True when no tap at a negative lag is nonzero."""
        if self.lag_min >= 0:
            return True
        return not np.any(self.taps[:, :, :, : -self.lag_min])

    def tap(self, i: int, j: int, p: int, m: int) -> float:
        """Tap value at output ``i``, input ``j``, phase ``p``, lag ``m``
        (zero outside the stored window)."""
        if m < self.lag_min or m > self.lag_max:
            return 0.0
        return float(self.taps[i, j, p % self.period, m - self.lag_min])

    def __eq__(self, other) -> bool:
        """Semantic equality: same dims, period and rate, and identical tap
        values at every lag (zero-extended outside the stored windows)."""
        if not isinstance(other, PeriodicKernel):
            return NotImplemented
        if (self.n_out, self.n_in, self.period) != (other.n_out, other.n_in, other.period):
            return False
        if (self.sample_period_s is None) != (other.sample_period_s is None):
            return False
        if self.sample_period_s is not None and self.sample_period_s != other.sample_period_s:
            return False
        lo = min(self.lag_min, other.lag_min)
        hi = max(self.lag_max, other.lag_max)
        return np.array_equal(_padded_taps(self, lo, hi), _padded_taps(other, lo, hi))


def _padded_taps(kernel: PeriodicKernel, lag_lo: int, lag_hi: int) -> np.ndarray:
    """Kernel taps zero-extended to the lag window ``[lag_lo, lag_hi]``."""
    out = np.zeros((kernel.n_out, kernel.n_in, kernel.period, lag_hi - lag_lo + 1))
    out[:, :, :, kernel.lag_min - lag_lo:kernel.lag_max - lag_lo + 1] = kernel.taps
    return out


@dataclass(frozen=True, eq=False)
class BlockedMimo:
    """Square time-invariant multichannel FIR system over block time.

    ``taps[i, j, n - lag_min]`` weights input channel ``j`` at block lag
    ``n`` in output channel ``i``.  This is the blocked (polyphase)
    companion of a single-channel periodic kernel; see :mod:`ptv.equiv`.
    """

    taps: np.ndarray
    lag_min: int = 0

    def __post_init__(self):
        object.__setattr__(self, "taps", _as_float_array(self.taps, "taps", 3))
        object.__setattr__(self, "lag_min", int(self.lag_min))
        if self.taps.shape[0] != self.taps.shape[1]:
            raise InvalidArgument(f"blocked system must be square, got shape {self.taps.shape[:2]}")
        if self.taps.shape[2] < 1:
            raise InvalidArgument("lag window must hold at least one lag")

    @property
    def dim(self) -> int:
        return self.taps.shape[0]

    @property
    def lag_max(self) -> int:
        return self.lag_min + self.taps.shape[2] - 1

    def as_kernel(self, sample_period_s: float | None = None) -> PeriodicKernel:
        """View as a period-1 periodic kernel (plain MIMO convolution)."""
        return PeriodicKernel(self.taps[:, :, np.newaxis, :], self.lag_min, sample_period_s)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlockedMimo):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return self.as_kernel() == other.as_kernel()


def apply(kernel: PeriodicKernel, signal: Signal) -> Signal:
    """Run a signal through a periodic kernel.

    Computes ``y_i[n] = sum_j sum_m H[i, j, mod(n + origin, K), m] *
    x_j[n - m]`` over the signal's stored range; the output has the same
    length and origin as the input, and input samples outside the stored
    range count as zero.

    The accumulation order is fixed — lags ascending, input channels
    descending within each lag — so that every rearrangement of the same
    sum implemented elsewhere in the package (blocked and serialized
    application in :mod:`ptv.equiv`) adds identical products in identical
    order and reproduces the result bit for bit.
    """
    if signal.n_channels != kernel.n_in:
        raise ChannelMismatch(
            f"kernel expects {kernel.n_in} input channels, signal has {signal.n_channels}")
    if (kernel.sample_period_s is not None and signal.sample_period_s is not None
            and kernel.sample_period_s != signal.sample_period_s):
        raise RateMismatch(
            f"kernel sample period {kernel.sample_period_s} != signal {signal.sample_period_s}")
    period = kernel.period
    n = signal.n_samples
    x = signal.data
    phases = (np.arange(n) + signal.origin_index) % period
    out = np.zeros((kernel.n_out, n))
    shifted = np.zeros(n)
    for mi, m in enumerate(range(kernel.lag_min, kernel.lag_max + 1)):
        # shifted[k] = x_j[k - m] with zero padding, shared across channels
        lo, hi = max(0, m), min(n, n + m)
        if lo >= hi:
            continue
        for j in range(kernel.n_in - 1, -1, -1):
            shifted[:] = 0.0
            shifted[lo:hi] = x[j, lo - m:hi - m]
            out += kernel.taps[:, j, phases, mi] * shifted
    rate = signal.sample_period_s if signal.sample_period_s is not None else kernel.sample_period_s
    return Signal(out, rate, signal.origin_index)


def shift_phase(kernel: PeriodicKernel, offset: int) -> PeriodicKernel:
    """Rotate the phase axis: result phase ``p`` holds the taps of source
    phase ``mod(p + offset, period)``.  Shifting by a multiple of the
    period is the identity."""
    idx = (np.arange(kernel.period) + offset) % kernel.period
    return PeriodicKernel(kernel.taps[:, :, idx, :], kernel.lag_min, kernel.sample_period_s)


def identity_kernel(n_channels: int = 1, period: int = 1,
                    sample_period_s: float | None = None) -> PeriodicKernel:
    """Pass-through kernel: each channel maps to itself with a unit tap at
    lag zero, at every phase."""
    taps = np.zeros((n_channels, n_channels, period, 1))
    for c in range(n_channels):
        taps[c, c, :, 0] = 1.0
    return PeriodicKernel(taps, 0, sample_period_s)


def zero_kernel(n_out: int, n_in: int, period: int = 1, lag_min: int = 0, lag_max: int = 0,
                sample_period_s: float | None = None) -> PeriodicKernel:
    """Kernel producing all-zero output."""
    if lag_max < lag_min:
        raise InvalidArgument(f"lag_max {lag_max} < lag_min {lag_min}")
    taps = np.zeros((n_out, n_in, period, lag_max - lag_min + 1))
    return PeriodicKernel(taps, lag_min, sample_period_s)
