"""Structure-preserving reshapes between periodic and multichannel systems.

Two exact equivalences connect the objects in this package:

* **Blocking** (polyphase decomposition).  Reading a scalar signal ``K``
  samples at a time turns it into a ``K``-channel signal at ``1/K`` the
  rate; under that reshape a single-channel periodic kernel of period ``K``
  becomes a *time-invariant* ``K x K`` convolution over block time:

      blocked[i, j][l] = H[phase i, lag l*K + i - j]

  The periodicity has been traded for matrix structure, which is what makes
  frequency-domain processing (and inversion) of periodic systems possible.

* **Serialization**.  Interleaving the ``N`` channels of a square periodic
  system into one stream at ``N`` times the rate yields a single-channel
  periodic kernel of period ``N * K``:

      serial[phase n*N + i, lag m*N + i - j] = H[i, j][phase n, lag m]

  Note the serialized lag mixes the block lag with the channel offset
  ``i - j``; input channels *ahead* of the output channel in the interleave
  order land at negative serialized lags, so the serialized twin of a
  causal system is in general non-causal.  That is a property of the
  construction, not an artifact: output slot ``i`` at one block instant
  legitimately depends on input slots ``j > i`` of the same instant, which
  serialize later in the stream.

Both maps are exact index rearrangements — bijections with bit-exact round
trips — and both preserve application: running the reshaped system on the
reshaped signal reproduces the original output sample for sample, bit for
bit (the rearranged sums traverse identical products in identical order;
see :func:`ptv.kernel.apply`).
"""

from __future__ import annotations

import numpy as np

from .errors import IndivisiblePeriod, InvalidArgument, NotSiso, NotSquare
from .kernel import BlockedMimo, PeriodicKernel, Signal, apply


def block_signal(signal: Signal, k: int) -> Signal:
    """Reshape a single-channel signal into ``k`` channels of consecutive
    polyphase components: channel ``j`` holds the samples at absolute
    indices ``r*k + j``.

    The stored range is zero-padded on both ends to whole blocks (a no-op
    under the samples-outside-range-are-zero convention), the block origin
    becomes ``floor(origin / k)``, and a physical sample period is
    multiplied by ``k``.
    """
    if signal.n_channels != 1:
        raise InvalidArgument(f"block_signal needs a single-channel signal, got {signal.n_channels}")
    if k < 1:
        raise InvalidArgument(f"blocking factor must be >= 1, got {k}")
    origin_block = signal.origin_index // k
    front = signal.origin_index - origin_block * k
    n_blocks = max(1, -(-(front + signal.n_samples) // k))
    flat = np.zeros(n_blocks * k)
    flat[front:front + signal.n_samples] = signal.data[0]
    rate = None if signal.sample_period_s is None else signal.sample_period_s * k
    return Signal(flat.reshape(n_blocks, k).T, rate, origin_block)


def serialize_signal(signal: Signal) -> Signal:
    """Interleave a multichannel signal into one stream: output sample at
    absolute index ``r*K + j`` is channel ``j`` at block index ``r``.
    Inverse of :func:`block_signal`; a physical sample period is divided by
    the channel count."""
    k = signal.n_channels
    flat = signal.data.T.reshape(1, k * signal.n_samples)
    rate = None if signal.sample_period_s is None else signal.sample_period_s / k
    return Signal(flat, rate, signal.origin_index * k)


def siso_to_mimo(kernel: PeriodicKernel) -> BlockedMimo:
    """Block a single-channel periodic kernel into its time-invariant
    ``K x K`` companion (``K`` the period).

    Entry ``(i, j)`` at block lag ``l`` is the source tap at phase ``i``
    and lag ``l*K + i - j``; the block-lag window is trimmed to the minimal
    range covering the nonzero entries.
    """
    if kernel.n_in != 1 or kernel.n_out != 1:
        raise NotSiso(f"blocking needs a 1x1 kernel, got {kernel.n_out}x{kernel.n_in}")
    k = kernel.period
    lo = (kernel.lag_min - (k - 1)) // k
    hi = -((-(kernel.lag_max + (k - 1))) // k)
    span = hi - lo + 1
    taps = np.zeros((k, k, span))
    for i in range(k):
        for mi, m in enumerate(range(kernel.lag_min, kernel.lag_max + 1)):
            j = (i - m) % k
            block_lag = (m - i + j) // k
            taps[i, j, block_lag - lo] = kernel.taps[0, 0, i, mi]
    return BlockedMimo(*_trim_lags(taps, lo))


def mimo_to_siso(blocked: BlockedMimo, sample_period_s: float | None = None) -> PeriodicKernel:
    """Unblock a square time-invariant system into a single-channel
    periodic kernel of period equal to its dimension — the exact inverse of
    :func:`siso_to_mimo` (phase ``i`` and lag ``l*K + i - j`` recover entry
    ``(i, j)`` at block lag ``l``)."""
    k = blocked.dim
    lo = blocked.lag_min * k - (k - 1)
    hi = blocked.lag_max * k + (k - 1)
    taps = np.zeros((1, 1, k, hi - lo + 1))
    for i in range(k):
        for j in range(k):
            for li, l in enumerate(range(blocked.lag_min, blocked.lag_max + 1)):
                m = l * k + i - j
                taps[0, 0, i, m - lo] = blocked.taps[i, j, li]
    trimmed, lag_min = _trim_lags(taps, lo)
    return PeriodicKernel(trimmed, lag_min, sample_period_s)


def apply_mimo(blocked: BlockedMimo, signal: Signal) -> Signal:
    """Run a blocked system over block time: plain multichannel
    time-invariant convolution, realized as a period-1 periodic kernel so
    the accumulation order matches :func:`ptv.kernel.apply` exactly."""
    return apply(blocked.as_kernel(), signal)


def square_to_siso(kernel: PeriodicKernel) -> PeriodicKernel:
    """Serialize a square ``N x N`` periodic kernel into a single-channel
    kernel of period ``N * K`` acting on the interleaved stream.

    Output channel ``i`` at phase ``n`` becomes serial phase ``n*N + i``;
    the tap toward input channel ``j`` at lag ``m`` lands at serial lag
    ``m*N + i - j``.  A physical sample period is divided by ``N`` (the
    stream runs ``N`` times faster).
    """
    n = kernel.n_in
    if kernel.n_out != n:
        raise NotSquare(f"serialization needs a square kernel, got {kernel.n_out}x{kernel.n_in}")
    if n == 1:
        return kernel
    k = kernel.period
    lo = kernel.lag_min * n - (n - 1)
    hi = kernel.lag_max * n + (n - 1)
    taps = np.zeros((1, 1, n * k, hi - lo + 1))
    for phase in range(k):
        for i in range(n):
            for mi, m in enumerate(range(kernel.lag_min, kernel.lag_max + 1)):
                for j in range(n):
                    taps[0, 0, phase * n + i, m * n + i - j - lo] = kernel.taps[i, j, phase, mi]
    trimmed, lag_min = _trim_lags(taps, lo)
    rate = None if kernel.sample_period_s is None else kernel.sample_period_s / n
    return PeriodicKernel(trimmed, lag_min, rate)


def siso_to_square(kernel: PeriodicKernel, n: int) -> PeriodicKernel:
    """Deserialize a single-channel periodic kernel into an ``N x N`` square
    kernel of period ``period / N`` — the exact inverse of
    :func:`square_to_siso` (serial phase ``p*N + i``, serial lag
    ``m*N + i - j`` recover entry ``(i, j)`` at phase ``p``, lag ``m``)."""
    if kernel.n_in != 1 or kernel.n_out != 1:
        raise NotSiso(f"deserialization needs a 1x1 kernel, got {kernel.n_out}x{kernel.n_in}")
    if n < 1:
        raise InvalidArgument(f"channel count must be >= 1, got {n}")
    if kernel.period % n:
        raise IndivisiblePeriod(f"period {kernel.period} is not divisible by {n} channels")
    if n == 1:
        return kernel
    k = kernel.period // n
    lo = -(-(kernel.lag_min - (n - 1)) // n)
    hi = (kernel.lag_max + (n - 1)) // n
    taps = np.zeros((n, n, k, hi - lo + 1))
    for phase in range(k):
        for i in range(n):
            for m in range(lo, hi + 1):
                for j in range(n):
                    r = m * n + i - j
                    if kernel.lag_min <= r <= kernel.lag_max:
                        taps[i, j, phase, m - lo] = \
                            kernel.taps[0, 0, phase * n + i, r - kernel.lag_min]
    trimmed, lag_min = _trim_lags(taps, lo)
    rate = None if kernel.sample_period_s is None else kernel.sample_period_s * n
    return PeriodicKernel(trimmed, lag_min, rate)


def _trim_lags(taps: np.ndarray, lag_min: int) -> tuple[np.ndarray, int]:
    """Drop all-zero leading/trailing lag slices (last axis), keeping at
    least one slice so degenerate all-zero systems stay representable."""
    other_axes = tuple(range(taps.ndim - 1))
    nonzero = np.flatnonzero(np.any(taps != 0.0, axis=other_axes))
    if nonzero.size == 0:
        zero_slot = min(max(-lag_min, 0), taps.shape[-1] - 1)
        return taps[..., zero_slot:zero_slot + 1], lag_min + zero_slot
    first, last = int(nonzero[0]), int(nonzero[-1])
    return taps[..., first:last + 1], lag_min + first
