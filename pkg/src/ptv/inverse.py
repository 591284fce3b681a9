"""FIR inversion of periodic systems through their blocked form.

A single-channel periodic system of period ``K`` is, after blocking, a
time-invariant ``K x K`` convolution; its transfer function at each
frequency is a plain ``K x K`` complex matrix.  Inverting bin by bin on an
``L``-point grid and transforming back gives a two-sided FIR approximation
of the inverse system — exact up to the circular-to-linear truncation that
shrinks as ``L`` grows.  Unblocking the result proves the punchline
constructively: the inverse of an invertible periodic system is again
periodic, with the same period (and, for square multichannel systems via
the serialized detour, the same dimensions).

Inverses of FIR systems are generally IIR, so exactness is not on offer;
instead every inversion measures its own composition residual — the
worst-case deviation of inverse-then-forward (and forward-then-inverse)
from the identity — and doubles the grid until the residual meets the
tolerance or the grid budget runs out.  Causal systems with delay have
anticausal inverses, which is why the inverse lag window is centered at
zero rather than starting there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compose import series
from .equiv import mimo_to_siso, siso_to_mimo, square_to_siso, siso_to_square
from .errors import GridTooSmall, InvalidArgument, NotInvertible, NotSiso, NotSquare
from .kernel import BlockedMimo, PeriodicKernel

#: Default condition-number ceiling for per-bin transfer matrices.
DEFAULT_COND_LIMIT = 1e8

#: Default bound on the composition residual of the returned inverse.
DEFAULT_RESIDUAL_TOL = 1e-6

#: The grid escalation stops after growing the initial size by this factor.
GRID_ESCALATION_LIMIT = 64


@dataclass(frozen=True)
class InversionReport:
    """What an inversion actually achieved.

    ``residual`` is the larger of the two composition residuals (inverse
    after forward and forward after inverse), measured as the maximum
    absolute deviation of the composed taps from the identity kernel.
    """

    residual: float
    condition_max: float
    fft_size: int
    period: int
    dims: tuple[int, int]


def _identity_deviation(kernel: PeriodicKernel) -> float:
    """Max abs deviation of a kernel's taps from the identity system."""
    deviation = np.array(kernel.taps)
    if kernel.lag_min <= 0 <= kernel.lag_max:
        zero_slot = -kernel.lag_min
        for c in range(min(kernel.n_out, kernel.n_in)):
            deviation[c, c, :, zero_slot] -= 1.0
    else:
        return 1.0 if kernel.n_out else 0.0
    return float(np.max(np.abs(deviation))) if deviation.size else 0.0


def invert_mimo(blocked: BlockedMimo, fft_size: int | None = None,
                cond_limit: float = DEFAULT_COND_LIMIT,
                residual_tol: float = DEFAULT_RESIDUAL_TOL,
                max_fft_size: int | None = None) -> tuple[BlockedMimo, InversionReport]:
    """Two-sided FIR inverse of a blocked system by per-bin matrix inversion.

    Evaluates the ``K x K`` transfer matrix on ``L`` uniform frequency bins
    (``L`` defaults to ``max(256, 8 * window)``), inverts each bin, and
    inverse-transforms to block-lag taps on the centered window
    ``[-L//2, L//2)``.  Any bin whose condition number exceeds
    ``cond_limit`` aborts with ``NotInvertible`` naming the offending
    normalized frequency.  The grid doubles until the composition residual
    is within ``residual_tol``; if the residual still exceeds it at
    ``max_fft_size`` (default 64x the initial grid), ``GridTooSmall``.
    """
    if cond_limit <= 1.0:
        raise InvalidArgument(f"cond_limit must exceed 1, got {cond_limit!r}")
    window = blocked.taps.shape[2]
    size = int(fft_size) if fft_size is not None else max(256, 8 * window)
    if size < 4 * window:
        raise InvalidArgument(f"fft size {size} is below 4x the lag window {window}")
    limit = int(max_fft_size) if max_fft_size is not None else GRID_ESCALATION_LIMIT * size
    forward = blocked.as_kernel()
    while True:
        padded = np.zeros((blocked.dim, blocked.dim, size))
        padded[:, :, np.arange(blocked.lag_min, blocked.lag_max + 1) % size] = blocked.taps
        transfer = np.moveaxis(np.fft.fft(padded, axis=2), 2, 0)
        with np.errstate(all="ignore"):
            conditions = np.linalg.cond(transfer)
        worst = int(np.argmax(conditions))
        condition_max = float(conditions[worst])
        if not np.isfinite(condition_max) or condition_max > cond_limit:
            freq = worst / size
            if freq >= 0.5:
                freq -= 1.0
            raise NotInvertible(
                f"transfer matrix condition {condition_max:.3e} exceeds {cond_limit:.3e} "
                f"at normalized frequency {freq}")
        inverse_bins = np.moveaxis(np.linalg.inv(transfer), 0, 2)
        dense = np.fft.ifft(inverse_bins, axis=2).real
        half = size // 2
        taps = np.concatenate([dense[:, :, size - half:], dense[:, :, :size - half]], axis=2)
        candidate = BlockedMimo(taps, -half)
        backward = candidate.as_kernel()
        residual = max(_identity_deviation(series(forward, backward)),
                       _identity_deviation(series(backward, forward)))
        if residual <= residual_tol:
            return candidate, InversionReport(residual, condition_max, size, 1,
                                              (blocked.dim, blocked.dim))
        if size * 2 > limit:
            raise GridTooSmall(
                f"composition residual {residual:.3e} still above {residual_tol:.3e} "
                f"at the maximum fft size {size}")
        size *= 2


def invert_siso(kernel: PeriodicKernel, fft_size: int | None = None,
                cond_limit: float = DEFAULT_COND_LIMIT,
                residual_tol: float = DEFAULT_RESIDUAL_TOL,
                max_fft_size: int | None = None) -> tuple[PeriodicKernel, InversionReport]:
    """Inverse of a single-channel periodic kernel: block, invert the
    time-invariant companion, unblock.  The result has the same period."""
    if kernel.n_in != 1 or kernel.n_out != 1:
        raise NotSiso(f"invert_siso needs a 1x1 kernel, got {kernel.n_out}x{kernel.n_in}")
    blocked_inverse, report = invert_mimo(siso_to_mimo(kernel), fft_size, cond_limit,
                                          residual_tol, max_fft_size)
    inverse = mimo_to_siso(blocked_inverse, kernel.sample_period_s)
    return inverse, InversionReport(report.residual, report.condition_max, report.fft_size,
                                    kernel.period, (1, 1))


def invert_square(kernel: PeriodicKernel, fft_size: int | None = None,
                  cond_limit: float = DEFAULT_COND_LIMIT,
                  residual_tol: float = DEFAULT_RESIDUAL_TOL,
                  max_fft_size: int | None = None) -> tuple[PeriodicKernel, InversionReport]:
    """Inverse of a square multichannel periodic kernel via its serialized
    single-channel twin.  The result keeps the dimensions and period."""
    n = kernel.n_in
    if kernel.n_out != n:
        raise NotSquare(f"invert_square needs a square kernel, got {kernel.n_out}x{kernel.n_in}")
    serial = square_to_siso(kernel)
    serial_inverse, report = invert_siso(serial, fft_size, cond_limit, residual_tol, max_fft_size)
    inverse = siso_to_square(serial_inverse, n)
    return inverse, InversionReport(report.residual, report.condition_max, report.fft_size,
                                    kernel.period, (n, n))


def check_identity_residual(a: PeriodicKernel, b: PeriodicKernel) -> float:
    """Max abs deviation of ``series(a, b)`` from the identity kernel:
    how far ``b`` is from undoing ``a`` (and vice versa)."""
    return _identity_deviation(series(a, b))
