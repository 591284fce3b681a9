"""Shared helpers: a deliberately naive reference implementation of the
periodic convolution (different loop order, scalar accumulation) plus
random-object builders used by the property tests."""

import numpy as np

from ptv import PeriodicKernel, Signal


def naive_apply(kernel, signal):
    """Straight-from-the-definition output: for every output sample, sum
    taps[i, j, phase, m] * x[j][n - m] over channels then lags.  Quadratic
    and slow; exists only to check the production path."""
    n = signal.n_samples
    out = np.zeros((kernel.n_out, n))
    lags = range(kernel.lag_min, kernel.lag_max + 1)
    for i in range(kernel.n_out):
        for idx in range(n):
            p = (idx + signal.origin_index) % kernel.period
            acc = 0.0
            for j in range(kernel.n_in):
                for mi, m in enumerate(lags):
                    src = idx - m
                    if 0 <= src < n:
                        acc += kernel.taps[i, j, p, mi] * signal.data[j, src]
            out[i, idx] = acc
    return out


def random_kernel(rng, n_out=1, n_in=1, period=1, lag_min=0, lag_max=0, rate=None):
    taps = rng.standard_normal((n_out, n_in, period, lag_max - lag_min + 1))
    return PeriodicKernel(taps, lag_min, rate)


def random_signal(rng, channels=1, n=64, rate=None, origin=0):
    return Signal(rng.standard_normal((channels, n)), rate, origin)


def max_rel_err(got, want):
    """Max abs deviation normalized by the reference's max magnitude."""
    got, want = np.asarray(got), np.asarray(want)
    scale = np.max(np.abs(want))
    if scale == 0.0:
        return float(np.max(np.abs(got))) if got.size else 0.0
    return float(np.max(np.abs(got - want)) / scale)


def rel_rms(got, want):
    got, want = np.asarray(got), np.asarray(want)
    scale = np.sqrt(np.mean(want ** 2))
    if scale == 0.0:
        return float(np.sqrt(np.mean(got ** 2)))
    return float(np.sqrt(np.mean((got - want) ** 2)) / scale)


def pytest_terminal_summary(terminalreporter):
    """Print the one-line-per-criterion acceptance scoreboard after a run
    that exercised the acceptance module."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(RESULTS):
        ok = RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
