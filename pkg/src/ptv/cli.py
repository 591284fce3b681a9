"""Command-line front end.

One executable, ``ptv``, with a subcommand per workflow step: build a
kernel from a continuous description, run signals through it, compose and
reduce circuits, analyze spectra and bandwidth, invert, change between
serialized and blocked representations, and generate deterministic test
signals.  Every command is reproducible: identical inputs and flags yield
byte-identical output files.

Exit codes: 0 success, 2 incommensurate rate, 3 lag window too small,
4 not invertible, 5 frequency grid exhausted, 1 any other domain error,
64 usage.  All failures emit a single diagnostic line
``error: <Name>: <detail>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .compose import parallel, reduce_circuit, series
from .continuous import discretize, nyquist_check
from .errors import (GridTooSmall, IncommensurateRate, InvalidArgument, NotInvertible,
                     PtvError, WindowTooSmall)
from .inverse import (DEFAULT_COND_LIMIT, DEFAULT_RESIDUAL_TOL, invert_mimo,
                      invert_siso, invert_square)
from .equiv import block_signal, mimo_to_siso, serialize_signal, siso_to_mimo, square_to_siso
from .kernel import Signal, apply
from .spectrum import (hybrid_transform, linear_band_estimate, signal_band,
                       variation_band_estimate)

USAGE_EXIT = 64

_EXIT_CODES = ((IncommensurateRate, 2), (WindowTooSmall, 3),
               (NotInvertible, 4), (GridTooSmall, 5))


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit 64 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: UsageError: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _read_any_kernel(path):
    magic = io.sniff_magic(path)
    if magic == io.KERNEL_MAGIC:
        return io.read_kernel(path)
    if magic == io.MIMO_MAGIC:
        raise InvalidArgument(f"{path} is a blocked-system file, expected a kernel")
    return io.read_kernel_json(path)


def _sample_period(args) -> float:
    if args.sample_period is not None:
        if not args.sample_period > 0:
            raise InvalidArgument(f"--sample-period must be positive, got {args.sample_period!r}")
        return args.sample_period
    if not args.rate > 0:
        raise InvalidArgument(f"--rate must be positive, got {args.rate!r}")
    return 1.0 / args.rate


def cmd_build(args) -> int:
    spec = io.read_spec_json(args.spec)
    step = _sample_period(args)
    tail_tol = args.tolerance if args.tolerance is not None else args.tail_tol
    kernel = discretize(spec, step, tuple(args.window), tail_tol)
    io.write_kernel(args.out, kernel)
    report = nyquist_check(spec, args.input_band, step)
    print(f"period: {kernel.period}")
    print(f"variation: {report.variation.value}")
    print(f"truncated: {str(report.variation.truncated).lower()}")
    print(f"nyquist_ok: {str(report.ok).lower()}")
    print(f"output_band_hz: {report.output_band_hz!r}")
    print(f"min_rate_hz: {report.min_rate_hz!r}")
    return 0


def cmd_apply(args) -> int:
    kernel = _read_any_kernel(args.kernel)
    signal = io.read_signal(args.input)
    io.write_signal(args.out, apply(kernel, signal))
    return 0


def cmd_compose(args) -> int:
    if args.mode == "circuit":
        if len(args.inputs) != 1:
            raise InvalidArgument("circuit mode takes exactly one circuit JSON file")
        nodes, edges = io.read_circuit_json(args.inputs[0])
        window = tuple(args.window) if args.window else None
        step = (_sample_period(args)
                if args.rate is not None or args.sample_period is not None else None)
        tail_tol = args.tolerance if args.tolerance is not None else args.tail_tol
        kernel = reduce_circuit(nodes, edges, step, window, tail_tol)
    else:
        if len(args.inputs) != 2:
            raise InvalidArgument(f"{args.mode} mode takes exactly two kernel files")
        first, second = (_read_any_kernel(p) for p in args.inputs)
        combine = series if args.mode == "series" else parallel
        kernel = combine(first, second)
    io.write_kernel(args.out, kernel)
    print(f"period: {kernel.period}")
    print(f"lags: {kernel.lag_min} {kernel.lag_max}")
    return 0


def cmd_bandwidth(args) -> int:
    kernel = _read_any_kernel(args.kernel)
    energy_tol = args.tolerance if args.tolerance is not None else 1e-9
    spectrum = hybrid_transform(kernel, args.grid, threads=args.threads)
    variation = variation_band_estimate(spectrum, energy_tol)
    linear = linear_band_estimate(spectrum, energy_tol)
    step = kernel.sample_period_s
    # Physical units when the kernel carries a rate, cycles/sample otherwise.
    if step is not None:
        linear /= step
        output = args.input_band + variation / (kernel.period * step)
        nyquist_ok = 1.0 / step >= 2.0 * output
    else:
        output = args.input_band + variation / kernel.period
        nyquist_ok = output <= 0.5
    report = {"A": variation, "B_linear": linear, "B_x": args.input_band,
              "B_y": output, "nyquist_ok": nyquist_ok, "min_rate": 2.0 * output}
    for key, value in report.items():
        shown = str(value).lower() if isinstance(value, bool) else repr(value)
        print(f"{key}: {shown}")
    if args.out:
        io.write_report_json(args.out, report)
    return 0


def cmd_spectrum(args) -> int:
    if args.kernel:
        kernel = _read_any_kernel(args.kernel)
        spectrum = hybrid_transform(kernel, args.grid, threads=args.threads)
        io.write_spectrum_csv(args.out, spectrum)
        return 0
    signal = io.read_signal(args.signal)
    transform = np.fft.fftshift(np.fft.fft(signal.data, axis=1), axes=1)
    freqs = np.fft.fftshift(np.fft.fftfreq(signal.n_samples,
                                           signal.sample_period_s or 1.0))
    lines = ["i,j,k,f,re,im"]
    for ch in range(signal.n_channels):
        for f, v in zip(freqs, transform[ch]):
            lines.append(f"{ch},0,0,{float(f)!r},{float(v.real)!r},{float(v.imag)!r}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def cmd_invert(args) -> int:
    residual_tol = (args.tolerance if args.tolerance is not None
                    else DEFAULT_RESIDUAL_TOL)
    magic = io.sniff_magic(args.kernel)
    if magic == io.MIMO_MAGIC:
        forward = io.read_mimo(args.kernel)
        inverse, report = invert_mimo(forward, args.fft_size, args.cond_limit,
                                      residual_tol)
        io.write_mimo(args.out, inverse)
    else:
        forward = _read_any_kernel(args.kernel)
        if forward.n_out != forward.n_in:
            raise NotInvertible(
                f"only square systems invert; kernel is {forward.n_out}x{forward.n_in}")
        invert = invert_siso if forward.n_out == 1 else invert_square
        inverse, report = invert(forward, args.fft_size, args.cond_limit, residual_tol)
        io.write_kernel(args.out, inverse)
    payload = {"residual": report.residual, "condition_max": report.condition_max,
               "fft_size": report.fft_size, "period": report.period,
               "dims": list(report.dims)}
    report_path = args.report if args.report else str(args.out) + ".report.json"
    io.write_report_json(report_path, payload)
    print(f"residual: {report.residual!r}")
    print(f"condition_max: {report.condition_max!r}")
    print(f"fft_size: {report.fft_size}")
    return 0


def cmd_to_mimo(args) -> int:
    kernel = _read_any_kernel(args.kernel)
    io.write_mimo(args.out, siso_to_mimo(kernel))
    return 0


def cmd_to_siso(args) -> int:
    magic = io.sniff_magic(args.kernel)
    if magic == io.MIMO_MAGIC:
        blocked = io.read_mimo(args.kernel)
        kernel = mimo_to_siso(blocked, args.sample_period)
    else:
        kernel = square_to_siso(_read_any_kernel(args.kernel))
    io.write_kernel(args.out, kernel)
    return 0


def cmd_block(args) -> int:
    signal = io.read_signal(args.input)
    io.write_signal(args.out, block_signal(signal, args.factor))
    return 0


def cmd_serialize(args) -> int:
    signal = io.read_signal(args.input)
    io.write_signal(args.out, serialize_signal(signal))
    return 0


def cmd_gen(args) -> int:
    n, channels = args.length, args.channels
    if n < 1 or channels < 1:
        raise InvalidArgument("length and channels must be positive")
    step = args.sample_period if args.sample_period is not None else 1.0
    t = (np.arange(n) + args.origin) * step
    if args.kind == "tone":
        wave = args.amplitude * np.sin(2.0 * np.pi * args.freq * t)
        data = np.broadcast_to(wave, (channels, n))
    elif args.kind == "chirp":
        duration = n * step
        sweep = args.f0 * t + (args.f1 - args.f0) * t * t / (2.0 * duration)
        wave = args.amplitude * np.sin(2.0 * np.pi * sweep)
        data = np.broadcast_to(wave, (channels, n))
    else:
        rng = np.random.default_rng(args.seed)
        data = args.amplitude * rng.standard_normal((channels, n))
    signal = Signal(data, args.sample_period, args.origin)
    io.write_signal(args.out, signal)
    return 0


def _add_rate_flags(parser, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--rate", type=float, help="sample rate in Hz")
    group.add_argument("--sample-period", type=float, help="sample period in seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptv", description="Periodically time-variant systems toolkit")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for transforms (default 1)")
    parser.add_argument("--tolerance", type=float, default=None,
                        help="override the command's primary tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="discretize a continuous description")
    p.add_argument("spec", help="continuous description JSON")
    _add_rate_flags(p, required=True)
    p.add_argument("--window", type=int, nargs=2, required=True,
                   metavar=("MIN", "MAX"), help="lag window")
    p.add_argument("--tail-tol", type=float, default=1e-6,
                   help="max truncated energy fraction per response")
    p.add_argument("--input-band", type=float, default=0.0,
                   help="driving bandwidth in Hz for the sampling check")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("apply", help="run a signal through a kernel")
    p.add_argument("kernel")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("compose", help="combine kernels or reduce a circuit")
    p.add_argument("--mode", choices=("series", "parallel", "circuit"), required=True)
    p.add_argument("inputs", nargs="+",
                   help="two kernel files (series/parallel; first acts first) "
                        "or one circuit JSON")
    _add_rate_flags(p, required=False)
    p.add_argument("--window", type=int, nargs=2, metavar=("MIN", "MAX"),
                   help="lag window for circuit nodes that need discretizing")
    p.add_argument("--tail-tol", type=float, default=1e-6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("bandwidth", help="variation/linear band report")
    p.add_argument("kernel")
    p.add_argument("--input-band", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=None, help="frequency grid size")
    p.add_argument("--out", help="also write the report as JSON")
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("spectrum", help="two-frequency or signal spectrum as CSV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--kernel")
    group.add_argument("--signal")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("invert", help="two-sided inverse of a square system")
    p.add_argument("kernel", help="kernel or blocked-system file")
    p.add_argument("--fft-size", type=int, default=None)
    p.add_argument("--cond-limit", type=float, default=DEFAULT_COND_LIMIT)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="report path (default OUT.report.json)")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("to-mimo", help="single-channel kernel to blocked form")
    p.add_argument("kernel")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_to_mimo)

    p = sub.add_parser("to-siso", help="blocked or square kernel to single-channel")
    p.add_argument("kernel")
    p.add_argument("--sample-period", type=float, default=None,
                   help="stamp a rate on a blocked-system conversion")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_to_siso)

    p = sub.add_parser("block", help="polyphase-split a signal")
    p.add_argument("input")
    p.add_argument("--factor", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("serialize", help="interleave a multichannel signal")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_serialize)

    p = sub.add_parser("gen", help="generate a test signal")
    p.add_argument("kind", choices=("tone", "noise", "chirp"))
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--freq", type=float, default=0.0, help="tone frequency")
    p.add_argument("--f0", type=float, default=0.0, help="chirp start frequency")
    p.add_argument("--f1", type=float, default=0.0, help="chirp end frequency")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--channels", type=int, default=1)
    p.add_argument("--sample-period", type=float, default=None)
    p.add_argument("--origin", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PtvError as exc:
        for cls, code in _EXIT_CODES:
            if isinstance(exc, cls):
                return _fail(exc, code)
        return _fail(exc, 1)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(exc, 1)


def _fail(exc: Exception, code: int) -> int:
    detail = str(exc).splitlines()[0] if str(exc) else ""
    print(f"error: {type(exc).__name__}: {detail}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
