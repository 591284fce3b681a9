"""Periodically time-variant linear systems: kernels, discretization,
composition, spectra, channel-form equivalences, and inversion."""

from .compose import lcm_period, lift_lti, parallel, reduce_circuit, series
from .continuous import (ContinuousSpec, DiracDelta, FirTable, Gate, NyquistReport,
                         SeparableTerm, VariationBand, build_lti, build_modulator,
                         build_multiplexer, cos_harmonics, discretize, nyquist_check,
                         sin_harmonics, variation_band)
from .errors import (ChannelMismatch, CyclicGraph, DimensionMismatch, EmptySignal,
                     GridTooSmall, IncommensuratePeriods, IncommensurateRate,
                     IndivisiblePeriod, InvalidArgument, NotInvertible, NotSiso,
                     NotSquare, PtvError, RateMismatch, WindowTooSmall)
from .equiv import (apply_mimo, block_signal, mimo_to_siso, serialize_signal,
                    siso_to_mimo, siso_to_square, square_to_siso)
from .inverse import (InversionReport, check_identity_residual, invert_mimo,
                      invert_siso, invert_square)
from .kernel import (BlockedMimo, PeriodicKernel, Signal, apply, identity_kernel,
                     shift_phase, zero_kernel)
from .spectrum import (HybridSpectrum, hybrid_transform, inverse_hybrid_transform,
                       linear_band_estimate, output_band, signal_band,
                       variation_band_estimate)

__version__ = "0.1.0"

__all__ = [
    "BlockedMimo", "ChannelMismatch", "ContinuousSpec", "CyclicGraph",
    "DimensionMismatch", "DiracDelta", "EmptySignal", "FirTable", "Gate",
    "GridTooSmall", "HybridSpectrum", "IncommensuratePeriods", "IncommensurateRate",
    "IndivisiblePeriod", "InvalidArgument", "InversionReport", "NotInvertible",
    "NotSiso", "NotSquare", "NyquistReport", "PeriodicKernel", "PtvError",
    "RateMismatch", "SeparableTerm", "Signal", "VariationBand", "WindowTooSmall",
    "apply", "apply_mimo", "block_signal", "build_lti", "build_modulator",
    "build_multiplexer", "check_identity_residual", "cos_harmonics", "discretize",
    "hybrid_transform", "identity_kernel", "inverse_hybrid_transform", "invert_mimo",
    "invert_siso", "invert_square", "lcm_period", "lift_lti", "linear_band_estimate",
    "mimo_to_siso", "nyquist_check", "output_band", "parallel", "reduce_circuit",
    "serialize_signal", "series", "shift_phase", "signal_band", "sin_harmonics",
    "siso_to_mimo", "siso_to_square", "square_to_siso", "variation_band",
    "variation_band_estimate", "zero_kernel",
]
