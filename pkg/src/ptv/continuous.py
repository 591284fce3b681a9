"""Analytic continuous-time periodic kernels and their discretization.

A continuous kernel entry ``h_ij(z, tau)`` is described here as a finite sum
of separable terms

    g(z) * f(tau),    g(z) = sum_k c_k exp(j 2 pi k z / T),

where the modulation ``g`` is a finite real harmonic series in the temporal
phase ``z = mod(t, T)``, optionally windowed by a phase gate ``[z_a, z_b)``,
and the lag part ``f`` is either a Dirac impulse at a fixed delay or a tap
table read as a train of impulses on its own uniform grid.  This family
covers switched multiplexers (gated pass-throughs), harmonic mixers
(impulse at zero delay, oscillating modulation) and ordinary FIR filters
(constant modulation, tap table), and every member discretizes in closed
form: sampling the output of such a system at period ``T_s`` with ``T = K *
T_s`` turns each impulse at delay ``d`` into a sampled sinc ``sinc(m -
d/T_s)`` weighted by the modulation evaluated at the sample's phase.

Discretization is exact for impulses on the sample lattice and for
modulations (the sinc collapses to a Kronecker delta); fractional delays
have infinite sinc tails, so the requested lag window is checked against
the energy it leaves behind and refused if the loss exceeds a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import IncommensurateRate, InvalidArgument, WindowTooSmall
from .kernel import PeriodicKernel

#: Relative tolerance for deciding that a sinc argument sits on an integer
#: (where the value is exactly 0 or 1) or that a phase hits a gate edge.
_SNAP = 1e-12

#: Relative tolerance on the period/sample-period ratio being an integer.
_COMMENSURATE_RTOL = 1e-9


@dataclass(frozen=True)
class Gate:
    """Half-open phase window ``[z_a, z_b)`` in seconds within one period."""

    z_a: float
    z_b: float

    def __post_init__(self):
        if not (0.0 <= self.z_a < self.z_b):
            raise InvalidArgument(f"gate requires 0 <= z_a < z_b, got [{self.z_a}, {self.z_b})")


@dataclass(frozen=True)
class DiracDelta:
    """Impulse lag part ``delta(tau - delay_s)``."""

    delay_s: float


@dataclass(frozen=True)
class FirTable:
    """Tap table lag part: an impulse train ``sum_q taps[q] * delta(tau - q *
    tap_period_s)`` read by band-limited interpolation at discretization."""

    taps: tuple
    tap_period_s: float

    def __post_init__(self):
        taps = tuple(float(t) for t in self.taps)
        if not taps:
            raise InvalidArgument("FirTable needs at least one tap")
        if not all(math.isfinite(t) for t in taps):
            raise InvalidArgument("FirTable taps must be finite")
        if not (self.tap_period_s > 0):
            raise InvalidArgument(f"tap_period_s must be positive, got {self.tap_period_s!r}")
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "tap_period_s", float(self.tap_period_s))


TauPart = Union[DiracDelta, FirTable]


@dataclass(frozen=True)
class SeparableTerm:
    """One separable summand ``g(z) * f(tau)`` with an optional phase gate.

    ``harmonics`` maps integer harmonic index ``k`` to the complex
    coefficient ``c_k``; real modulations require ``c_{-k} = conj(c_k)``.
    """

    harmonics: tuple
    tau_part: TauPart
    gate: Gate | None = None

    def __init__(self, harmonics, tau_part: TauPart, gate: Gate | None = None):
        items = dict(harmonics)
        coeffs = {}
        for k, c in items.items():
            coeffs[int(k)] = complex(c)
        scale = max((abs(c) for c in coeffs.values()), default=0.0)
        for k, c in coeffs.items():
            mate = coeffs.get(-k, 0.0)
            if abs(mate - c.conjugate()) > 1e-12 * max(scale, 1.0):
                raise InvalidArgument(
                    f"harmonics are not conjugate-symmetric at k={k}: "
                    f"c_{-k}={mate!r} vs conj(c_{k})={c.conjugate()!r}")
        object.__setattr__(self, "harmonics", tuple(sorted(coeffs.items())))
        object.__setattr__(self, "tau_part", tau_part)
        object.__setattr__(self, "gate", gate)

    @property
    def max_harmonic(self) -> int:
        nonzero = [abs(k) for k, c in self.harmonics if c != 0]
        return max(nonzero, default=0)

    def modulation_at(self, z: np.ndarray, period_s: float) -> np.ndarray:
        """Evaluate the real modulation ``g`` at phases ``z`` (seconds)."""
        g = np.zeros(np.shape(z), dtype=complex)
        for k, c in self.harmonics:
            g += c * np.exp(2j * np.pi * k * np.asarray(z) / period_s)
        return g.real


@dataclass(frozen=True)
class ContinuousSpec:
    """Continuous-time periodic system description.

    ``entries[i][j]`` lists the separable terms of the kernel entry mapping
    input ``j`` to output ``i``; an empty list is an identically-zero entry.
    """

    n_out: int
    n_in: int
    period_s: float
    entries: tuple

    def __init__(self, n_out: int, n_in: int, period_s: float, entries):
        if n_out < 1 or n_in < 1:
            raise InvalidArgument(f"dimensions must be >= 1, got {n_out}x{n_in}")
        if not (period_s > 0 and math.isfinite(period_s)):
            raise InvalidArgument(f"period_s must be positive, got {period_s!r}")
        rows = tuple(tuple(tuple(cell) for cell in row) for row in entries)
        if len(rows) != n_out or any(len(row) != n_in for row in rows):
            raise InvalidArgument(f"entries must be a {n_out}x{n_in} nested list")
        for row in rows:
            for cell in row:
                for term in cell:
                    if not isinstance(term, SeparableTerm):
                        raise InvalidArgument(f"entries must hold SeparableTerm, got {type(term)}")
                    if term.gate is not None and term.gate.z_b > period_s * (1 + _SNAP):
                        raise InvalidArgument(
                            f"gate [{term.gate.z_a}, {term.gate.z_b}) exceeds period {period_s}")
        object.__setattr__(self, "n_out", int(n_out))
        object.__setattr__(self, "n_in", int(n_in))
        object.__setattr__(self, "period_s", float(period_s))
        object.__setattr__(self, "entries", rows)


def sin_harmonics(amplitude: float = 1.0) -> dict:
    """Harmonic series of ``amplitude * sin(2 pi z / T)``."""
    return {1: -0.5j * amplitude, -1: 0.5j * amplitude}


def cos_harmonics(amplitude: float = 1.0) -> dict:
    """Harmonic series of ``amplitude * cos(2 pi z / T)``."""
    return {1: 0.5 * amplitude, -1: 0.5 * amplitude}


def build_multiplexer(n_inputs: int, period_s: float) -> ContinuousSpec:
    """Round-robin switch: one output that cycles through ``n_inputs`` inputs.

    Input ``j`` (0-based) is passed through, undelayed, while the phase lies
    in ``[j * T/N, (j+1) * T/N)``; the gates partition the period, so at
    every instant exactly one input reaches the output.
    """
    if n_inputs < 1:
        raise InvalidArgument(f"n_inputs must be >= 1, got {n_inputs}")
    if not (period_s > 0):
        raise InvalidArgument(f"period_s must be positive, got {period_s!r}")
    slot = period_s / n_inputs
    row = []
    for j in range(n_inputs):
        gate = Gate(j * slot, (j + 1) * slot) if n_inputs > 1 else Gate(0.0, period_s)
        row.append([SeparableTerm({0: 1.0}, DiracDelta(0.0), gate)])
    return ContinuousSpec(1, n_inputs, period_s, [row])


def build_modulator(harmonics, period_s: float) -> ContinuousSpec:
    """Memoryless multiplier ``y(t) = g(t) * x(t)`` with periodic gain ``g``
    given by a conjugate-symmetric harmonic series."""
    term = SeparableTerm(harmonics, DiracDelta(0.0))
    return ContinuousSpec(1, 1, period_s, [[[term]]])


def build_lti(fir_taps, tap_period_s: float, period_s: float | None = None) -> ContinuousSpec:
    """Time-invariant FIR response lifted into the periodic family.

    The kernel has no phase dependence, so the nominal period is arbitrary;
    it defaults to the tap spacing and only needs to be commensurate with
    the sample period chosen at discretization time.
    """
    term = SeparableTerm({0: 1.0}, FirTable(tuple(fir_taps), tap_period_s))
    period = tap_period_s if period_s is None else period_s
    return ContinuousSpec(1, 1, period, [[[term]]])


class VariationBand(NamedTuple):
    """Highest significant harmonic of the phase dependence.

    ``truncated`` marks values that stand in for an infinite series (ideal
    gates have unbounded harmonic content); such values are reported at the
    configured truncation order and must be read as lower bounds.
    """

    value: int
    truncated: bool


def variation_band(spec: ContinuousSpec, gate_truncation_order: int = 64) -> VariationBand:
    """Maximum harmonic index over all terms of the spec.

    Ungated terms contribute their exact highest harmonic.  A gated term's
    effective modulation is the product of its harmonic series with the
    gate indicator, whose series does not terminate; it contributes the
    truncation order plus its own highest harmonic, and flags the result.
    """
    value = 0
    truncated = False
    for row in spec.entries:
        for cell in row:
            for term in cell:
                if term.gate is not None:
                    truncated = True
                    value = max(value, gate_truncation_order + term.max_harmonic)
                else:
                    value = max(value, term.max_harmonic)
    return VariationBand(value, truncated)


def _snapped_sinc(x: np.ndarray) -> np.ndarray:
    """``sinc`` that returns exact 0/1 at (numerically) integer arguments.

    Keeps lattice-aligned impulses exact: a delay of a whole number of
    samples produces a single unit tap rather than a tapering of 1e-17s.
    """
    x = np.asarray(x, dtype=np.float64)
    nearest = np.round(x)
    on_grid = np.abs(x - nearest) <= _SNAP * np.maximum(1.0, np.abs(x))
    out = np.sinc(x)
    out = np.where(on_grid, np.where(nearest == 0, 1.0, 0.0), out)
    return out


def _tau_profile(tau_part: TauPart, sample_period_s: float, lags: np.ndarray,
                 tail_tol: float, label: str) -> np.ndarray:
    """Sampled-lag profile of a lag part over ``lags``, with the tail check.

    The profile is ``f`` band-limited to the sampling rate and read at
    integer lags; its total energy over all integer lags has the closed
    form ``sum_{q,q'} c_q c_q' sinc((q - q') * d)`` (cross terms vanish for
    on-lattice impulses), so the energy the window misses is known without
    evaluating any tail.
    """
    if isinstance(tau_part, DiracDelta):
        offsets = np.array([tau_part.delay_s / sample_period_s])
        weights = np.array([1.0])
    else:
        step = tau_part.tap_period_s / sample_period_s
        offsets = np.arange(len(tau_part.taps)) * step
        weights = np.asarray(tau_part.taps)
    profile = (weights[:, None] * _snapped_sinc(lags[None, :] - offsets[:, None])).sum(axis=0)
    total = float(weights @ (_snapped_sinc(offsets[:, None] - offsets[None, :]) @ weights))
    if total > 0.0:
        fraction = max(0.0, 1.0 - float(profile @ profile) / total)
        if fraction > tail_tol:
            raise WindowTooSmall(
                f"lag window [{lags[0]}, {lags[-1]}] drops {fraction:.3e} of the energy of "
                f"{label} (tolerance {tail_tol:.3e})")
    return profile


def discretize(spec: ContinuousSpec, sample_period_s: float,
               lag_window: tuple[int, int], tail_tol: float = 1e-6) -> PeriodicKernel:
    """Sample a continuous spec into a periodic kernel.

    Requires the spec period to be an integer multiple ``K`` of the sample
    period (relative tolerance 1e-9); the result has period ``K`` and the
    requested lag window.  Each impulse at delay ``d`` lands as ``sinc(m -
    d/T_s)`` across the window, scaled by the term's modulation/gate value
    at the sample phase ``z_p = p * T_s``; gates are half-open on the right,
    with edge hits snapped so that lattice-aligned switching times behave
    exactly.

    Raises ``WindowTooSmall`` if any term's profile leaves more than
    ``tail_tol`` of its energy outside the window — widen the window or
    pass a larger tolerance to accept the truncation explicitly.
    """
    if not (sample_period_s > 0 and math.isfinite(sample_period_s)):
        raise InvalidArgument(f"sample_period_s must be positive, got {sample_period_s!r}")
    m_min, m_max = int(lag_window[0]), int(lag_window[1])
    if m_max < m_min:
        raise InvalidArgument(f"lag window [{m_min}, {m_max}] is empty")
    ratio = spec.period_s / sample_period_s
    period = int(round(ratio))
    if period < 1 or abs(spec.period_s - period * sample_period_s) > _COMMENSURATE_RTOL * spec.period_s:
        raise IncommensurateRate(
            f"period {spec.period_s} s is not an integer multiple of the sample period "
            f"{sample_period_s} s (ratio {ratio})")
    lags = np.arange(m_min, m_max + 1)
    phases_z = np.arange(period) * sample_period_s
    eps = _COMMENSURATE_RTOL * spec.period_s
    taps = np.zeros((spec.n_out, spec.n_in, period, lags.size))
    for i, row in enumerate(spec.entries):
        for j, cell in enumerate(row):
            for t, term in enumerate(cell):
                gains = term.modulation_at(phases_z, spec.period_s)
                if term.gate is not None:
                    inside = (phases_z >= term.gate.z_a - eps) & (phases_z < term.gate.z_b - eps)
                    gains = np.where(inside, gains, 0.0)
                if not np.any(gains):
                    continue
                profile = _tau_profile(term.tau_part, sample_period_s, lags, tail_tol,
                                       f"term {t} of entry ({i}, {j})")
                taps[i, j] += gains[:, None] * profile[None, :]
    return PeriodicKernel(taps, m_min, sample_period_s)


class NyquistReport(NamedTuple):
    """Outcome of the output-bandwidth sampling check."""

    ok: bool
    output_band_hz: float
    min_rate_hz: float
    max_sample_period_s: float
    variation: VariationBand


def nyquist_check(spec: ContinuousSpec, input_band_hz: float, sample_period_s: float,
                  gate_truncation_order: int = 64) -> NyquistReport:
    """Check that a sample period can carry the system's output.

    The output of a periodic system driven at bandwidth ``B_x`` occupies at
    most ``B_y = B_x + A / T``: phase variation at harmonic ``A`` shifts
    input content by ``A/T``.  Sampling is adequate iff ``T_s <= 1 /
    (2 B_y)`` (boundary included).  When the variation band is truncated
    (gated specs), ``B_y`` — and therefore the verdict — is a lower bound
    on the true requirement.
    """
    if input_band_hz < 0:
        raise InvalidArgument(f"input_band_hz must be >= 0, got {input_band_hz!r}")
    band = variation_band(spec, gate_truncation_order)
    output_band = input_band_hz + band.value / spec.period_s
    if output_band == 0.0:
        return NyquistReport(True, 0.0, 0.0, math.inf, band)
    max_period = 1.0 / (2.0 * output_band)
    return NyquistReport(sample_period_s <= max_period, output_band, 2.0 * output_band,
                         max_period, band)
