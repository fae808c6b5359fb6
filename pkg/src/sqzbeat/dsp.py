"""Measurement chain: filters, demodulation, spectra, post-processing.

Spectral convention: two-sided per-bin power, reported on the one-sided
frequency axis.  A white sequence with unit per-sample variance estimates
a flat PSD of 1.0, which makes the shot-noise unit carry through from the
field layer unchanged.  Hamming-windowed periodograms are averaged over
non-overlapping frames in frame-index order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import signal as sps

from .interferometer import PhotocurrentTrace

FILTER_KINDS = ("band-stop", "low-pass", "high-pass", "gain")


class DspError(ValueError):
    pass


class DegenerateSubtractionError(DspError):
    """Background subtraction left a nonpositive band mean."""


@dataclass(frozen=True)
class FilterSpec:
    """One stage of an emulated analog filter chain.

    Band-stop stages are Chebyshev type I (ripple_db in the passband);
    low/high-pass stages are Butterworth; ``gain`` is a flat scale.
    Corners are given in Hz and must stay below Nyquist.
    """

    kind: str
    corners: tuple[float, ...] = ()
    order: int = 5
    ripple_db: float = 1.0
    gain_db: float = 0.0

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"kind must be one of {FILTER_KINDS}")
        corners = tuple(float(c) for c in np.atleast_1d(np.asarray(self.corners, dtype=float))) if self.corners != () else ()
        object.__setattr__(self, "corners", corners)
        if self.kind == "band-stop" and len(corners) != 2:
            raise ValueError("band-stop needs two corners")
        if self.kind in ("low-pass", "high-pass") and len(corners) != 1:
            raise ValueError(f"{self.kind} needs one corner")
        if self.order < 1:
            raise ValueError("order must be >= 1")


@dataclass(frozen=True)
class BandSpec:
    """Analysis band: center +- half_width with an inner exclusion zone."""

    center_hz: float
    half_width_hz: float
    exclusion_half_width_hz: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.exclusion_half_width_hz < self.half_width_hz:
            raise ValueError("need 0 <= exclusion_half_width < half_width")

    def mask(self, freqs: np.ndarray) -> np.ndarray:
        # Edge bins land on the boundaries up to float fuzz in the
        # frequency axis; the tolerance keeps them on one fixed side.
        tol = 1e-6 * max(self.half_width_hz, 1.0)
        d = np.abs(freqs - self.center_hz)
        return (d <= self.half_width_hz + tol) & (d > self.exclusion_half_width_hz + tol)


@dataclass(frozen=True)
class SpectrumEstimate:
    """Averaged (cross-)spectral density over frames."""

    freqs: np.ndarray
    values: np.ndarray
    n_frames: int
    window: str = "hamming"
    kind: str = "auto"
    compensated: bool = False
    background_subtracted: bool = False

    def __post_init__(self):
        if self.n_frames < 1:
            raise ValueError("n_frames must be >= 1")
        if len(self.freqs) != len(self.values):
            raise ValueError("freqs and values must align")
        if np.any(np.diff(self.freqs) <= 0):
            raise ValueError("freqs must be strictly increasing")
        if self.kind == "auto" and not self.background_subtracted and np.any(self.values < 0):
            raise ValueError("auto-spectra must be nonnegative before subtraction")

    def band_mean(self, band: BandSpec) -> float:
        m = band.mask(self.freqs)
        if not np.any(m):
            raise DspError("band contains no bins")
        return float(np.mean(self.values[m]))


@lru_cache(maxsize=128)
def _design_sos(spec: FilterSpec, sample_rate: float) -> np.ndarray | None:
    nyq = sample_rate / 2.0
    if spec.kind == "gain":
        return None
    if any(c >= nyq for c in spec.corners) or any(c <= 0 for c in spec.corners):
        raise DspError(f"filter corners {spec.corners} must lie in (0, Nyquist)")
    if spec.kind == "band-stop":
        return sps.cheby1(
            spec.order, spec.ripple_db, list(spec.corners), btype="bandstop", fs=sample_rate, output="sos"
        )
    btype = "lowpass" if spec.kind == "low-pass" else "highpass"
    return sps.butter(spec.order, spec.corners[0], btype=btype, fs=sample_rate, output="sos")


def apply_filter_chain(trace: PhotocurrentTrace, chain: list[FilterSpec]) -> PhotocurrentTrace:
    """Run the cascaded digital chain over one frame.

    The chain is applied in the frequency domain (circular convolution),
    which is the steady-state response of the continuously running analog
    chain: synthesized frames are exactly frame-periodic, so this carries
    no start-up transient.  The response used is exactly the designed one
    returned by ``chain_response``.
    """
    fs = trace.grid.sample_rate
    n = trace.grid.n_samples
    for spec in chain:
        _design_sos(spec, fs)  # corner validation
    h = chain_response(chain, np.fft.rfftfreq(n, d=1.0 / fs), fs)
    y = np.fft.irfft(np.fft.rfft(np.asarray(trace.samples, dtype=float)) * h, n=n)
    return trace.with_samples(y)


def chain_response(chain: list[FilterSpec], freqs_hz: np.ndarray, sample_rate: float) -> np.ndarray:
    """Complex frequency response of the designed chain at ``freqs_hz``."""
    h = np.ones(len(freqs_hz), dtype=complex)
    for spec in chain:
        sos = _design_sos(spec, sample_rate)
        if sos is not None:
            _, hs = sps.sosfreqz(sos, worN=freqs_hz, fs=sample_rate)
            h = h * hs
        h = h * 10.0 ** (spec.gain_db / 20.0)
    return h


def compensate_spectrum(estimate: SpectrumEstimate, chain: list[FilterSpec], sample_rate: float) -> SpectrumEstimate:
    """Divide out the designed chain power response.

    Rejects estimates that were already compensated, so the correction
    cannot be applied twice.
    """
    if estimate.compensated:
        raise DspError("spectrum is already compensated")
    h = chain_response(chain, estimate.freqs, sample_rate)
    power = np.abs(h) ** 2
    floor = np.max(power) * 1e-12
    return replace(estimate, values=estimate.values / np.maximum(power, floor), compensated=True)


def demodulate(
    trace: PhotocurrentTrace,
    lo_freq_hz: float,
    lo_phase_rad: float = np.pi / 2.0,
    lpf_corner_hz: float | None = None,
    lpf_order: int = 8,
) -> PhotocurrentTrace:
    """Mix with a unit local oscillator and low-pass the product.

    y = LPF[x * cos(2 pi f_lo t + phase)], so a flat input PSD p lands at
    (p + p) / 4 in the baseband and, at phase pi/2 against the beat, the
    classical beat drops out while the phase quadrature survives.
    """
    fs = trace.grid.sample_rate
    if not 0.0 < lo_freq_hz < fs / 4.0:
        raise DspError("lo_freq_hz must stay below a quarter of the sample rate")
    if lpf_corner_hz is None:
        lpf_corner_hz = lo_freq_hz / 2.0
    if lpf_corner_hz >= fs / 2.0:
        raise DspError("lpf corner must stay below Nyquist")
    t = trace.grid.times()
    mixed = trace.samples * np.cos(2.0 * np.pi * lo_freq_hz * t + lo_phase_rad)
    lpf = FilterSpec("low-pass", (lpf_corner_hz,), order=lpf_order)
    n = trace.grid.n_samples
    h = chain_response([lpf], np.fft.rfftfreq(n, d=1.0 / fs), fs)
    return trace.with_samples(np.fft.irfft(np.fft.rfft(mixed) * h, n=n))


def demod_lpf_spec(lo_freq_hz: float, lpf_order: int = 8) -> FilterSpec:
    """The low-pass stage ``demodulate`` applies, for response bookkeeping."""
    return FilterSpec("low-pass", (lo_freq_hz / 2.0,), order=lpf_order)


def _frame_array(frame) -> np.ndarray:
    if isinstance(frame, PhotocurrentTrace):
        return np.asarray(frame.samples, dtype=float)
    return np.asarray(frame, dtype=float)


def welch_psd(frames, sample_rate: float | None = None) -> SpectrumEstimate:
    """Hamming-windowed averaged periodogram over non-overlapping frames.

    The window is power-normalized, so a white input of PSD p estimates p
    without bias.  Frames are consumed and accumulated in order.
    """
    acc = None
    n = 0
    count = 0
    window = None
    norm = 0.0
    for frame in frames:
        if sample_rate is None and isinstance(frame, PhotocurrentTrace):
            sample_rate = frame.grid.sample_rate
        x = _frame_array(frame)
        if acc is None:
            n = len(x)
            window = np.hamming(n)
            norm = np.sum(window**2)
            acc = np.zeros(n // 2 + 1)
        elif len(x) != n:
            raise DspError("all frames must share one length")
        acc = acc + np.abs(np.fft.rfft(window * x)) ** 2 / norm
        count += 1
    if count == 0:
        raise DspError("need at least one frame")
    if sample_rate is None:
        raise DspError("sample_rate is required for bare-array frames")
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate)
    return SpectrumEstimate(freqs, acc / count, n_frames=count, kind="auto")


def cross_spectrum(frames1, frames2, sample_rate: float | None = None) -> SpectrumEstimate:
    """Averaged Re(V1 conj(V2)) over frame-aligned streams.

    Shares the welch normalization, so a common signal converges to its
    PSD while independent noise decays as 1/sqrt(n_frames).
    """
    acc = None
    n = 0
    count = 0
    window = None
    norm = 0.0
    it2 = iter(frames2)
    for f1 in frames1:
        try:
            f2 = next(it2)
        except StopIteration:
            raise DspError("frame streams must be aligned") from None
        if sample_rate is None and isinstance(f1, PhotocurrentTrace):
            sample_rate = f1.grid.sample_rate
        x1, x2 = _frame_array(f1), _frame_array(f2)
        if acc is None:
            n = len(x1)
            window = np.hamming(n)
            norm = np.sum(window**2)
            acc = np.zeros(n // 2 + 1)
        if len(x1) != n or len(x2) != n:
            raise DspError("all frames must share one length")
        v1 = np.fft.rfft(window * x1)
        v2 = np.fft.rfft(window * x2)
        acc = acc + np.real(v1 * np.conj(v2)) / norm
        count += 1
    if next(it2, None) is not None:
        raise DspError("frame streams must be aligned")
    if count == 0:
        raise DspError("need at least one frame")
    if sample_rate is None:
        raise DspError("sample_rate is required for bare-array frames")
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate)
    return SpectrumEstimate(freqs, acc / count, n_frames=count, kind="cross")


@dataclass(frozen=True)
class PostprocessResult:
    reduction_db: float
    stderr_db: float
    n_bins: int
    band: BandSpec
    target_mean: float
    reference_mean: float


def _window_variance_factor(window: str, n_fft: int) -> float:
    # Windowing correlates neighboring periodogram bins: for Gaussian
    # inputs cov(P_k, P_{k+m}) scales as |R_{w^2}(m)|^2, so a band mean
    # fluctuates sum_m |rho(m)|^2 times more than independent bins would
    # (about 1.82 for Hamming).  Band means here span many bins, so the
    # few-lag truncation is accurate.
    if window != "hamming" or n_fft < 16:
        return 1.0
    w2 = np.hamming(n_fft) ** 2
    r = np.fft.rfft(w2)[:8]
    rho2 = np.abs(r / r[0]) ** 2
    return float(rho2[0] + 2.0 * np.sum(rho2[1:]))


def postprocess(
    target: SpectrumEstimate,
    reference: SpectrumEstimate,
    background: SpectrumEstimate,
    band: BandSpec,
) -> PostprocessResult:
    """Background-subtracted band-averaged noise reduction in dB.

    reduction = -10 log10( mean_band(target - background)
                         / mean_band(reference - background) )

    with the exclusion zone removed from the band.  The standard error
    propagates the bin scatter of both subtracted band means, inflated by
    the window correlation factor since neighboring bins of a windowed
    periodogram are not independent.  Raises DegenerateSubtractionError
    when a subtracted band mean is not positive (electronic noise
    dominates the light).
    """
    for est in (target, reference, background):
        if est.background_subtracted:
            raise DspError("inputs must not be background-subtracted already")
    if not (np.array_equal(target.freqs, reference.freqs) and np.array_equal(target.freqs, background.freqs)):
        raise DspError("spectra must share one frequency axis")

    m = band.mask(target.freqs)
    n_bins = int(np.count_nonzero(m))
    if n_bins < 2:
        raise DspError("band must contain at least two bins")
    t = target.values[m] - background.values[m]
    r = reference.values[m] - background.values[m]
    t_mean = float(np.mean(t))
    r_mean = float(np.mean(r))
    if t_mean <= 0.0 or r_mean <= 0.0:
        raise DegenerateSubtractionError(
            "band mean is not positive after background subtraction"
        )
    reduction_db = -10.0 * np.log10(t_mean / r_mean)
    corr = np.sqrt(_window_variance_factor(target.window, 2 * (len(target.freqs) - 1)))
    se_t = float(np.std(t, ddof=1) / np.sqrt(n_bins)) * corr
    se_r = float(np.std(r, ddof=1) / np.sqrt(n_bins)) * corr
    rel = np.hypot(se_t / t_mean, se_r / r_mean)
    stderr_db = float(10.0 / np.log(10.0) * rel)
    return PostprocessResult(float(reduction_db), stderr_db, n_bins, band, t_mean, r_mean)


def raw_measurement_chain() -> list[FilterSpec]:
    """Filter chain of the direct beat-signal measurement.

    Beat-notch band-stop, 15 MHz low-pass, 1.2 MHz high-pass and a 20 dB
    amplifier.  The guard low-pass far above the analysis band sits beyond
    Nyquist at the simulated rate and is omitted.
    """
    return [
        FilterSpec("band-stop", (8.0e6, 12.5e6), order=5, ripple_db=1.0),
        FilterSpec("low-pass", (15e6,), order=5),
        FilterSpec("high-pass", (1.2e6,), order=5),
        FilterSpec("gain", gain_db=20.0),
    ]


def demod_measurement_chain() -> list[FilterSpec]:
    """Per-arm chain after the mixer low-pass: high-pass plus amplifier."""
    return [
        FilterSpec("high-pass", (1.2e6,), order=5),
        FilterSpec("gain", gain_db=20.0),
    ]
