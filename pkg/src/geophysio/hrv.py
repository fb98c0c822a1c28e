"""Interbeat-interval cleaning and the HR/HRV indexes.

Time domain: SDNN (sample standard deviation of intervals, ms) and pNN50
(fraction of successive pairs differing by more than 50 ms, strict).
Frequency domain: LF/HF, the ratio of interval spectral power in the
0.04-0.15 Hz band to power in the 0.15-0.4 Hz band, estimated on a linearly
interpolated, evenly resampled interval series via Welch's method.

Windows shorter than five minutes give unstable LF/HF estimates; results
computed on such windows carry a "short-window" flag rather than an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import welch

from .errors import DegenerateDataError, InsufficientDataError, InvalidValueError
from .ingest import IbiSeries, SampleSeries
from .timealign import slice_window

#: LF/HF estimates need at least this window length (seconds) to be stable.
SHORT_WINDOW_S = 300.0

#: Below this fraction of the window spanned by valid beats, indexes are flagged.
LOW_COVERAGE = 0.8


@dataclass(frozen=True)
class HrvConfig:
    pnn_threshold_ms: float = 50.0
    lf_band_hz: tuple[float, float] = (0.04, 0.15)
    hf_band_hz: tuple[float, float] = (0.15, 0.4)
    interp_rate_hz: float = 4.0
    max_gap_s: float = 2.0
    ibi_bounds_s: tuple[float, float] = (0.3, 2.0)

    def __post_init__(self) -> None:
        lf, hf = self.lf_band_hz, self.hf_band_hz
        if not (0 <= lf[0] < lf[1] <= hf[0] < hf[1]):
            raise InvalidValueError("frequency bands must be ordered and non-overlapping")
        if self.interp_rate_hz <= 2 * hf[1]:
            raise InvalidValueError("interp_rate_hz must exceed twice the HF upper bound")
        if self.pnn_threshold_ms <= 0 or self.max_gap_s <= 0:
            raise InvalidValueError("pnn_threshold_ms and max_gap_s must be > 0")
        if not (0 < self.ibi_bounds_s[0] < self.ibi_bounds_s[1]):
            raise InvalidValueError("ibi_bounds_s must be an ordered positive pair")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided power spectral density on an increasing frequency grid."""

    freqs_hz: np.ndarray
    power: np.ndarray

    def __post_init__(self) -> None:
        freqs = np.array(self.freqs_hz, dtype=float)
        power = np.array(self.power, dtype=float)
        if freqs.shape != power.shape or freqs.ndim != 1:
            raise InvalidValueError("freqs_hz and power must be 1-d arrays of equal length")
        if freqs.size >= 2 and np.any(np.diff(freqs) <= 0):
            raise InvalidValueError("frequencies must be strictly increasing")
        if power.size and (not np.all(np.isfinite(power)) or np.any(power < 0)):
            raise InvalidValueError("power values must be finite and non-negative")
        freqs.setflags(write=False)
        power.setflags(write=False)
        object.__setattr__(self, "freqs_hz", freqs)
        object.__setattr__(self, "power", power)


@dataclass(frozen=True)
class HrvIndexes:
    """HRV indexes for one window; NaN fields were not computable there.

    ``coverage`` is the fraction of the window spanned by retained beats;
    ``flags`` carries data-quality notes ("short-window", "low-coverage",
    and "no-<index>" for each NaN field).
    """

    sdnn_ms: float
    pnn50: float
    lf_hf: float
    n_beats: int
    coverage: float
    flags: tuple = ()


def clean_ibis(ibis: IbiSeries, cfg: HrvConfig = HrvConfig()) -> IbiSeries:
    """Drop implausible intervals and flag recording gaps.

    Beats with intervals outside ``cfg.ibi_bounds_s`` are removed; stretches
    longer than ``cfg.max_gap_s`` between retained beats are flagged so that
    successive-pair statistics skip them.
    """
    if len(ibis) == 0:
        return ibis
    lo, hi = cfg.ibi_bounds_s
    keep = (ibis.ibi_s >= lo) & (ibis.ibi_s <= hi)
    beats = ibis.beat_epoch[keep]
    values = ibis.ibi_s[keep]
    gaps = frozenset(np.flatnonzero(np.diff(beats) > cfg.max_gap_s).tolist())
    return IbiSeries(beats, values, gap_after=gaps)


def sdnn(ibis: IbiSeries) -> float:
    """Sample standard deviation (n-1) of the intervals, in milliseconds."""
    if len(ibis) < 2:
        raise InsufficientDataError("SDNN needs at least two beats")
    return float(np.std(ibis.ibi_s, ddof=1) * 1000.0)


def pnn50(ibis: IbiSeries, cfg: HrvConfig = HrvConfig()) -> float:
    """Fraction of successive interval pairs differing by more than the
    threshold (strictly); pairs across flagged gaps are excluded."""
    if len(ibis) < 2:
        raise InsufficientDataError("pNN50 needs at least two beats")
    valid = np.ones(len(ibis) - 1, dtype=bool)
    for i in ibis.gap_after:
        if 0 <= i < valid.size:
            valid[i] = False
    if not valid.any():
        raise InsufficientDataError("pNN50 has no valid successive pairs")
    diffs_ms = np.abs(np.diff(ibis.ibi_s))[valid] * 1000.0
    return float(np.count_nonzero(diffs_ms > cfg.pnn_threshold_ms) / diffs_ms.size)


def interpolate_ibis(ibis: IbiSeries, cfg: HrvConfig = HrvConfig()) -> SampleSeries:
    """Resample the (beat time, interval) pairs onto a uniform grid.

    Linear interpolation over the beat span at ``cfg.interp_rate_hz``, mean
    removed, ready for spectral estimation.
    """
    if len(ibis) < 2:
        raise InsufficientDataError("interpolation needs at least two beats")
    span = float(ibis.beat_epoch[-1] - ibis.beat_epoch[0])
    if span < 10.0:
        raise InsufficientDataError(f"beat span of {span:.2f} s is too short to resample")
    rate = cfg.interp_rate_hz
    n = int(math.floor(span * rate)) + 1
    grid = ibis.beat_epoch[0] + np.arange(n) / rate
    values = np.interp(grid, ibis.beat_epoch, ibis.ibi_s)
    values -= values.mean()
    return SampleSeries("OTHER", float(ibis.beat_epoch[0]), rate, values)


def psd(series: SampleSeries) -> Spectrum:
    """Welch power spectral density: Hann window, segments of up to 256
    samples, 50% overlap, one-sided density normalization."""
    n = len(series)
    if n < 64:
        raise InsufficientDataError(f"PSD needs >= 64 samples, got {n}")
    nperseg = min(n, 256)
    freqs, power = welch(
        series.values,
        fs=series.rate_hz,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend="constant",
        scaling="density",
    )
    return Spectrum(freqs, power)


def band_power(spectrum: Spectrum, lo_hz: float, hi_hz: float) -> float:
    """Trapezoidal integral of the density over [lo_hz, hi_hz], with the
    band edges interpolated onto the grid."""
    if lo_hz >= hi_hz:
        raise InvalidValueError("band bounds must be ordered")
    f, p = spectrum.freqs_hz, spectrum.power
    if f.size < 2 or f[0] > lo_hz or f[-1] < hi_hz:
        raise InsufficientDataError(
            f"spectrum [{f[0] if f.size else 'nan'}, {f[-1] if f.size else 'nan'}] Hz "
            f"does not cover [{lo_hz}, {hi_hz}] Hz"
        )
    inside = (f > lo_hz) & (f < hi_hz)
    grid = np.concatenate([[lo_hz], f[inside], [hi_hz]])
    dens = np.concatenate([[np.interp(lo_hz, f, p)], p[inside], [np.interp(hi_hz, f, p)]])
    return float(np.trapz(dens, grid))


def lf_hf(spectrum: Spectrum, cfg: HrvConfig = HrvConfig()) -> float:
    """Ratio of LF band power to HF band power."""
    lf = band_power(spectrum, *cfg.lf_band_hz)
    hf = band_power(spectrum, *cfg.hf_band_hz)
    if hf == 0.0:
        raise DegenerateDataError("HF band power is zero; LF/HF is undefined")
    return lf / hf


def mean_hr(hr: SampleSeries, window: tuple[float, float]) -> float:
    """Arithmetic mean of the HR samples inside a (start, duration) window."""
    start, duration = window
    in_window = slice_window(hr, start, duration)
    if len(in_window) == 0:
        raise InsufficientDataError("window does not overlap the HR series")
    return float(np.mean(in_window.values))


def hrv_indexes(
    ibis: IbiSeries, window: tuple[float, float], cfg: HrvConfig = HrvConfig()
) -> HrvIndexes:
    """All HRV indexes for one window, with NaN (plus a flag) for any index
    the window's data cannot support; never raises on sparse data."""
    start, duration = window
    window_ibis = slice_window(ibis, start, duration)
    cleaned = clean_ibis(window_ibis, cfg)
    n_beats = len(cleaned)
    span = float(cleaned.beat_epoch[-1] - cleaned.beat_epoch[0]) if n_beats >= 2 else 0.0
    coverage = min(span / duration, 1.0)

    flags: list[str] = []
    if duration < SHORT_WINDOW_S:
        flags.append("short-window")
    if coverage < LOW_COVERAGE:
        flags.append("low-coverage")

    def attempt(name: str, fn):
        try:
            return fn()
        except (InsufficientDataError, DegenerateDataError):
            flags.append(f"no-{name}")
            return float("nan")

    sdnn_ms = attempt("sdnn", lambda: sdnn(cleaned))
    pnn = attempt("pnn50", lambda: pnn50(cleaned, cfg))
    ratio = attempt("lf-hf", lambda: lf_hf(psd(interpolate_ibis(cleaned, cfg)), cfg))
    return HrvIndexes(
        sdnn_ms=sdnn_ms,
        pnn50=pnn,
        lf_hf=ratio,
        n_beats=n_beats,
        coverage=coverage,
        flags=tuple(flags),
    )
