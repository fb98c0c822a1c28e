"""Skin-conductance analysis: tonic/phasic decomposition, SCR detection and
the five windowed EDA indexes.

The decomposition is deterministic and parameter-light: the raw signal is
smoothed with a short centered moving average, the tonic level is a centered
sliding median of the smoothed signal (windows shrink at the edges), and the
phasic component is their difference.  Responses are then read
trough-to-peak off the phasic component and kept when their amplitude
reaches the significance threshold (0.1 uS by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InsufficientDataError, InvalidValueError
from .ingest import SampleSeries
from .timealign import slice_window

DEFAULT_SCR_THRESHOLD_US = 0.1


@dataclass(frozen=True)
class EdaConfig:
    """Decomposition and detection parameters.

    ``tonic_window_s`` is long against SCR rise times (1-3 s) and short
    against thermoregulatory drift; ``scr_threshold_uS`` separates
    significant from spontaneous responses.
    """

    scr_threshold_uS: float = DEFAULT_SCR_THRESHOLD_US
    tonic_window_s: float = 8.0
    smooth_window_s: float = 0.5

    def __post_init__(self) -> None:
        if self.scr_threshold_uS <= 0:
            raise InvalidValueError("scr_threshold_uS must be > 0")
        if self.tonic_window_s <= 0 or self.smooth_window_s <= 0:
            raise InvalidValueError("decomposition windows must be > 0")


@dataclass(frozen=True)
class EdaDecomposition:
    """Tonic (skin conductance level) and phasic components of an EDA series.

    ``smoothed`` is the denoised input the components were derived from;
    tonic + phasic reproduces it sample-wise.
    """

    tonic: SampleSeries
    phasic: SampleSeries
    smoothed: SampleSeries

    def __post_init__(self) -> None:
        if not (len(self.tonic) == len(self.phasic) == len(self.smoothed)):
            raise InvalidValueError("decomposition components must have equal length")


@dataclass(frozen=True)
class ScrEvent:
    """One significant skin conductance response (trough-to-peak)."""

    onset_epoch: float
    peak_epoch: float
    amplitude_uS: float

    def __post_init__(self) -> None:
        if not self.onset_epoch < self.peak_epoch:
            raise InvalidValueError("SCR onset must precede its peak")
        if self.amplitude_uS <= 0:
            raise InvalidValueError("SCR amplitude must be > 0")


@dataclass(frozen=True)
class EdaIndexes:
    """The five windowed EDA indexes.

    nSCR / AmpSum / PhasicMax summarize significant local deflections;
    GlobalMean / MaxDeflection are absolute levels of the raw signal in the
    window (and therefore sensitive to slow drift, e.g. from sweating).
    """

    n_scr: int
    amp_sum_uS: float
    phasic_max_uS: float
    global_mean_uS: float
    max_deflection_uS: float

    def __post_init__(self) -> None:
        if min(self.amp_sum_uS, self.phasic_max_uS, self.global_mean_uS, self.max_deflection_uS) < 0 or self.n_scr < 0:
            raise InvalidValueError("EDA indexes must be non-negative")
        if self.n_scr == 0 and (self.amp_sum_uS != 0 or self.phasic_max_uS != 0):
            raise InvalidValueError("no responses implies zero AmpSum and PhasicMax")
        if self.n_scr >= 1 and self.phasic_max_uS > self.amp_sum_uS:
            raise InvalidValueError("PhasicMax cannot exceed AmpSum")
        if self.global_mean_uS > self.max_deflection_uS:
            raise InvalidValueError("GlobalMean cannot exceed MaxDeflection")


def _odd_window_samples(window_s: float, rate_hz: float) -> int:
    n = max(1, round(window_s * rate_hz))
    return n + 1 if n % 2 == 0 else n


def _shrinking_mean(values: np.ndarray, window_n: int) -> np.ndarray:
    """Centered moving average; windows shrink near the edges."""
    n = values.size
    half = window_n // 2
    csum = np.concatenate([[0.0], np.cumsum(values)])
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, n)
    return (csum[hi] - csum[lo]) / (hi - lo)


def _shrinking_median(values: np.ndarray, window_n: int) -> np.ndarray:
    """Centered sliding median; windows shrink near the edges."""
    n = values.size
    half = window_n // 2
    out = np.empty(n)
    if n >= window_n:
        out[half : n - half] = np.median(sliding_window_view(values, window_n), axis=1)
    for i in range(min(half, n)):
        out[i] = np.median(values[: min(i + half + 1, n)])
    for i in range(max(n - half, 0), n):
        out[i] = np.median(values[max(i - half, 0) :])
    return out


def decompose(raw: SampleSeries, cfg: EdaConfig = EdaConfig()) -> EdaDecomposition:
    """Split an EDA series into tonic and phasic components."""
    if raw.channel_kind != "EDA":
        raise InvalidValueError(f"decompose expects an EDA channel, got {raw.channel_kind}")
    if raw.rate_hz < 1.0:
        raise InvalidValueError(f"decompose needs rate >= 1 Hz, got {raw.rate_hz}")
    tonic_n = _odd_window_samples(cfg.tonic_window_s, raw.rate_hz)
    if len(raw) < tonic_n:
        raise InsufficientDataError(
            f"series of {len(raw)} samples is shorter than the tonic window ({tonic_n} samples)"
        )
    smooth_n = _odd_window_samples(cfg.smooth_window_s, raw.rate_hz)
    smoothed = _shrinking_mean(raw.values, smooth_n)
    tonic = _shrinking_median(smoothed, tonic_n)
    phasic = smoothed - tonic

    def as_series(values: np.ndarray) -> SampleSeries:
        return SampleSeries("EDA", raw.start_epoch, raw.rate_hz, values)

    # Phasic dips below zero are legal for the component array, but
    # SampleSeries carries them fine since it only requires finiteness.
    return EdaDecomposition(
        tonic=as_series(tonic),
        phasic=SampleSeries("OTHER", raw.start_epoch, raw.rate_hz, phasic),
        smoothed=as_series(smoothed),
    )


def detect_scrs(phasic: SampleSeries, threshold_uS: float = DEFAULT_SCR_THRESHOLD_US) -> list[ScrEvent]:
    """Trough-to-peak SCR detection on a phasic component.

    Every local minimum paired with the next local maximum is a candidate;
    candidates with amplitude >= ``threshold_uS`` become events.  Series
    boundaries count as extrema, plateaus collapse to their first sample.
    """
    if threshold_uS <= 0:
        raise InvalidValueError("threshold must be > 0")
    v = phasic.values
    if v.size < 2:
        return []
    keep = np.flatnonzero(np.concatenate([[True], np.diff(v) != 0.0]))
    y = v[keep]
    if y.size < 2:
        return []
    times = phasic.timestamps()[keep]

    interior = np.arange(1, y.size - 1)
    is_min = np.concatenate(
        [[y[0] < y[1]], (y[interior] < y[interior - 1]) & (y[interior] < y[interior + 1]), [y[-1] < y[-2]]]
    )
    is_max = np.concatenate(
        [[y[0] > y[1]], (y[interior] > y[interior - 1]) & (y[interior] > y[interior + 1]), [y[-1] > y[-2]]]
    )

    events = []
    pending_trough: int | None = None
    for j in np.flatnonzero(is_min | is_max):
        if is_min[j]:
            pending_trough = int(j)
        elif pending_trough is not None:
            amplitude = float(y[j] - y[pending_trough])
            if amplitude >= threshold_uS:
                events.append(
                    ScrEvent(
                        onset_epoch=float(times[pending_trough]),
                        peak_epoch=float(times[j]),
                        amplitude_uS=amplitude,
                    )
                )
            pending_trough = None
    return events


def eda_indexes(
    raw: SampleSeries,
    window: tuple[float, float],
    cfg: EdaConfig = EdaConfig(),
) -> EdaIndexes:
    """Compute the five EDA indexes for a half-open (start, duration) window.

    The decomposition runs on the full series for stable tonic estimates;
    responses are attributed to the window by peak time.
    """
    decomp = decompose(raw, cfg)
    events = detect_scrs(decomp.phasic, cfg.scr_threshold_uS)
    return indexes_from_events(raw, events, window)


def indexes_from_events(
    raw: SampleSeries, events: list[ScrEvent], window: tuple[float, float]
) -> EdaIndexes:
    """Windowed indexes from an already-decomposed series' event list."""
    start, duration = window
    in_window = slice_window(raw, start, duration)
    if len(in_window) == 0:
        raise InsufficientDataError("window does not overlap the EDA series")
    end = start + duration
    hits = [e for e in events if start <= e.peak_epoch < end]
    amplitudes = [e.amplitude_uS for e in hits]
    return EdaIndexes(
        n_scr=len(hits),
        amp_sum_uS=float(sum(amplitudes)),
        phasic_max_uS=float(max(amplitudes)) if amplitudes else 0.0,
        global_mean_uS=float(np.mean(in_window.values)),
        max_deflection_uS=float(np.max(in_window.values)),
    )
