"""Clock fusion: resample channels to the GPS rate, attach per-second signal
values to fixes, and slice half-open time windows.

Only 1 Hz channels are ever joined to a track; higher-rate channels must be
downsampled first (the 4 Hz -> 1 Hz mean rule lives in ``downsample_mean``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InsufficientDataError, InvalidValueError
from .ingest import GpsTrack, IbiSeries, SampleSeries

#: Default matching tolerance: half the nominal 1 Hz GPS period, so
#: nearest-neighbor assignment is unambiguous.
DEFAULT_TOLERANCE_S = 0.5


@dataclass(frozen=True, eq=False)
class GeoSampleTrack:
    """GPS fixes enriched with per-second signal values.

    One row per fix.  ``eda_uS``, ``hr_bpm`` and ``speed_mps`` use NaN for
    "no value"; ``segment_id`` uses -1 for "not assigned".
    """

    epoch: np.ndarray
    lat: np.ndarray
    lon: np.ndarray
    eda_uS: np.ndarray
    hr_bpm: np.ndarray
    segment_id: np.ndarray
    speed_mps: np.ndarray

    def __post_init__(self) -> None:
        n = np.asarray(self.epoch).size
        arrays = {}
        for name in ("epoch", "lat", "lon", "eda_uS", "hr_bpm", "speed_mps"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise InvalidValueError(f"{name} must have one entry per fix")
            arr.setflags(write=False)
            arrays[name] = arr
        seg = np.array(self.segment_id, dtype=int)
        if seg.shape != (n,):
            raise InvalidValueError("segment_id must have one entry per fix")
        seg.setflags(write=False)
        if n and np.any(np.diff(arrays["epoch"]) <= 0):
            raise InvalidValueError("row epochs must be strictly increasing")
        eda = arrays["eda_uS"]
        if n and np.any(eda[np.isfinite(eda)] < 0):
            raise InvalidValueError("EDA values must be >= 0")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "segment_id", seg)

    def __len__(self) -> int:
        return self.epoch.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeoSampleTrack):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f), equal_nan=True)
            for f in ("epoch", "lat", "lon", "eda_uS", "hr_bpm", "speed_mps")
        ) and np.array_equal(self.segment_id, other.segment_id)

    def with_segments(self, segment_id: np.ndarray) -> "GeoSampleTrack":
        return replace(self, segment_id=segment_id)

    def with_speeds(self, speed_mps: np.ndarray) -> "GeoSampleTrack":
        return replace(self, speed_mps=speed_mps)


@dataclass(frozen=True)
class JoinReport:
    """Per-channel count of fixes that received no sample."""

    unmatched_eda: int
    unmatched_hr: int


def downsample_mean(series: SampleSeries, k: int) -> SampleSeries:
    """Block-average a series by an integer factor.

    Output sample ``j`` is the arithmetic mean of input samples
    ``[j*k, j*k + k)``; a trailing partial block is dropped.  Block ``j``
    keeps the timestamp of its first sample, so samples with timestamps in
    ``[t, t+1)`` form second ``t``'s block for the 4 Hz -> 1 Hz case.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InvalidValueError(f"downsampling factor must be an integer >= 1, got {k!r}")
    k = int(k)
    if len(series) < k:
        raise InsufficientDataError(f"series of {len(series)} samples is shorter than k={k}")
    m = len(series) // k
    values = series.values[: m * k].reshape(m, k).mean(axis=1)
    return SampleSeries(series.channel_kind, series.start_epoch, series.rate_hz / k, values)


def _match_nearest(
    fix_epochs: np.ndarray, sample_epochs: np.ndarray, tolerance_s: float
) -> np.ndarray:
    """Greedy nearest-first matching of samples to fixes within a tolerance.

    Candidate (fix, sample) pairs are taken in order of |time difference|
    (ties: lower fix index, then lower sample index), each fix and each
    sample used at most once.  Returns per-fix sample indexes, -1 if none.
    """
    n_fix = fix_epochs.size
    assigned = np.full(n_fix, -1, dtype=int)
    if n_fix == 0 or sample_epochs.size == 0:
        return assigned

    # Each fix has at most two viable neighbors in a sorted sample array.
    pos = np.searchsorted(sample_epochs, fix_epochs)
    candidates = []
    for i in range(n_fix):
        for j in (pos[i] - 1, pos[i]):
            if 0 <= j < sample_epochs.size:
                dt = abs(sample_epochs[j] - fix_epochs[i])
                if dt <= tolerance_s:
                    candidates.append((dt, i, j))
    used_samples = set()
    for dt, i, j in sorted(candidates):
        if assigned[i] == -1 and j not in used_samples:
            assigned[i] = j
            used_samples.add(j)
    return assigned


def join_to_track(
    track: GpsTrack,
    eda: SampleSeries | None,
    hr: SampleSeries | None,
    tolerance_s: float = DEFAULT_TOLERANCE_S,
) -> tuple[GeoSampleTrack, JoinReport]:
    """Attach 1 Hz channel samples to GPS fixes by timestamp.

    Each fix gets the nearest sample within ``tolerance_s`` (missing ->
    NaN); no sample is ever attached to two fixes.  Sparse joins are legal:
    the report carries the per-channel count of unmatched fixes.
    """
    if tolerance_s < 0 or not math.isfinite(tolerance_s):
        raise InvalidValueError("tolerance_s must be finite and >= 0")
    n = len(track)
    columns = {}
    unmatched = {}
    for name, series in (("eda_uS", eda), ("hr_bpm", hr)):
        if series is None:
            columns[name] = np.full(n, np.nan)
            unmatched[name] = n
            continue
        if abs(series.rate_hz - 1.0) > 1e-9:
            raise InvalidValueError(
                f"{name}: join needs a 1 Hz channel, got {series.rate_hz} Hz (downsample first)"
            )
        idx = _match_nearest(track.epoch, series.timestamps(), tolerance_s)
        values = np.where(idx >= 0, series.values[np.clip(idx, 0, None)], np.nan)
        columns[name] = values
        unmatched[name] = int(np.count_nonzero(idx < 0))
    geo = GeoSampleTrack(
        epoch=track.epoch,
        lat=track.lat,
        lon=track.lon,
        eda_uS=columns["eda_uS"],
        hr_bpm=columns["hr_bpm"],
        segment_id=np.full(n, -1, dtype=int),
        speed_mps=np.full(n, np.nan),
    )
    return geo, JoinReport(unmatched_eda=unmatched["eda_uS"], unmatched_hr=unmatched["hr_bpm"])


def slice_window(series, start_epoch: float, duration_s: float):
    """Restrict a SampleSeries or IbiSeries to the half-open window
    ``[start_epoch, start_epoch + duration_s)``.

    An empty result is legal and returned as an empty series of the same
    type; the slice of a slice with the same bounds is the slice itself.
    """
    if duration_s <= 0:
        raise InvalidValueError("window duration must be > 0")
    end_epoch = start_epoch + duration_s

    if isinstance(series, SampleSeries):
        r = series.rate_hz
        i0 = max(0, math.ceil((start_epoch - series.start_epoch) * r))
        i1 = min(len(series), math.ceil((end_epoch - series.start_epoch) * r))
        if i1 <= i0:
            return SampleSeries(series.channel_kind, start_epoch, r, np.empty(0))
        return SampleSeries(
            series.channel_kind,
            series.start_epoch + i0 / r,
            r,
            series.values[i0:i1],
        )

    if isinstance(series, IbiSeries):
        keep = np.flatnonzero((series.beat_epoch >= start_epoch) & (series.beat_epoch < end_epoch))
        if keep.size == 0:
            return IbiSeries(np.empty(0), np.empty(0))
        lo, hi = int(keep[0]), int(keep[-1]) + 1  # window keep is a contiguous run
        suspect = frozenset(i - lo for i in series.suspect if lo <= i < hi)
        gaps = frozenset(i - lo for i in series.gap_after if lo <= i < hi - 1)
        return IbiSeries(
            series.beat_epoch[lo:hi], series.ibi_s[lo:hi], suspect=suspect, gap_after=gaps
        )

    raise InvalidValueError(f"cannot slice {type(series).__name__}")
