"""Episode windows, per-segment aggregation and cohort-level paired t-tests.

The stress episode is a 30-second window opened 5 seconds after the
participant starts the road crossing; it is compared against an equally
shaped window in a neutral segment walked earlier.  Eight indexes are
tested per cohort, in report order: nSCR, AmpSum, PhasicMax, GlobalMean,
MaxDeflection, SDNN, pNN50, LF/HF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import betainc

from .errors import (
    DegenerateDataError,
    InsufficientDataError,
    InvalidValueError,
)
from .ingest import RouteMap
from .timealign import GeoSampleTrack

#: Report row order for cohort comparisons.
INDEX_ORDER = (
    "nSCR",
    "AmpSum",
    "PhasicMax",
    "GlobalMean",
    "MaxDeflection",
    "SDNN",
    "pNN50",
    "LF/HF",
)

DEFAULT_WINDOW_OFFSET_S = 5.0
DEFAULT_WINDOW_DURATION_S = 30.0


@dataclass(frozen=True)
class EpisodeWindow:
    """A labeled half-open time slice [start_epoch, start_epoch + duration_s)."""

    label: str
    start_epoch: float
    duration_s: float

    def __post_init__(self) -> None:
        if self.duration_s <= 0:
            raise InvalidValueError("window duration must be > 0")

    @property
    def end_epoch(self) -> float:
        return self.start_epoch + self.duration_s

    @property
    def bounds(self) -> tuple[float, float]:
        return (self.start_epoch, self.duration_s)


@dataclass(frozen=True)
class SegmentSummary:
    """Mean signal levels over every fix attributed to one route segment."""

    segment_id: int
    environment: str
    mean_eda_uS: float
    mean_hr_bpm: float
    subjective_rank: float | None = None


@dataclass(frozen=True)
class PairedTestResult:
    """Cohort-level paired t-test for one index.

    ``pct_expected`` is the fraction of participants whose stress value
    strictly exceeds their neutral value.
    """

    index_name: str
    n: int
    mean_neutral: float
    mean_stress: float
    t_stat: float
    df: int
    p_two_tailed: float
    pct_expected: float

    def __post_init__(self) -> None:
        if self.df != self.n - 1:
            raise InvalidValueError("df must equal n - 1")
        if not (0.0 <= self.p_two_tailed <= 1.0):
            raise InvalidValueError("p must lie in [0, 1]")
        if not (0.0 <= self.pct_expected <= 1.0):
            raise InvalidValueError("pct_expected must lie in [0, 1]")


@dataclass(frozen=True)
class ParticipantIndexes:
    """One participant's index values for the neutral and stress windows.

    A value is "missing" when its key is absent or NaN; participants with
    any missing value are excluded from the cohort comparison entirely.
    """

    participant_id: str
    neutral: Mapping[str, float]
    stress: Mapping[str, float]


@dataclass(frozen=True)
class Exclusion:
    participant_id: str
    missing: tuple


def make_crossing_window(
    crossing_start_epoch: float,
    offset_s: float = DEFAULT_WINDOW_OFFSET_S,
    duration_s: float = DEFAULT_WINDOW_DURATION_S,
    label: str = "crossing",
) -> EpisodeWindow:
    """Episode window opened ``offset_s`` after the crossing start."""
    if offset_s < 0:
        raise InvalidValueError("window offset must be >= 0")
    return EpisodeWindow(label=label, start_epoch=crossing_start_epoch + offset_s, duration_s=duration_s)


def segment_summaries(
    tracks: GeoSampleTrack | Iterable[GeoSampleTrack],
    route: RouteMap,
    rankings: Mapping[int, float] | None = None,
) -> list[SegmentSummary]:
    """Per-segment means of the attached EDA and HR values, pooled over all
    given tracks; segments with no attributed fixes are omitted."""
    if isinstance(tracks, GeoSampleTrack):
        tracks = [tracks]
    tracks = list(tracks)
    if tracks:
        seg = np.concatenate([t.segment_id for t in tracks])
        eda = np.concatenate([t.eda_uS for t in tracks])
        hr = np.concatenate([t.hr_bpm for t in tracks])
    else:
        seg = np.empty(0, dtype=int)
        eda = hr = np.empty(0)

    def masked_mean(values: np.ndarray, mask: np.ndarray) -> float:
        present = values[mask]
        present = present[np.isfinite(present)]
        return float(present.mean()) if present.size else float("nan")

    out = []
    for segment in route.segments:
        mask = seg == segment.segment_id
        if not mask.any():
            continue
        rank = rankings.get(segment.segment_id) if rankings else None
        out.append(
            SegmentSummary(
                segment_id=segment.segment_id,
                environment=segment.environment,
                mean_eda_uS=masked_mean(eda, mask),
                mean_hr_bpm=masked_mean(hr, mask),
                subjective_rank=rank,
            )
        )
    return out


def t_to_p(t: float, df: int) -> float:
    """Two-tailed p-value of Student's t, via the regularized incomplete
    beta function I_x(df/2, 1/2) at x = df / (df + t^2)."""
    if df < 1:
        raise InvalidValueError("df must be >= 1")
    if not math.isfinite(t):
        raise InvalidValueError("t must be finite")
    if t == 0.0:
        return 1.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def paired_t(
    neutral: Sequence[float], stress: Sequence[float], index_name: str = ""
) -> PairedTestResult:
    """Paired t-test of stress - neutral differences across a cohort.

    All-zero differences give the degenerate-but-meaningful t=0, p=1;
    nonzero differences with zero variance are an error.
    """
    a = np.asarray(neutral, dtype=float)
    b = np.asarray(stress, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise InvalidValueError("neutral and stress must be equal-length vectors")
    n = a.size
    if n < 2:
        raise InsufficientDataError("paired test needs at least two participants")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidValueError("paired test values must be finite")
    d = b - a
    pct_expected = float(np.count_nonzero(d > 0) / n)
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        if np.all(d == 0.0):
            t_stat, p = 0.0, 1.0
        else:
            raise DegenerateDataError("differences are identical and nonzero; t is unbounded")
    else:
        t_stat = float(np.mean(d) / (sd / math.sqrt(n)))
        p = t_to_p(t_stat, n - 1)
    return PairedTestResult(
        index_name=index_name,
        n=n,
        mean_neutral=float(a.mean()),
        mean_stress=float(b.mean()),
        t_stat=t_stat,
        df=n - 1,
        p_two_tailed=p,
        pct_expected=pct_expected,
    )


def _is_missing(table: Mapping[str, float], name: str) -> bool:
    value = table.get(name)
    return value is None or not math.isfinite(value)


def split_complete(
    participants: Sequence[ParticipantIndexes], index_names: Sequence[str] = INDEX_ORDER
) -> tuple[list[ParticipantIndexes], list[Exclusion]]:
    """Partition a cohort into complete cases and exclusions.

    A participant missing any requested index in either window is excluded
    from every index (complete-case analysis)."""
    complete = []
    exclusions = []
    for p in participants:
        missing = [
            f"{window}:{name}"
            for window, table in (("neutral", p.neutral), ("stress", p.stress))
            for name in index_names
            if _is_missing(table, name)
        ]
        if missing:
            exclusions.append(Exclusion(p.participant_id, tuple(missing)))
        else:
            complete.append(p)
    return complete, exclusions


def compare_episodes(
    participants: Sequence[ParticipantIndexes], index_names: Sequence[str] = INDEX_ORDER
) -> tuple[list[PairedTestResult], list[Exclusion]]:
    """Cohort comparison of every requested index between the neutral and
    stress windows, one paired t-test per index in report order."""
    complete, exclusions = split_complete(participants, index_names)
    if len(complete) < 2:
        raise InsufficientDataError(
            f"cohort has {len(complete)} complete participants; need at least 2"
        )
    results = [
        paired_t(
            [p.neutral[name] for p in complete],
            [p.stress[name] for p in complete],
            index_name=name,
        )
        for name in index_names
    ]
    return results, exclusions
