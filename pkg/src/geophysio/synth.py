"""Synthetic multi-participant datasets with parameterized stress episodes.

Each participant walks the route at constant speed; the generator emits the
exact file formats the ingest parsers read (4 Hz EDA, 1 Hz HR, IBI and GPS
logs, route GeoJSON, manifest JSON) plus a ground-truth sidecar with the
injected SCR events and per-window counts.

The EDA model is baseline + linear drift (skin conductance creeps upward
during a walk) + Poisson-arriving SCR bumps whose rate switches inside the
stress segment.  IBIs are base + optional sinusoidal modulation (frequency
switching inside the stress segment, for LF/HF effects) + Gaussian noise.
All randomness derives from one stream per participant seeded with
(seed, participant index), so cohorts are byte-reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO

import numpy as np

from .errors import FormatError, InvalidValueError, MissingReferenceError
from .ingest import (
    GpsTrack,
    IbiSeries,
    RouteMap,
    RouteSegment,
    SampleSeries,
    load_route,
    write_gps_track,
    write_ibi_file,
    write_route,
    write_uniform_channel,
)

EDA_RATE_HZ = 4.0
HR_RATE_HZ = 1.0

#: SCR bump shape: 1 s linear rise to the peak, then a 3 s exponential tail
#: (unit time constant) renormalized to land exactly on zero.
SCR_RISE_S = 1.0
SCR_DECAY_S = 3.0

_METERS_PER_DEG_LAT = 6_371_000.0 * math.pi / 180.0

_DEFAULT_SEGMENTS = (
    (1, "Central station", "indoor"),
    (2, "Busy junction", "urban"),
    (3, "Commercial street", "commercial"),
    (4, "Neighborhood street", "residential"),
    (5, "Canal side", "blue"),
    (6, "River bank", "blue"),
    (7, "Urban park", "green"),
    (8, "Quiet street", "residential"),
    (9, "Pedestrian street", "pedestrian"),
    (10, "Main road", "main road"),
    (11, "Road crossing", "crossing"),
    (12, "Walk to bus station", "urban"),
    (13, "Bus ride", "transit"),
)


def straight_route(
    n_segments: int,
    segment_length_m: float = 90.0,
    corridor_m: float = 25.0,
    origin: tuple[float, float] = (52.09, 5.11),
    names: tuple | None = None,
) -> RouteMap:
    """A contiguous eastbound chain of equal-length segments, ids 1..n."""
    if n_segments < 1:
        raise InvalidValueError("route needs at least one segment")
    lat0, lon0 = origin
    dlon = segment_length_m / (_METERS_PER_DEG_LAT * math.cos(math.radians(lat0)))
    segments = []
    for i in range(n_segments):
        if names is not None:
            seg_id, name, environment = names[i]
        else:
            seg_id, name, environment = i + 1, f"segment {i + 1}", "test"
        segments.append(
            RouteSegment(
                segment_id=seg_id,
                name=name,
                environment=environment,
                polyline=[(lat0, lon0 + i * dlon), (lat0, lon0 + (i + 1) * dlon)],
            )
        )
    return RouteMap(tuple(segments), corridor_m=corridor_m)


def default_route(segment_length_m: float = 90.0) -> RouteMap:
    """The 13-segment demo route (station to bus ride, crossing at 11)."""
    return straight_route(
        len(_DEFAULT_SEGMENTS), segment_length_m=segment_length_m, names=_DEFAULT_SEGMENTS
    )


@dataclass(frozen=True)
class SynthSpec:
    """Everything the generator needs; the seed fixes all randomness."""

    seed: int = 0
    n_participants: int = 15
    route: RouteMap = field(default_factory=default_route)
    stress_segment_id: int = 11
    neutral_segment_id: int = 9
    walk_speed_mps: float = 1.4
    start_epoch: float = 1_600_000_000.0
    baseline_eda_uS: float = 2.0
    eda_drift_uS_per_min: float = 0.1
    neutral_scr_rate_per_min: float = 2.0
    stress_scr_rate_per_min: float = 12.0
    scr_amp_range_uS: tuple[float, float] = (0.2, 0.6)
    min_scr_separation_s: float = 0.0
    base_ibi_ms: float = 800.0
    ibi_noise_ms: float = 20.0
    ibi_mod_amp_ms: float = 0.0
    neutral_mod_freq_hz: float = 0.3
    stress_mod_freq_hz: float = 0.1
    gps_noise_m: float = 2.0
    window_offset_s: float = 5.0
    window_duration_s: float = 30.0

    def __post_init__(self) -> None:
        if self.n_participants < 1:
            raise InvalidValueError("n_participants must be >= 1")
        if self.walk_speed_mps <= 0:
            raise InvalidValueError("walk_speed_mps must be > 0")
        if min(self.neutral_scr_rate_per_min, self.stress_scr_rate_per_min) < 0:
            raise InvalidValueError("SCR rates must be >= 0")
        lo, hi = self.scr_amp_range_uS
        if not (0 <= lo <= hi):
            raise InvalidValueError("scr_amp_range_uS must be an ordered non-negative pair")
        if self.base_ibi_ms <= 0 or self.ibi_noise_ms < 0 or self.gps_noise_m < 0:
            raise InvalidValueError("base_ibi_ms must be > 0; noise levels must be >= 0")
        if self.baseline_eda_uS < 0 or self.eda_drift_uS_per_min < 0:
            raise InvalidValueError("EDA baseline and drift must be >= 0")
        if self.window_duration_s <= 0 or self.window_offset_s < 0:
            raise InvalidValueError("window duration must be > 0 and offset >= 0")
        ids = set(self.route.segment_ids())
        for which, seg_id in (("stress", self.stress_segment_id), ("neutral", self.neutral_segment_id)):
            if seg_id not in ids:
                raise MissingReferenceError(f"{which} segment {seg_id} is not in the route")


@dataclass(frozen=True)
class GeneratedCohort:
    out_dir: Path
    manifest_path: Path
    ground_truth_path: Path
    ground_truth: dict


# ---------------------------------------------------------------------------
# walk schedule


class _WalkSchedule:
    """Vertex-timed traversal of the route segments in id order.

    Gaps between consecutive segments are walked too (at the same speed)
    without belonging to any segment.
    """

    def __init__(self, route: RouteMap, speed_mps: float):
        times = [0.0]
        lats: list[float] = []
        lons: list[float] = []
        self.entry_s: dict[int, float] = {}
        self.exit_s: dict[int, float] = {}
        t = 0.0
        last: tuple[float, float] | None = None
        for seg in route.segments:
            first = (float(seg.polyline[0, 0]), float(seg.polyline[0, 1]))
            if last is not None and last != first:
                t += _ground_distance_m(last, first) / speed_mps
                times.append(t)
                lats.append(first[0])
                lons.append(first[1])
            elif last is None:
                lats.append(first[0])
                lons.append(first[1])
            self.entry_s[seg.segment_id] = t
            for i in range(1, seg.polyline.shape[0]):
                a = (float(seg.polyline[i - 1, 0]), float(seg.polyline[i - 1, 1]))
                b = (float(seg.polyline[i, 0]), float(seg.polyline[i, 1]))
                t += _ground_distance_m(a, b) / speed_mps
                times.append(t)
                lats.append(b[0])
                lons.append(b[1])
            self.exit_s[seg.segment_id] = t
            last = (float(seg.polyline[-1, 0]), float(seg.polyline[-1, 1]))
        # times has one leading 0.0 for the first vertex
        self.vertex_t = np.asarray(times[: len(lats)])
        self.lat = np.asarray(lats)
        self.lon = np.asarray(lons)
        self.total_s = t

    def position(self, t_rel: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.interp(t_rel, self.vertex_t, self.lat),
            np.interp(t_rel, self.vertex_t, self.lon),
        )


def _ground_distance_m(a: tuple[float, float], b: tuple[float, float]) -> float:
    # Local equirectangular distance; the generator only covers sub-km routes.
    lat_m = (b[0] - a[0]) * _METERS_PER_DEG_LAT
    lon_m = (b[1] - a[1]) * _METERS_PER_DEG_LAT * math.cos(math.radians(a[0]))
    return math.hypot(lat_m, lon_m)


# ---------------------------------------------------------------------------
# signal generation


def _poisson_arrivals(
    rng: np.random.Generator,
    total_s: float,
    neutral_rate_per_s: float,
    stress_rate_per_s: float,
    stress_interval: tuple[float, float],
    min_sep_s: float,
) -> list[float]:
    """Inhomogeneous Poisson arrivals by thinning; optional minimum
    separation enforced by dropping close followers."""
    max_rate = max(neutral_rate_per_s, stress_rate_per_s)
    if max_rate <= 0:
        return []
    lo, hi = stress_interval
    times: list[float] = []
    t = 0.0
    while True:
        t += rng.exponential(1.0 / max_rate)
        if t >= total_s:
            return times
        rate = stress_rate_per_s if lo <= t < hi else neutral_rate_per_s
        if rng.random() * max_rate <= rate:
            if not times or t - times[-1] >= min_sep_s:
                times.append(t)


def _scr_bump(t_since_onset: np.ndarray, amplitude: float) -> np.ndarray:
    rise = np.clip(t_since_onset / SCR_RISE_S, 0.0, 1.0)
    tail = np.clip(t_since_onset - SCR_RISE_S, 0.0, SCR_DECAY_S)
    decay_floor = math.exp(-SCR_DECAY_S)
    decay = (np.exp(-tail) - decay_floor) / (1.0 - decay_floor)
    out = amplitude * np.where(t_since_onset < SCR_RISE_S, rise, decay)
    return np.where((t_since_onset < 0) | (t_since_onset >= SCR_RISE_S + SCR_DECAY_S), 0.0, out)


def _make_eda(
    spec: SynthSpec, rng: np.random.Generator, total_s: float, stress_interval: tuple[float, float]
) -> tuple[SampleSeries, list[dict]]:
    n = int(total_s * EDA_RATE_HZ)
    t = np.arange(n) / EDA_RATE_HZ
    values = spec.baseline_eda_uS + (spec.eda_drift_uS_per_min / 60.0) * t
    onsets = _poisson_arrivals(
        rng,
        total_s,
        spec.neutral_scr_rate_per_min / 60.0,
        spec.stress_scr_rate_per_min / 60.0,
        stress_interval,
        spec.min_scr_separation_s,
    )
    width = SCR_RISE_S + SCR_DECAY_S
    events = []
    lo, hi = spec.scr_amp_range_uS
    for onset in onsets:
        amplitude = float(rng.uniform(lo, hi))
        # keep the full bump inside the session so sidecar amplitudes are exact
        if onset < 2.0 or onset > total_s - width - 0.5:
            continue
        values += _scr_bump(t - onset, amplitude)
        events.append(
            {
                "onset_epoch": spec.start_epoch + onset,
                "peak_epoch": spec.start_epoch + onset + SCR_RISE_S,
                "amplitude_uS": amplitude,
            }
        )
    series = SampleSeries("EDA", spec.start_epoch, EDA_RATE_HZ, values)
    return series, events


def _make_ibis(
    spec: SynthSpec, rng: np.random.Generator, total_s: float, stress_interval: tuple[float, float]
) -> IbiSeries:
    lo, hi = stress_interval
    beats: list[float] = []
    ibis: list[float] = []
    t = 0.0
    while True:
        freq = spec.stress_mod_freq_hz if lo <= t < hi else spec.neutral_mod_freq_hz
        ibi_ms = spec.base_ibi_ms
        if spec.ibi_mod_amp_ms:
            ibi_ms += spec.ibi_mod_amp_ms * math.sin(2.0 * math.pi * freq * t)
        if spec.ibi_noise_ms:
            ibi_ms += rng.normal(0.0, spec.ibi_noise_ms)
        ibi_s = min(max(ibi_ms / 1000.0, 0.32), 1.9)  # stay inside cleaning bounds
        t += ibi_s
        if t >= total_s:
            return IbiSeries(spec.start_epoch + np.asarray(beats), np.asarray(ibis))
        beats.append(t)
        ibis.append(ibi_s)


def _make_hr(spec: SynthSpec, ibis: IbiSeries, total_s: float) -> SampleSeries:
    t = np.arange(int(total_s))
    if len(ibis) >= 2:
        hr = np.interp(spec.start_epoch + t, ibis.beat_epoch, 60.0 / ibis.ibi_s)
    else:
        hr = np.full(t.size, 60000.0 / spec.base_ibi_ms)
    return SampleSeries("HR", spec.start_epoch, HR_RATE_HZ, hr)


def _make_gps(
    spec: SynthSpec, rng: np.random.Generator, schedule: _WalkSchedule
) -> GpsTrack:
    n = int(schedule.total_s)
    t_rel = np.arange(n, dtype=float)
    lat, lon = schedule.position(t_rel)
    if spec.gps_noise_m > 0:
        jitter = rng.normal(0.0, spec.gps_noise_m, size=(n, 2))
        lat = lat + jitter[:, 0] / _METERS_PER_DEG_LAT
        lon = lon + jitter[:, 1] / (_METERS_PER_DEG_LAT * np.cos(np.radians(lat)))
    return GpsTrack(spec.start_epoch + t_rel, lat, lon)


def _count_in_window(events: list[dict], start: float, duration: float) -> int:
    return sum(1 for e in events if start <= e["peak_epoch"] < start + duration)


# ---------------------------------------------------------------------------
# cohort assembly


def generate_cohort(spec: SynthSpec, out_dir: str | Path) -> GeneratedCohort:
    """Write a complete synthetic dataset (route, per-participant files,
    manifest, ground-truth sidecar) under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    schedule = _WalkSchedule(spec.route, spec.walk_speed_mps)
    if schedule.total_s < spec.window_offset_s + spec.window_duration_s:
        raise InvalidValueError("route is too short for the episode windows")
    stress_interval = (
        schedule.entry_s[spec.stress_segment_id],
        schedule.exit_s[spec.stress_segment_id],
    )

    with open(out / "route.geojson", "w", encoding="utf-8") as fh:
        write_route(spec.route, fh)

    crossing_start = spec.start_epoch + schedule.entry_s[spec.stress_segment_id]
    neutral_entry = spec.start_epoch + schedule.entry_s[spec.neutral_segment_id]
    participants = []
    crossing_epochs = {}
    truth: dict = {"seed": spec.seed, "participants": {}}
    for idx in range(spec.n_participants):
        pid = f"P{idx + 1:02d}"
        rng = np.random.default_rng([spec.seed, idx])
        pdir = out / pid
        pdir.mkdir(exist_ok=True)

        eda, events = _make_eda(spec, rng, schedule.total_s, stress_interval)
        ibis = _make_ibis(spec, rng, schedule.total_s, stress_interval)
        hr = _make_hr(spec, ibis, schedule.total_s)
        gps = _make_gps(spec, rng, schedule)

        with open(pdir / "eda.csv", "w", encoding="utf-8") as fh:
            write_uniform_channel(eda, fh)
        with open(pdir / "hr.csv", "w", encoding="utf-8") as fh:
            write_uniform_channel(hr, fh)
        with open(pdir / "ibi.csv", "w", encoding="utf-8") as fh:
            write_ibi_file(ibis, fh, start_epoch=spec.start_epoch)
        with open(pdir / "gps.csv", "w", encoding="utf-8") as fh:
            write_gps_track(gps, fh)

        participants.append(
            {
                "participant_id": pid,
                "channels": {"EDA": f"{pid}/eda.csv", "HR": f"{pid}/hr.csv"},
                "ibi": f"{pid}/ibi.csv",
                "gps": f"{pid}/gps.csv",
            }
        )
        crossing_epochs[pid] = crossing_start
        stress_w = crossing_start + spec.window_offset_s
        neutral_w = neutral_entry + spec.window_offset_s
        truth["participants"][pid] = {
            "crossing_start_epoch": crossing_start,
            "neutral_entry_epoch": neutral_entry,
            "scr_events": events,
            "windows": {
                "neutral": {
                    "start_epoch": neutral_w,
                    "duration_s": spec.window_duration_s,
                    "n_scr": _count_in_window(events, neutral_w, spec.window_duration_s),
                },
                "stress": {
                    "start_epoch": stress_w,
                    "duration_s": spec.window_duration_s,
                    "n_scr": _count_in_window(events, stress_w, spec.window_duration_s),
                },
            },
        }

    manifest_doc = {
        "participants": participants,
        "route": "route.geojson",
        "stress_event": {
            "segment_id": spec.stress_segment_id,
            "crossing_start_epoch": crossing_epochs,
        },
        "neutral_segment_id": spec.neutral_segment_id,
        "window_offset_s": spec.window_offset_s,
        "window_duration_s": spec.window_duration_s,
    }
    manifest_path = out / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest_doc, fh, indent=2)
        fh.write("\n")
    truth_path = out / "ground_truth.json"
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2)
        fh.write("\n")
    return GeneratedCohort(
        out_dir=out, manifest_path=manifest_path, ground_truth_path=truth_path, ground_truth=truth
    )


# ---------------------------------------------------------------------------
# spec files


_SPEC_KEYS = {
    "seed",
    "n_participants",
    "route",
    "stress_segment_id",
    "neutral_segment_id",
    "walk_speed_mps",
    "start_epoch",
    "baseline_eda_uS",
    "eda_drift_uS_per_min",
    "neutral_scr_rate_per_min",
    "stress_scr_rate_per_min",
    "scr_amp_range_uS",
    "min_scr_separation_s",
    "base_ibi_ms",
    "ibi_noise_ms",
    "ibi_mod_amp_ms",
    "neutral_mod_freq_hz",
    "stress_mod_freq_hz",
    "gps_noise_m",
    "window_offset_s",
    "window_duration_s",
}


def load_synth_spec(stream: IO[str] | str, base_dir: str | Path = ".") -> SynthSpec:
    """Load a generator spec from JSON.

    ``route`` may be "default" (the 13-segment demo route), omitted (same),
    or a path to a route GeoJSON relative to ``base_dir``.
    """
    text = stream if isinstance(stream, str) else stream.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"synth spec is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("synth spec must be a JSON object")
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise FormatError(f"synth spec has unknown keys: {sorted(unknown)}")

    kwargs = dict(doc)
    route_ref = kwargs.pop("route", "default")
    if route_ref == "default":
        route = default_route()
    else:
        route_path = Path(base_dir) / route_ref
        if not route_path.is_file():
            raise MissingReferenceError(f"route file does not exist: {route_path}")
        with open(route_path, encoding="utf-8") as fh:
            route = load_route(fh)
    if "scr_amp_range_uS" in kwargs:
        pair = kwargs["scr_amp_range_uS"]
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise FormatError("scr_amp_range_uS must be a [low, high] pair")
        kwargs["scr_amp_range_uS"] = (float(pair[0]), float(pair[1]))
    try:
        return SynthSpec(route=route, **kwargs)
    except TypeError as exc:
        raise FormatError(f"bad synth spec: {exc}") from None
