"""Parsers, writers and domain types for the raw study inputs.

Five on-disk formats are defined here (all plain text, "." decimal
separator, no locale dependence):

* channel CSV   -- line 1: start epoch, line 2: rate in Hz, then one value per line
* IBI CSV       -- line 1: session start epoch, then rows ``offset_s,ibi_s``
* GPS CSV       -- header ``epoch,lat,lon``, then one fix per row
* route GeoJSON -- FeatureCollection of LineString features with properties
                   ``segment_id``, ``name``, ``environment``; optional top-level
                   ``corridor_m`` member
* manifest JSON -- study layout, see ``load_manifest``

All epochs are UTC seconds since the Unix epoch (fractional allowed); there
is no timezone arithmetic anywhere in the package.  Parsed structures are
frozen and safe for concurrent read-only sharing.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

from .errors import (
    FormatError,
    InvalidValueError,
    MissingReferenceError,
    OrderError,
)

CHANNEL_KINDS = ("EDA", "HR", "TEMP", "BVP", "OTHER")

# IBIs outside this range (seconds) are flagged at parse time but retained;
# removal is an explicit analysis step (hrv.clean_ibis).
IBI_SUSPECT_BOUNDS_S = (0.2, 3.0)

DEFAULT_CORRIDOR_M = 25.0


def _readonly_floats(values, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidValueError(f"{what} must be one-dimensional")
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True, eq=False)
class SampleSeries:
    """A uniform-rate scalar channel anchored to an epoch start time.

    Sample ``i`` is taken at ``start_epoch + i / rate_hz``.  Units are uS for
    EDA, bpm for HR, degrees C for TEMP.  May be empty (window slices of a
    series can be); parsers always produce at least one sample.
    """

    channel_kind: str
    start_epoch: float
    rate_hz: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.channel_kind not in CHANNEL_KINDS:
            raise InvalidValueError(f"unknown channel kind {self.channel_kind!r}")
        rate = float(self.rate_hz)
        if not math.isfinite(rate) or rate <= 0:
            raise InvalidValueError(f"rate_hz must be finite and > 0, got {self.rate_hz!r}")
        values = _readonly_floats(self.values, "values")
        if values.size and not np.all(np.isfinite(values)):
            raise InvalidValueError("sample values must all be finite")
        object.__setattr__(self, "channel_kind", str(self.channel_kind))
        object.__setattr__(self, "start_epoch", float(self.start_epoch))
        object.__setattr__(self, "rate_hz", rate)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, SampleSeries):
            return NotImplemented
        return (
            self.channel_kind == other.channel_kind
            and self.start_epoch == other.start_epoch
            and self.rate_hz == other.rate_hz
            and np.array_equal(self.values, other.values)
        )

    def timestamps(self) -> np.ndarray:
        return self.start_epoch + np.arange(self.values.size) / self.rate_hz

    @property
    def duration_s(self) -> float:
        return self.values.size / self.rate_hz


@dataclass(frozen=True, eq=False)
class IbiSeries:
    """Heartbeat events: beat epochs paired with the interbeat interval that
    preceded each beat, in seconds.

    ``suspect`` holds indexes flagged at parse time (interval outside
    ``IBI_SUSPECT_BOUNDS_S``); ``gap_after`` holds indexes ``i`` such that the
    stretch between beat ``i`` and beat ``i+1`` is a recording gap (set by
    ``hrv.clean_ibis``).  Successive-pair statistics skip flagged gaps.
    """

    beat_epoch: np.ndarray
    ibi_s: np.ndarray
    suspect: frozenset = frozenset()
    gap_after: frozenset = frozenset()

    def __post_init__(self) -> None:
        epochs = _readonly_floats(self.beat_epoch, "beat_epoch")
        ibis = _readonly_floats(self.ibi_s, "ibi_s")
        if epochs.size != ibis.size:
            raise InvalidValueError("beat_epoch and ibi_s must have equal length")
        if epochs.size and np.any(np.diff(epochs) <= 0):
            raise OrderError("beat epochs must be strictly increasing")
        if ibis.size and (not np.all(np.isfinite(ibis)) or np.any(ibis <= 0)):
            raise InvalidValueError("interbeat intervals must be finite and positive")
        object.__setattr__(self, "beat_epoch", epochs)
        object.__setattr__(self, "ibi_s", ibis)
        object.__setattr__(self, "suspect", frozenset(self.suspect))
        object.__setattr__(self, "gap_after", frozenset(self.gap_after))

    def __len__(self) -> int:
        return self.beat_epoch.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, IbiSeries):
            return NotImplemented
        return (
            np.array_equal(self.beat_epoch, other.beat_epoch)
            and np.array_equal(self.ibi_s, other.ibi_s)
            and self.suspect == other.suspect
            and self.gap_after == other.gap_after
        )


@dataclass(frozen=True, eq=False)
class GpsTrack:
    """Ordered GPS fixes, nominally 1 Hz."""

    epoch: np.ndarray
    lat: np.ndarray
    lon: np.ndarray

    def __post_init__(self) -> None:
        epoch = _readonly_floats(self.epoch, "epoch")
        lat = _readonly_floats(self.lat, "lat")
        lon = _readonly_floats(self.lon, "lon")
        if not (epoch.size == lat.size == lon.size):
            raise InvalidValueError("epoch, lat and lon must have equal length")
        if epoch.size and np.any(np.diff(epoch) <= 0):
            raise OrderError("fix epochs must be strictly increasing")
        if lat.size and (np.any(np.abs(lat) > 90.0) or not np.all(np.isfinite(lat))):
            raise InvalidValueError("latitude out of [-90, 90]")
        if lon.size and (np.any(np.abs(lon) > 180.0) or not np.all(np.isfinite(lon))):
            raise InvalidValueError("longitude out of [-180, 180]")
        object.__setattr__(self, "epoch", epoch)
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", lon)

    def __len__(self) -> int:
        return self.epoch.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, GpsTrack):
            return NotImplemented
        return (
            np.array_equal(self.epoch, other.epoch)
            and np.array_equal(self.lat, other.lat)
            and np.array_equal(self.lon, other.lon)
        )


@dataclass(frozen=True, eq=False)
class RouteSegment:
    """One typed polyline segment of the walking route."""

    segment_id: int
    name: str
    environment: str
    polyline: np.ndarray  # shape (k, 2) of (lat, lon), k >= 2

    def __post_init__(self) -> None:
        poly = np.array(self.polyline, dtype=float)
        if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 2:
            raise InvalidValueError(
                f"segment {self.segment_id}: polyline needs >= 2 (lat, lon) vertices"
            )
        if not np.all(np.isfinite(poly)):
            raise InvalidValueError(f"segment {self.segment_id}: non-finite vertex")
        if np.any(np.abs(poly[:, 0]) > 90.0) or np.any(np.abs(poly[:, 1]) > 180.0):
            raise InvalidValueError(f"segment {self.segment_id}: vertex out of bounds")
        poly.setflags(write=False)
        object.__setattr__(self, "segment_id", int(self.segment_id))
        object.__setattr__(self, "polyline", poly)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RouteSegment):
            return NotImplemented
        return (
            self.segment_id == other.segment_id
            and self.name == other.name
            and self.environment == other.environment
            and np.array_equal(self.polyline, other.polyline)
        )


@dataclass(frozen=True)
class RouteMap:
    """The walking route as identified, typed polyline segments.

    ``corridor_m`` is the half-width within which a GPS fix is attributed to
    a segment.  Segments are kept sorted by id.
    """

    segments: tuple
    corridor_m: float = DEFAULT_CORRIDOR_M

    def __post_init__(self) -> None:
        segments = tuple(sorted(self.segments, key=lambda s: s.segment_id))
        if not segments:
            raise InvalidValueError("route must contain at least one segment")
        ids = [s.segment_id for s in segments]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise InvalidValueError(f"duplicate segment ids: {dupes}")
        if not (float(self.corridor_m) > 0):
            raise InvalidValueError("corridor_m must be > 0")
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "corridor_m", float(self.corridor_m))

    def segment_ids(self) -> tuple:
        return tuple(s.segment_id for s in self.segments)

    def by_id(self, segment_id: int) -> RouteSegment:
        for seg in self.segments:
            if seg.segment_id == segment_id:
                return seg
        raise MissingReferenceError(f"no segment with id {segment_id}")


@dataclass(frozen=True)
class ParticipantFiles:
    """File set recorded for one participant."""

    participant_id: str
    channels: Mapping[str, Path]  # channel kind -> file path
    ibi_path: Path
    gps_path: Path


@dataclass(frozen=True)
class StudyManifest:
    """Validated study layout: who was recorded, where the files live, and
    how the stress/neutral episode windows are defined."""

    participants: tuple
    route_path: Path
    stress_segment_id: int
    crossing_start_epoch: Mapping[str, float]  # participant id -> epoch
    neutral_segment_id: int
    window_offset_s: float = 5.0
    window_duration_s: float = 30.0
    subjective_rankings: Mapping[int, float] | None = None

    def participant_ids(self) -> tuple:
        return tuple(p.participant_id for p in self.participants)


# ---------------------------------------------------------------------------
# line-oriented parsing helpers


def _lines(stream: IO[str] | Iterable[str]) -> Iterator[tuple[int, str]]:
    """Yield (1-based line number, stripped line), skipping blank lines."""
    for i, raw in enumerate(stream, start=1):
        line = raw.strip()
        if line:
            yield i, line


def _float_token(token: str, lineno: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise InvalidValueError(f"line {lineno}: {what} {token!r} is not a number") from None
    if not math.isfinite(value):
        raise InvalidValueError(f"line {lineno}: {what} {token!r} is not finite")
    return value


# ---------------------------------------------------------------------------
# parsers


def parse_uniform_channel(stream: IO[str] | Iterable[str], channel_kind: str) -> SampleSeries:
    """Parse a channel CSV: start epoch, rate in Hz, then one value per line."""
    lines = _lines(stream)
    try:
        _, epoch_tok = next(lines)
        _, rate_tok = next(lines)
    except StopIteration:
        raise FormatError("channel file needs a start-epoch line and a rate line") from None
    try:
        start_epoch = float(epoch_tok)
        rate_hz = float(rate_tok)
    except ValueError:
        raise FormatError(f"malformed channel header: {epoch_tok!r} / {rate_tok!r}") from None
    if not (math.isfinite(start_epoch) and math.isfinite(rate_hz)) or rate_hz <= 0:
        raise FormatError(f"channel rate must be finite and > 0, got {rate_tok!r}")

    values = []
    for lineno, line in lines:
        values.append(_float_token(line, lineno, "sample value"))
    if not values:
        raise FormatError("channel file contains no samples")
    return SampleSeries(channel_kind, start_epoch, rate_hz, values)


def parse_ibi_file(stream: IO[str] | Iterable[str]) -> IbiSeries:
    """Parse an IBI CSV: session start epoch, then ``offset_s,ibi_s`` rows.

    Intervals outside ``IBI_SUSPECT_BOUNDS_S`` are flagged in ``suspect`` but
    retained raw; cleaning is a separate analysis step.
    """
    lines = _lines(stream)
    try:
        _, epoch_tok = next(lines)
    except StopIteration:
        raise FormatError("IBI file needs a session start-epoch line") from None
    try:
        start_epoch = float(epoch_tok)
    except ValueError:
        raise FormatError(f"malformed IBI header: {epoch_tok!r}") from None
    if not math.isfinite(start_epoch):
        raise FormatError(f"IBI start epoch {epoch_tok!r} is not finite")

    offsets: list[float] = []
    ibis: list[float] = []
    suspect = set()
    lo, hi = IBI_SUSPECT_BOUNDS_S
    for lineno, line in lines:
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'offset_s,ibi_s', got {line!r}")
        offset = _float_token(parts[0], lineno, "beat offset")
        ibi = _float_token(parts[1], lineno, "interbeat interval")
        if offsets and offset <= offsets[-1]:
            raise OrderError(f"line {lineno}: beat offsets must be strictly increasing")
        if ibi <= 0:
            raise InvalidValueError(f"line {lineno}: interbeat interval must be positive")
        if not (lo < ibi < hi):
            suspect.add(len(offsets))
        offsets.append(offset)
        ibis.append(ibi)

    beat_epoch = [start_epoch + o for o in offsets]
    return IbiSeries(beat_epoch, ibis, suspect=frozenset(suspect))


def parse_gps_track(stream: IO[str] | Iterable[str]) -> GpsTrack:
    """Parse a GPS CSV with header ``epoch,lat,lon``."""
    lines = _lines(stream)
    try:
        _, header = next(lines)
    except StopIteration:
        raise FormatError("GPS file is empty") from None
    if [c.strip() for c in header.split(",")] != ["epoch", "lat", "lon"]:
        raise FormatError(f"GPS header must be 'epoch,lat,lon', got {header!r}")

    epochs: list[float] = []
    lats: list[float] = []
    lons: list[float] = []
    for lineno, line in lines:
        parts = line.split(",")
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected 'epoch,lat,lon', got {line!r}")
        epoch = _float_token(parts[0], lineno, "epoch")
        lat = _float_token(parts[1], lineno, "latitude")
        lon = _float_token(parts[2], lineno, "longitude")
        if abs(lat) > 90.0:
            raise InvalidValueError(f"line {lineno}: latitude {lat} out of [-90, 90]")
        if abs(lon) > 180.0:
            raise InvalidValueError(f"line {lineno}: longitude {lon} out of [-180, 180]")
        if epochs and epoch <= epochs[-1]:
            raise OrderError(f"line {lineno}: fix epochs must be strictly increasing")
        epochs.append(epoch)
        lats.append(lat)
        lons.append(lon)
    return GpsTrack(epochs, lats, lons)


def load_route(stream: IO[str] | str) -> RouteMap:
    """Load the walking route from a GeoJSON FeatureCollection of LineStrings.

    Each feature needs properties ``segment_id``, ``name`` and
    ``environment``.  GeoJSON stores coordinates as (lon, lat); they are
    transposed into the package's (lat, lon) convention here.
    """
    text = stream if isinstance(stream, str) else stream.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"route file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise FormatError("route file must be a GeoJSON FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list):
        raise FormatError("route FeatureCollection has no feature list")

    segments = []
    for feature in features:
        props = feature.get("properties") or {}
        geometry = feature.get("geometry") or {}
        for key in ("segment_id", "name", "environment"):
            if key not in props:
                raise FormatError(f"route feature is missing property {key!r}")
        if geometry.get("type") != "LineString":
            raise FormatError(
                f"segment {props['segment_id']}: geometry must be a LineString"
            )
        coords = geometry.get("coordinates")
        if not isinstance(coords, list) or len(coords) < 2:
            raise FormatError(
                f"segment {props['segment_id']}: LineString needs >= 2 points"
            )
        polyline = [(pt[1], pt[0]) for pt in coords]  # (lon, lat) -> (lat, lon)
        segments.append(
            RouteSegment(
                segment_id=int(props["segment_id"]),
                name=str(props["name"]),
                environment=str(props["environment"]),
                polyline=polyline,
            )
        )
    corridor = doc.get("corridor_m", DEFAULT_CORRIDOR_M)
    ids = [s.segment_id for s in segments]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise FormatError(f"duplicate segment ids in route: {dupes}")
    return RouteMap(tuple(segments), corridor_m=corridor)


_MANIFEST_KEYS = {
    "participants",
    "route",
    "stress_event",
    "neutral_segment_id",
    "window_offset_s",
    "window_duration_s",
    "subjective_rankings",
}


def load_manifest(stream: IO[str] | str, base_dir: str | Path = ".") -> StudyManifest:
    """Load and validate a study manifest (JSON).

    Relative paths are resolved against ``base_dir``.  Validation checks that
    every referenced file exists, the route parses, referenced segment ids
    exist in the route, and every participant has a crossing start epoch.
    """
    base = Path(base_dir)
    text = stream if isinstance(stream, str) else stream.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("manifest must be a JSON object")
    unknown = set(doc) - _MANIFEST_KEYS
    if unknown:
        raise FormatError(f"manifest has unknown keys: {sorted(unknown)}")
    for key in ("participants", "route", "stress_event", "neutral_segment_id"):
        if key not in doc:
            raise FormatError(f"manifest is missing {key!r}")

    route_path = base / doc["route"]
    if not route_path.is_file():
        raise MissingReferenceError(f"route file does not exist: {route_path}")
    with open(route_path, encoding="utf-8") as fh:
        route = load_route(fh)
    route_ids = set(route.segment_ids())

    raw_participants = doc["participants"]
    if not isinstance(raw_participants, list) or not raw_participants:
        raise FormatError("manifest needs a non-empty participant list")
    participants = []
    seen_ids = set()
    for entry in raw_participants:
        pid = entry.get("participant_id")
        if not pid or not isinstance(pid, str):
            raise FormatError("participant entry is missing participant_id")
        if pid in seen_ids:
            raise FormatError(f"duplicate participant_id {pid!r}")
        seen_ids.add(pid)
        channels = entry.get("channels")
        if not isinstance(channels, dict) or not channels:
            raise FormatError(f"participant {pid}: needs a non-empty channel map")
        channel_paths = {}
        for kind, rel in channels.items():
            if kind not in CHANNEL_KINDS:
                raise FormatError(f"participant {pid}: unknown channel kind {kind!r}")
            path = base / rel
            if not path.is_file():
                raise MissingReferenceError(
                    f"participant {pid}: channel file does not exist: {path}"
                )
            channel_paths[kind] = path
        for key in ("ibi", "gps"):
            if key not in entry:
                raise FormatError(f"participant {pid}: missing {key!r} path")
        ibi_path = base / entry["ibi"]
        gps_path = base / entry["gps"]
        for path in (ibi_path, gps_path):
            if not path.is_file():
                raise MissingReferenceError(f"participant {pid}: file does not exist: {path}")
        participants.append(
            ParticipantFiles(
                participant_id=pid,
                channels=channel_paths,
                ibi_path=ibi_path,
                gps_path=gps_path,
            )
        )

    stress = doc["stress_event"]
    if not isinstance(stress, dict) or "segment_id" not in stress or "crossing_start_epoch" not in stress:
        raise FormatError("stress_event needs 'segment_id' and 'crossing_start_epoch'")
    stress_segment_id = int(stress["segment_id"])
    if stress_segment_id not in route_ids:
        raise MissingReferenceError(f"stress segment {stress_segment_id} is not in the route")
    crossing = {str(k): float(v) for k, v in stress["crossing_start_epoch"].items()}
    missing_epochs = seen_ids - set(crossing)
    if missing_epochs:
        raise MissingReferenceError(
            f"no crossing start epoch for participants: {sorted(missing_epochs)}"
        )

    neutral_segment_id = int(doc["neutral_segment_id"])
    if neutral_segment_id not in route_ids:
        raise MissingReferenceError(f"neutral segment {neutral_segment_id} is not in the route")

    offset_s = float(doc.get("window_offset_s", 5.0))
    duration_s = float(doc.get("window_duration_s", 30.0))
    if duration_s <= 0:
        raise InvalidValueError("window_duration_s must be > 0")
    if offset_s < 0:
        raise InvalidValueError("window_offset_s must be >= 0")

    rankings = None
    if doc.get("subjective_rankings") is not None:
        rankings = {int(k): float(v) for k, v in doc["subjective_rankings"].items()}
        dangling = set(rankings) - route_ids
        if dangling:
            raise MissingReferenceError(
                f"subjective rankings reference unknown segments: {sorted(dangling)}"
            )

    return StudyManifest(
        participants=tuple(participants),
        route_path=route_path,
        stress_segment_id=stress_segment_id,
        crossing_start_epoch=crossing,
        neutral_segment_id=neutral_segment_id,
        window_offset_s=offset_s,
        window_duration_s=duration_s,
        subjective_rankings=rankings,
    )


def load_manifest_file(path: str | Path) -> StudyManifest:
    """Convenience wrapper: load a manifest resolving paths against its directory."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return load_manifest(fh, base_dir=path.parent)


# ---------------------------------------------------------------------------
# writers (exact inverses of the parsers; floats via repr so that
# parse -> write -> parse is the identity)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_uniform_channel(series: SampleSeries, stream: IO[str]) -> None:
    stream.write(_fmt(series.start_epoch) + "\n")
    stream.write(_fmt(series.rate_hz) + "\n")
    for v in series.values:
        stream.write(_fmt(v) + "\n")


def write_ibi_file(ibis: IbiSeries, stream: IO[str], start_epoch: float) -> None:
    """Write an IBI file with offsets relative to ``start_epoch``.

    ``start_epoch`` must not exceed the first beat epoch so offsets stay
    non-negative and ordering is preserved.
    """
    if len(ibis) and ibis.beat_epoch[0] < start_epoch:
        raise InvalidValueError("start_epoch is after the first beat")
    stream.write(_fmt(start_epoch) + "\n")
    for beat, ibi in zip(ibis.beat_epoch, ibis.ibi_s):
        stream.write(f"{_fmt(beat - start_epoch)},{_fmt(ibi)}\n")


def write_gps_track(track: GpsTrack, stream: IO[str]) -> None:
    stream.write("epoch,lat,lon\n")
    for epoch, lat, lon in zip(track.epoch, track.lat, track.lon):
        stream.write(f"{_fmt(epoch)},{_fmt(lat)},{_fmt(lon)}\n")


def route_to_geojson(route: RouteMap) -> dict:
    features = []
    for seg in route.segments:
        features.append(
            {
                "type": "Feature",
                "properties": {
                    "segment_id": seg.segment_id,
                    "name": seg.name,
                    "environment": seg.environment,
                },
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[float(lon), float(lat)] for lat, lon in seg.polyline],
                },
            }
        )
    return {"type": "FeatureCollection", "corridor_m": route.corridor_m, "features": features}


def write_route(route: RouteMap, stream: IO[str]) -> None:
    json.dump(route_to_geojson(route), stream, indent=2)
    stream.write("\n")


def write_manifest(manifest: StudyManifest, stream: IO[str], base_dir: str | Path = ".") -> None:
    """Write a manifest JSON with paths relative to ``base_dir``."""
    base = Path(base_dir)

    def rel(path: Path) -> str:
        return os.path.relpath(path, base)

    doc: dict = {
        "participants": [
            {
                "participant_id": p.participant_id,
                "channels": {kind: rel(path) for kind, path in sorted(p.channels.items())},
                "ibi": rel(p.ibi_path),
                "gps": rel(p.gps_path),
            }
            for p in manifest.participants
        ],
        "route": rel(manifest.route_path),
        "stress_event": {
            "segment_id": manifest.stress_segment_id,
            "crossing_start_epoch": {
                pid: manifest.crossing_start_epoch[pid] for pid in sorted(manifest.crossing_start_epoch)
            },
        },
        "neutral_segment_id": manifest.neutral_segment_id,
        "window_offset_s": manifest.window_offset_s,
        "window_duration_s": manifest.window_duration_s,
    }
    if manifest.subjective_rankings is not None:
        doc["subjective_rankings"] = {
            str(k): manifest.subjective_rankings[k] for k in sorted(manifest.subjective_rankings)
        }
    json.dump(doc, stream, indent=2)
    stream.write("\n")
