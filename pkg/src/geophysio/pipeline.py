"""End-to-end study analysis: ingest -> align -> geo -> indexes -> stats.

``analyze_study`` turns a manifest into per-participant geo-referenced
tracks, pooled per-segment summaries and the cohort index comparison;
``write_outputs`` emits the three report artifacts:

* ``track_<participant>.geojson`` -- one Point feature per fix with the
  attached signal values, segment id and speed
* ``segments.csv``               -- per-segment mean EDA/HR and subjective rank
* ``stats.json``                 -- per-index paired t-test rows plus exclusions

Participants are independent work units and can be processed concurrently;
results are merged in manifest order so outputs are deterministic.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .eda import EdaConfig, decompose, detect_scrs, indexes_from_events
from .episodes import (
    INDEX_ORDER,
    EpisodeWindow,
    Exclusion,
    PairedTestResult,
    ParticipantIndexes,
    SegmentSummary,
    compare_episodes,
    make_crossing_window,
    segment_summaries,
    split_complete,
)
from .errors import GeoPhysioError, InsufficientDataError, InvalidValueError
from .geotrack import assign_segments, derive_speed, segment_id_array
from .hrv import HrvConfig, hrv_indexes
from .ingest import (
    ParticipantFiles,
    RouteMap,
    StudyManifest,
    load_manifest_file,
    load_route,
    parse_gps_track,
    parse_ibi_file,
    parse_uniform_channel,
)
from .timealign import DEFAULT_TOLERANCE_S, GeoSampleTrack, downsample_mean, join_to_track


class InputFilesError(GeoPhysioError):
    """One or more participant files were unreadable or unusable."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))


@dataclass(frozen=True)
class RunConfig:
    manifest_path: Path
    out_dir: Path
    eda: EdaConfig = field(default_factory=EdaConfig)
    hrv: HrvConfig = field(default_factory=HrvConfig)
    corridor_m: float | None = None  # None -> use the route file's value
    tolerance_s: float = DEFAULT_TOLERANCE_S
    jobs: int = 1


@dataclass
class ParticipantOutput:
    participant_id: str
    geo: GeoSampleTrack
    indexes: ParticipantIndexes
    windows: dict
    unmatched_eda: int
    unmatched_hr: int
    notes: tuple


@dataclass
class StudyResult:
    manifest: StudyManifest
    route: RouteMap
    participants: list
    summaries: list
    stats: list
    exclusions: list
    notice: str | None


def _parse_file(path: Path, parser, *args):
    with open(path, encoding="utf-8") as fh:
        return parser(fh, *args)


def _to_1hz(series, what: str):
    rate = series.rate_hz
    k = round(rate)
    if abs(rate - k) > 1e-9 or k < 1:
        raise InvalidValueError(
            f"{what} channel at {rate} Hz cannot be aligned to the 1 Hz GPS clock; "
            "only integer rates >= 1 Hz are supported"
        )
    return downsample_mean(series, int(k)) if k > 1 else series


def _nan_table() -> dict:
    return {name: float("nan") for name in INDEX_ORDER}


def process_participant(
    files: ParticipantFiles,
    manifest: StudyManifest,
    route: RouteMap,
    config: RunConfig,
) -> ParticipantOutput:
    """Run the full per-participant pipeline; raises on unreadable inputs."""
    pid = files.participant_id
    for kind in ("EDA", "HR"):
        if kind not in files.channels:
            raise InvalidValueError(f"participant {pid} has no {kind} channel")
    eda_raw = _parse_file(files.channels["EDA"], parse_uniform_channel, "EDA")
    hr_raw = _parse_file(files.channels["HR"], parse_uniform_channel, "HR")
    ibis = _parse_file(files.ibi_path, parse_ibi_file)
    gps = _parse_file(files.gps_path, parse_gps_track)

    geo, report = join_to_track(
        gps, _to_1hz(eda_raw, "EDA"), _to_1hz(hr_raw, "HR"), config.tolerance_s
    )
    assignments = assign_segments(gps, route)
    geo = geo.with_segments(segment_id_array(assignments))
    if len(gps) >= 2:
        geo = geo.with_speeds(derive_speed(gps))

    notes: list[str] = []
    windows: dict = {}
    windows["stress"] = make_crossing_window(
        manifest.crossing_start_epoch[pid],
        manifest.window_offset_s,
        manifest.window_duration_s,
        label="crossing",
    )
    neutral_fixes = np.flatnonzero(geo.segment_id == manifest.neutral_segment_id)
    if neutral_fixes.size:
        windows["neutral"] = make_crossing_window(
            float(geo.epoch[neutral_fixes[0]]),
            manifest.window_offset_s,
            manifest.window_duration_s,
            label="neutral",
        )
    else:
        windows["neutral"] = None
        notes.append(f"no fix assigned to neutral segment {manifest.neutral_segment_id}")

    events = None
    try:
        decomp = decompose(eda_raw, config.eda)
        events = detect_scrs(decomp.phasic, config.eda.scr_threshold_uS)
    except (GeoPhysioError,) as exc:
        notes.append(f"EDA decomposition failed: {exc}")

    tables = {}
    for label in ("neutral", "stress"):
        window = windows[label]
        table = _nan_table()
        if window is not None:
            if events is not None:
                try:
                    idx = indexes_from_events(eda_raw, events, window.bounds)
                    table["nSCR"] = float(idx.n_scr)
                    table["AmpSum"] = idx.amp_sum_uS
                    table["PhasicMax"] = idx.phasic_max_uS
                    table["GlobalMean"] = idx.global_mean_uS
                    table["MaxDeflection"] = idx.max_deflection_uS
                except InsufficientDataError as exc:
                    notes.append(f"{label} window has no EDA data: {exc}")
            hrv_idx = hrv_indexes(ibis, window.bounds, config.hrv)
            table["SDNN"] = hrv_idx.sdnn_ms
            table["pNN50"] = hrv_idx.pnn50
            table["LF/HF"] = hrv_idx.lf_hf
        tables[label] = table

    return ParticipantOutput(
        participant_id=pid,
        geo=geo,
        indexes=ParticipantIndexes(pid, tables["neutral"], tables["stress"]),
        windows=windows,
        unmatched_eda=report.unmatched_eda,
        unmatched_hr=report.unmatched_hr,
        notes=tuple(notes),
    )


def analyze_study(config: RunConfig) -> StudyResult:
    """Analyze every participant in a manifest and compare the episodes."""
    manifest = load_manifest_file(config.manifest_path)
    with open(manifest.route_path, encoding="utf-8") as fh:
        route = load_route(fh)
    if config.corridor_m is not None:
        route = replace(route, corridor_m=config.corridor_m)

    def worker(files: ParticipantFiles):
        try:
            return process_participant(files, manifest, route, config)
        except (GeoPhysioError, OSError) as exc:
            return f"{files.participant_id}: {exc}"

    jobs = max(1, int(config.jobs))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(worker, manifest.participants))
    else:
        outcomes = [worker(files) for files in manifest.participants]

    diagnostics = [o for o in outcomes if isinstance(o, str)]
    if diagnostics:
        raise InputFilesError(diagnostics)
    participants: list[ParticipantOutput] = outcomes

    summaries = segment_summaries(
        [p.geo for p in participants], route, manifest.subjective_rankings
    )
    indexes = [p.indexes for p in participants]
    notice = None
    stats: list[PairedTestResult] = []
    exclusions: list[Exclusion] = []
    if len(participants) < 2:
        notice = "insufficient cohort: paired tests need at least 2 participants"
    else:
        try:
            stats, exclusions = compare_episodes(indexes)
        except InsufficientDataError as exc:
            _, exclusions = split_complete(indexes)
            notice = f"insufficient cohort: {exc}"
    return StudyResult(
        manifest=manifest,
        route=route,
        participants=participants,
        summaries=summaries,
        stats=stats,
        exclusions=exclusions,
        notice=notice,
    )


# ---------------------------------------------------------------------------
# report writers (deterministic: fixed field order, 6 significant digits for
# derived quantities; epochs and coordinates keep full precision)


def _num(x: float | None):
    if x is None or not math.isfinite(x):
        return None
    return float(f"{x:.6g}")


def track_geojson(participant: ParticipantOutput) -> dict:
    geo = participant.geo
    features = []
    for i in range(len(geo)):
        seg = int(geo.segment_id[i])
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [round(float(geo.lon[i]), 6), round(float(geo.lat[i]), 6)],
                },
                "properties": {
                    "epoch": float(geo.epoch[i]),
                    "eda_uS": _num(geo.eda_uS[i]),
                    "hr_bpm": _num(geo.hr_bpm[i]),
                    "segment_id": seg if seg >= 0 else None,
                    "speed_mps": _num(geo.speed_mps[i]),
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def stats_document(result: StudyResult) -> dict:
    return {
        "n_participants": len(result.participants),
        "n_analyzed": len(result.participants) - len(result.exclusions),
        "results": [
            {
                "index": r.index_name,
                "n": r.n,
                "mean_neutral": _num(r.mean_neutral),
                "mean_stress": _num(r.mean_stress),
                "t": _num(r.t_stat),
                "df": r.df,
                "p": _num(r.p_two_tailed),
                "pct_expected": _num(r.pct_expected),
            }
            for r in result.stats
        ],
        "exclusions": [
            {"participant_id": e.participant_id, "missing": list(e.missing)}
            for e in result.exclusions
        ],
        "notice": result.notice,
    }


def write_outputs(result: StudyResult, out_dir: str | Path) -> list[Path]:
    """Write the three artifacts; on failure, remove anything written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for participant in result.participants:
            path = out / f"track_{participant.participant_id}.geojson"
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(track_geojson(participant), fh)
                fh.write("\n")
            written.append(path)

        path = out / "segments.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["segment_id", "environment", "mean_eda_uS", "mean_hr_bpm", "subjective_rank"]
            )
            for s in result.summaries:
                writer.writerow(
                    [
                        s.segment_id,
                        s.environment,
                        _fmt_csv(s.mean_eda_uS),
                        _fmt_csv(s.mean_hr_bpm),
                        _fmt_csv(s.subjective_rank),
                    ]
                )
        written.append(path)

        path = out / "stats.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(stats_document(result), fh, indent=2)
            fh.write("\n")
        written.append(path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written


def _fmt_csv(x) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return ""
    return f"{x:.6g}"
