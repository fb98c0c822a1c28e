"""Geo-referenced physiology: fuse wearable EDA/HR/IBI logs with GPS tracks,
compute per-segment and per-episode stress indexes, and compare stressful
against neutral episodes across a cohort."""

from .errors import (
    DegenerateDataError,
    FormatError,
    GeoPhysioError,
    InsufficientDataError,
    InvalidValueError,
    MissingReferenceError,
    OrderError,
)
from .ingest import (
    GpsTrack,
    IbiSeries,
    ParticipantFiles,
    RouteMap,
    RouteSegment,
    SampleSeries,
    StudyManifest,
    load_manifest,
    load_manifest_file,
    load_route,
    parse_gps_track,
    parse_ibi_file,
    parse_uniform_channel,
)
from .timealign import GeoSampleTrack, JoinReport, downsample_mean, join_to_track, slice_window
from .geotrack import (
    SegmentAssignment,
    assign_segments,
    derive_speed,
    haversine_m,
    point_to_polyline_m,
)
from .eda import (
    EdaConfig,
    EdaDecomposition,
    EdaIndexes,
    ScrEvent,
    decompose,
    detect_scrs,
    eda_indexes,
)
from .hrv import (
    HrvConfig,
    HrvIndexes,
    Spectrum,
    band_power,
    clean_ibis,
    hrv_indexes,
    interpolate_ibis,
    lf_hf,
    mean_hr,
    pnn50,
    psd,
    sdnn,
)
from .episodes import (
    INDEX_ORDER,
    EpisodeWindow,
    Exclusion,
    PairedTestResult,
    ParticipantIndexes,
    SegmentSummary,
    compare_episodes,
    make_crossing_window,
    paired_t,
    segment_summaries,
    t_to_p,
)
from .synth import GeneratedCohort, SynthSpec, default_route, generate_cohort, straight_route
from .pipeline import RunConfig, StudyResult, analyze_study, write_outputs

__version__ = "0.1.0"
