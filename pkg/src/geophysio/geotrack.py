"""Track geometry: great-circle distance, point-to-polyline distance,
corridor segment assignment and speed derivation.

Point-to-leg math runs in a local equirectangular projection about the query
point, which is accurate to well under a centimeter at walking-route scales
and avoids geodesic leg computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidValueError
from .ingest import GpsTrack, RouteMap

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class SegmentAssignment:
    """Attribution of one GPS fix to the nearest route segment.

    ``segment_id`` is None when the fix is farther than the corridor
    half-width from every segment; ``distance_m`` is always the distance to
    the nearest segment.
    """

    fix_index: int
    segment_id: int | None
    distance_m: float


def _check_coord(lat: float, lon: float) -> None:
    if not (math.isfinite(lat) and math.isfinite(lon)):
        raise InvalidValueError("coordinates must be finite")
    if abs(lat) > 90.0 or abs(lon) > 180.0:
        raise InvalidValueError(f"coordinate ({lat}, {lon}) out of range")


def _haversine_arrays(lat1, lon1, lat2, lon2) -> np.ndarray:
    phi1, phi2 = np.radians(lat1), np.radians(lat2)
    dphi = phi2 - phi1
    dlam = np.radians(lon2) - np.radians(lon1)
    a = np.sin(dphi / 2.0) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(dlam / 2.0) ** 2
    return EARTH_RADIUS_M * 2.0 * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def haversine_m(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in meters between two (lat, lon) points."""
    _check_coord(*a)
    _check_coord(*b)
    return float(_haversine_arrays(a[0], a[1], b[0], b[1]))


def _leg_distances_m(
    lat: np.ndarray, lon: np.ndarray, leg_a: np.ndarray, leg_b: np.ndarray
) -> np.ndarray:
    """Distance from each (lat, lon) point to one polyline leg, in meters.

    Projects the leg endpoints into each point's own local tangent plane and
    uses the clamped perpendicular projection, so points beyond an endpoint
    get the distance to that endpoint.
    """
    coslat = np.cos(np.radians(lat))
    ax = np.radians(leg_a[1] - lon) * coslat * EARTH_RADIUS_M
    ay = np.radians(leg_a[0] - lat) * EARTH_RADIUS_M
    bx = np.radians(leg_b[1] - lon) * coslat * EARTH_RADIUS_M
    by = np.radians(leg_b[0] - lat) * EARTH_RADIUS_M
    dx, dy = bx - ax, by - ay
    norm2 = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(norm2 > 0.0, -(ax * dx + ay * dy) / norm2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    cx = ax + t * dx
    cy = ay + t * dy
    return np.hypot(cx, cy)


def point_to_polyline_m(
    point: tuple[float, float], polyline: np.ndarray
) -> tuple[float, int]:
    """Minimum distance in meters from a point to a polyline, with the index
    of the nearest leg (ties go to the lowest index)."""
    _check_coord(*point)
    poly = np.asarray(polyline, dtype=float)
    if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 2:
        raise InvalidValueError("polyline needs >= 2 (lat, lon) vertices")
    lat = np.asarray([point[0]])
    lon = np.asarray([point[1]])
    best = math.inf
    best_leg = 0
    for leg in range(poly.shape[0] - 1):
        d = float(_leg_distances_m(lat, lon, poly[leg], poly[leg + 1])[0])
        if d < best:
            best = d
            best_leg = leg
    return best, best_leg


def assign_segments(track: GpsTrack, route: RouteMap) -> list[SegmentAssignment]:
    """Attribute each fix to its nearest route segment within the corridor.

    Ties are broken toward the lowest segment_id; fixes farther than
    ``route.corridor_m`` from every segment get ``segment_id=None``.
    """
    n = len(track)
    if n == 0:
        return []
    best_dist = np.full(n, np.inf)
    best_seg = np.full(n, -1, dtype=int)
    for seg in route.segments:  # sorted by id, so strict '<' keeps the lowest id on ties
        poly = seg.polyline
        seg_dist = np.full(n, np.inf)
        for leg in range(poly.shape[0] - 1):
            d = _leg_distances_m(track.lat, track.lon, poly[leg], poly[leg + 1])
            np.minimum(seg_dist, d, out=seg_dist)
        closer = seg_dist < best_dist
        best_dist[closer] = seg_dist[closer]
        best_seg[closer] = seg.segment_id
    within = best_dist <= route.corridor_m
    return [
        SegmentAssignment(
            fix_index=i,
            segment_id=int(best_seg[i]) if within[i] else None,
            distance_m=float(best_dist[i]),
        )
        for i in range(n)
    ]


def segment_id_array(assignments: list[SegmentAssignment]) -> np.ndarray:
    """Dense segment-id array for attaching to a track; -1 where unassigned."""
    return np.array(
        [a.segment_id if a.segment_id is not None else -1 for a in assignments], dtype=int
    )


def derive_speed(track: GpsTrack) -> np.ndarray:
    """Per-fix speed in m/s from consecutive fix distances; the first fix
    inherits the speed of the second."""
    if len(track) < 2:
        raise InsufficientDataError("speed needs at least two fixes")
    dist = _haversine_arrays(track.lat[:-1], track.lon[:-1], track.lat[1:], track.lon[1:])
    dt = np.diff(track.epoch)
    speeds = np.empty(len(track))
    speeds[1:] = dist / dt
    speeds[0] = speeds[1]
    return speeds
