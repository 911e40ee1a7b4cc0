"""Sample sites along road polylines and season tags of panoramas.

Distances and bearings are geodesics on a sphere of radius EARTH_RADIUS_M.
"""
import bisect
import collections
import dataclasses
import logging
import math

import pyproj

from . import errors
from . import glare
from . import solar
from . import util

logger = logging.getLogger(__name__)

EARTH_RADIUS_M = 6371008.8
DEFAULT_SPACING_M = 40.0
LEAF_ON_MONTHS = frozenset(range(5, 11))

GEOD = pyproj.Geod(a=EARTH_RADIUS_M, b=EARTH_RADIUS_M)

# Chainages within this fraction of the spacing from a multiple count as one.
_SPACING_TOLERANCE = 1e-6
# Sites closer than this to a vertex are taken to lie on it.
_VERTEX_TOLERANCE_M = 1e-6


@dataclasses.dataclass(frozen=True)
class RoadSegment:
    """A road polyline; `bidirectional` streets are driven both ways."""

    id: str
    polyline: tuple
    bidirectional: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'polyline', tuple(self.polyline))
        if len(self.polyline) < 2:
            raise errors.InvalidArgumentError(
                f'segment {self.id!r} needs at least two vertices')


@dataclasses.dataclass(frozen=True)
class SampleSite:
    """A point on a road where glare is evaluated."""

    site_id: str
    position: solar.GeoPosition
    heading_deg: float
    segment_id: str
    chainage_m: float
    reverse_heading_deg: float = None

    def poses(self, slope_deg=0.0):
        """Returns [(direction, DriverPose)] for every way the street is driven."""
        poses = [('forward', glare.DriverPose(self.position, self.heading_deg,
                                              slope_deg))]
        if self.reverse_heading_deg is not None:
            poses.append(('reverse', glare.DriverPose(
                self.position, self.reverse_heading_deg, -slope_deg)))
        return poses


@dataclasses.dataclass(frozen=True)
class SeasonTag:
    leaf_on: bool


SeasonPartition = collections.namedtuple(
    'SeasonPartition', ['leaf_on', 'leaf_off', 'invalid'])


def bearing(a, b):
    """Returns the initial geodesic bearing from `a` to `b` in [0, 360).

    Raises:
        InvalidArgumentError: the points coincide.
    """
    if (a.lon, a.lat) == (b.lon, b.lat):
        raise errors.InvalidArgumentError(f'bearing of identical points {a}')
    azimuth, _, _ = GEOD.inv(a.lon, a.lat, b.lon, b.lat)
    return util.normalize_degrees(azimuth)


def distance(a, b):
    """Returns the geodesic distance between two positions, in meters."""
    _, _, meters = GEOD.inv(a.lon, a.lat, b.lon, b.lat)
    return meters


def sample_segment(segment, spacing_m=DEFAULT_SPACING_M):
    """Places sites every `spacing_m` meters along a segment.

    Sites sit at chainages 0, spacing, 2*spacing, ... up to the segment
    length. Each heading is the bearing of the sub-segment holding the site;
    a site on a vertex takes the outgoing sub-segment.

    Raises:
        InvalidArgumentError: spacing is not positive.
    """
    if not spacing_m > 0:
        raise errors.InvalidArgumentError(
            f'spacing must be positive, got {spacing_m}')
    vertices = [v for i, v in enumerate(segment.polyline)
                if i == 0 or (v.lon, v.lat) != (segment.polyline[i - 1].lon,
                                                segment.polyline[i - 1].lat)]
    if len(vertices) < 2:
        logger.warning('Skipping zero-length segment %r', segment.id)
        return []

    azimuths, lengths = [], []
    for a, b in zip(vertices, vertices[1:]):
        azimuth, _, meters = GEOD.inv(a.lon, a.lat, b.lon, b.lat)
        azimuths.append(util.normalize_degrees(azimuth))
        lengths.append(meters)
    offsets = [0.0]
    for meters in lengths:
        offsets.append(offsets[-1] + meters)
    total = offsets[-1]
    if total <= 0.0:
        logger.warning('Skipping zero-length segment %r', segment.id)
        return []

    count = math.floor(total / spacing_m + _SPACING_TOLERANCE) + 1
    sites = []
    for k in range(count):
        chainage = min(k * spacing_m, total)
        index = bisect.bisect_right(offsets, chainage + _VERTEX_TOLERANCE_M) - 1
        index = min(index, len(lengths) - 1)
        start = vertices[index]
        lon, lat, _ = GEOD.fwd(start.lon, start.lat, azimuths[index],
                               chainage - offsets[index])
        heading = azimuths[index]
        sites.append(SampleSite(
            site_id=f'{segment.id}@{k * spacing_m:.1f}',
            position=solar.GeoPosition(lon, lat),
            heading_deg=heading,
            segment_id=segment.id,
            chainage_m=chainage,
            reverse_heading_deg=(util.normalize_degrees(heading + 180.0)
                                 if segment.bidirectional else None)))
    return sites


def sample_network(segments, spacing_m=DEFAULT_SPACING_M):
    """Samples every segment of a network, in input order."""
    sites = []
    for segment in segments:
        sites.extend(sample_segment(segment, spacing_m))
    return sites


def season_tag(month):
    """Returns the SeasonTag of a capture month.

    Raises:
        InvalidMetadataError: month is outside of [1, 12].
    """
    if not isinstance(month, int) or not 1 <= month <= 12:
        raise errors.InvalidMetadataError(f'capture month {month!r} is invalid')
    return SeasonTag(leaf_on=month in LEAF_ON_MONTHS)


def classify_season(frames):
    """Partitions frames into leaf-on, leaf-off and invalid-metadata lists."""
    partition = SeasonPartition([], [], [])
    for frame in frames:
        try:
            tag = season_tag(frame.capture_month)
        except errors.InvalidMetadataError as err:
            logger.warning('Frame %r: %s', frame.pano_id, err)
            partition.invalid.append(frame)
            continue
        (partition.leaf_on if tag.leaf_on else partition.leaf_off).append(frame)
    logger.info('Season coverage: %d leaf-on, %d leaf-off, %d invalid',
                len(partition.leaf_on), len(partition.leaf_off),
                len(partition.invalid))
    return partition
