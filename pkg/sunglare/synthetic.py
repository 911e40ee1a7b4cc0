"""Synthetic scenes with closed-form sky boundaries.

Skylines here are piecewise constant: the sky starts at a known elevation
that may change at given azimuths. Masks are built so every break falls on a
pixel edge, which makes "the sun is above the skyline" the exact same
predicate the mask encodes. Crossing instants of that predicate are then
found on the continuous sun path by bisection and serve as ground truth for
boundary predictions.
"""
import bisect
import dataclasses
import datetime as dt
import math

import numpy as np

from . import errors
from . import glare
from . import panorama
from . import roads
from . import solar
from . import util

CAMBRIDGE = solar.GeoPosition(-71.117, 42.376)
SYDNEY = solar.GeoPosition(151.209, -33.868)

DEFAULT_WIDTH = 3600
BISECTION_TOLERANCE = dt.timedelta(milliseconds=10)
BRACKET_STEP = dt.timedelta(seconds=10)
METERS_PER_DEGREE_LAT = roads.EARTH_RADIUS_M * math.pi / 180.0

# Heights of random canyon walls, in degrees above the horizon.
CANYON_MIN_DEG = 5.0
CANYON_MAX_DEG = 60.0


@dataclasses.dataclass(frozen=True)
class Skyline:
    """Elevation of the sky boundary as a step function of azimuth.

    `breaks` are ascending azimuths in [0, 360); `levels[i]` holds from
    `breaks[i]` up to the next break, wrapping around north. With no breaks
    the skyline is the constant `levels[0]`.
    """

    breaks: tuple
    levels: tuple

    def __post_init__(self):
        if len(self.levels) != max(1, len(self.breaks)):
            raise errors.InvalidArgumentError(
                'a skyline needs one level per break')
        if list(self.breaks) != sorted(self.breaks):
            raise errors.InvalidArgumentError('skyline breaks must ascend')

    @classmethod
    def constant(cls, elevation_deg):
        return cls((), (elevation_deg,))

    @classmethod
    def wall(cls, low_az, high_az, elevation_deg, open_deg=0.0):
        """A wall of `elevation_deg` from `low_az` to `high_az` (clockwise)."""
        low, high = util.normalize_degrees(low_az), util.normalize_degrees(high_az)
        if low < high:
            return cls((low, high), (elevation_deg, open_deg))
        return cls((high, low), (open_deg, elevation_deg))

    def elevation_at(self, azimuth_deg):
        if not self.breaks:
            return self.levels[0]
        index = bisect.bisect_right(self.breaks, util.normalize_degrees(azimuth_deg))
        return self.levels[index - 1]

    def above(self, sun):
        """Whether the sun is in open sky above this skyline."""
        return sun.elevation_deg > self.elevation_at(sun.azimuth_deg)


@dataclasses.dataclass(frozen=True)
class Scenario:
    """A pose, a date and a synthetic scene to validate boundaries against."""

    name: str
    pose: glare.DriverPose
    date: dt.date
    timezone: str
    skyline: Skyline
    tilt_deg: float = 0.0
    description: str = ''

    @property
    def tzinfo(self):
        return util.resolve_timezone(self.timezone)

    def frame(self, width=DEFAULT_WIDTH):
        return panorama.PanoramaFrame(
            pano_id=f'synthetic-{self.name}', position=self.pose.position,
            yaw_deg=self.pose.heading_deg, capture_year=self.date.year,
            capture_month=self.date.month, width=width, height=width // 2,
            tilt_deg=self.tilt_deg)

    def mask(self, width=DEFAULT_WIDTH):
        return skyline_mask(self.frame(width), self.skyline)


def skyline_mask(frame, skyline):
    """Rasterizes a skyline into a mask aligned with `frame`.

    A pixel is sky when the lowest elevation it covers is at or above the
    skyline elevation at the azimuth of its column center.
    """
    width, height = frame.width, frame.height
    column_azimuths = [
        panorama.pixel_to_direction(frame, panorama.PixelPoint(x + 0.5, 0.0))[0]
        for x in range(width)]
    column_levels = np.array([skyline.elevation_at(az) for az in column_azimuths])
    rows = np.arange(height)
    bottom_elevations = (frame.tilt_deg
                         + (height / 2.0 - (rows + 1)) * panorama.VERTICAL_SPAN_DEG
                         / height)
    # Tolerance absorbs the rounding of row edges that match a level exactly.
    sky = bottom_elevations[:, np.newaxis] >= column_levels[np.newaxis, :] - 1e-9
    labels = np.where(sky, panorama.SKY_LABEL, panorama.OBSTRUCTION_LABEL)
    return panorama.ObstructionMask(labels.astype(np.uint8),
                                    pano_id=frame.pano_id, source='model')


def all_sky_mask(width, pano_id=None):
    labels = np.full((width // 2, width), panorama.SKY_LABEL, dtype=np.uint8)
    return panorama.ObstructionMask(labels, pano_id=pano_id)


def all_building_mask(width, pano_id=None):
    labels = np.full((width // 2, width), panorama.OBSTRUCTION_LABEL,
                     dtype=np.uint8)
    return panorama.ObstructionMask(labels, pano_id=pano_id)


def random_canyon_skyline(rng, walls=8):
    """Returns a skyline of `walls` buildings of random azimuth span and height.

    Args:
        rng: numpy.random.Generator.
        walls: number of distinct wall segments around the horizon.
    """
    breaks = np.sort(rng.choice(3600, size=walls, replace=False)) / 10.0
    levels = np.round(rng.uniform(CANYON_MIN_DEG, CANYON_MAX_DEG, size=walls), 1)
    return Skyline(tuple(float(b) for b in breaks),
                   tuple(float(level) for level in levels))


def analytic_crossings(scenario, bracket_step=BRACKET_STEP,
                       tolerance=BISECTION_TOLERANCE):
    """Returns (instant, obstructed) where the sun crosses the skyline.

    Each instant is the first moment of the new state, located to within
    `tolerance` on the continuous sun path. Sunrise and sunset are not
    crossings.
    """
    site, tzinfo = scenario.pose.position, scenario.tzinfo
    start_utc, stop_utc = util.local_day_bounds(scenario.date, tzinfo)

    def obstructed(instant):
        return not scenario.skyline.above(solar.solar_position(site, instant))

    instants, elevations, azimuths = solar.day_samples(
        site, start_utc, stop_utc, bracket_step)
    crossings = []
    previous_t = previous_state = None
    for t, elevation, azimuth in zip(instants, elevations, azimuths):
        if elevation <= 0.0:
            previous_t = previous_state = None
            continue
        state = not scenario.skyline.above(
            solar.SolarPosition(float(elevation), float(azimuth)))
        if previous_state is not None and state != previous_state:
            low, high = previous_t, t
            while high - low > tolerance:
                middle = low + (high - low) / 2
                if obstructed(middle) == previous_state:
                    low = middle
                else:
                    high = middle
            crossings.append((high.astimezone(tzinfo), state))
        previous_t, previous_state = t, state
    return crossings


def street_grid(origin, rows, columns, block_m, prefix='grid'):
    """Returns an east-west/north-south grid of two-way streets.

    `rows` east-west streets and `columns` north-south streets are spaced
    `block_m` apart, starting at `origin` (south-west corner).
    """
    meters_per_degree_lon = METERS_PER_DEGREE_LAT * math.cos(
        math.radians(origin.lat))
    d_lat = block_m / METERS_PER_DEGREE_LAT
    d_lon = block_m / meters_per_degree_lon
    east = origin.lon + (columns - 1) * d_lon
    north = origin.lat + (rows - 1) * d_lat
    segments = []
    for row in range(rows):
        lat = origin.lat + row * d_lat
        segments.append(roads.RoadSegment(
            f'{prefix}-ew-{row}',
            [solar.GeoPosition(origin.lon, lat), solar.GeoPosition(east, lat)]))
    for column in range(columns):
        lon = origin.lon + column * d_lon
        segments.append(roads.RoadSegment(
            f'{prefix}-ns-{column}',
            [solar.GeoPosition(lon, origin.lat), solar.GeoPosition(lon, north)]))
    return segments


class InMemoryStore():
    """Resolves sites to frames and masks held in memory, keyed by site id."""

    def __init__(self, pairs=None):
        self._pairs = dict(pairs or {})

    def add(self, site_id, frame, mask):
        self._pairs[site_id] = (frame, mask)

    def resolve(self, site, radius_m=25.0, policy='leaf-on-recent'):
        del radius_m, policy  # Pairs are keyed by site, not by position.
        return self._pairs.get(site.site_id)


def city_store(sites, mask_factory, date, width=360):
    """Builds an InMemoryStore with one frame and mask per site.

    Args:
        sites: SampleSites of the city.
        mask_factory: callable(frame) -> ObstructionMask.
        date: capture date recorded on the frames.
        width: panorama width of the synthetic frames.
    """
    store = InMemoryStore()
    for site in sites:
        frame = panorama.PanoramaFrame(
            pano_id=f'synthetic-{site.site_id}', position=site.position,
            yaw_deg=site.heading_deg, capture_year=date.year,
            capture_month=date.month, width=width, height=width // 2)
        store.add(site.site_id, frame, mask_factory(frame))
    return store


SCENARIOS = {
    scenario.name: scenario for scenario in (
        Scenario(
            name='evening-building-edge',
            pose=glare.DriverPose(CAMBRIDGE, 270.0),
            date=dt.date(2018, 7, 5),
            timezone='America/New_York',
            skyline=Skyline.wall(260.0, 310.0, 15.8),
            description='westbound drive; a building edge blocks the setting '
                        'sun in the early evening'),
        Scenario(
            name='uniform-canyon-summer',
            pose=glare.DriverPose(CAMBRIDGE, 90.0),
            date=dt.date(2018, 6, 20),
            timezone='America/New_York',
            skyline=Skyline.constant(10.0),
            description='uniform 10 degree skyline; sun clears it after '
                        'sunrise and drops behind it before sunset'),
        Scenario(
            name='stepped-skyline-winter',
            pose=glare.DriverPose(CAMBRIDGE, 180.0),
            date=dt.date(2018, 12, 20),
            timezone='America/New_York',
            skyline=Skyline((0.0, 180.0), (8.0, 12.0)),
            description='lower buildings east of south than west of it'),
        Scenario(
            name='tilted-equinox',
            pose=glare.DriverPose(CAMBRIDGE, 90.0),
            date=dt.date(2018, 3, 20),
            timezone='America/New_York',
            skyline=Skyline.constant(20.0),
            tilt_deg=2.0,
            description='panorama captured with a 2 degree camera tilt'),
        Scenario(
            name='southern-winter',
            pose=glare.DriverPose(SYDNEY, 0.0),
            date=dt.date(2018, 6, 20),
            timezone='Australia/Sydney',
            skyline=Skyline.constant(12.0),
            description='northbound drive in the southern hemisphere winter'),
        Scenario(
            name='deep-canyon-winter',
            pose=glare.DriverPose(CAMBRIDGE, 180.0),
            date=dt.date(2018, 12, 20),
            timezone='America/New_York',
            skyline=Skyline.constant(30.0),
            description='walls higher than the winter sun ever climbs; no '
                        'crossing is expected'),
    )
}
