"""Sun elevation and azimuth for any location and instant.

The ephemeris is the declination / equation-of-time formulation published
with the NOAA solar calculator (after Meeus). Positions are geometric: no
atmospheric refraction is applied. Against independent ephemerides it agrees
to better than 0.05 degrees for years 1950-2100, which is the window accepted
here.

Instants are timezone-aware `datetime.datetime` objects. Two instants with the
same absolute time compare equal whatever their UTC offsets, and produce the
same SolarPosition.
"""
import dataclasses
import datetime as dt
import functools
import math

import numpy as np

from . import errors
from . import util

MIN_YEAR = 1950
MAX_YEAR = 2100

J2000 = dt.datetime(2000, 1, 1, 12, tzinfo=dt.timezone.utc)
J2000_JULIAN_DAY = 2451545.0
MINUTES_PER_DAY = 1440.0


@dataclasses.dataclass(frozen=True)
class GeoPosition:
    """A query location in degrees: east longitude, north latitude."""

    lon: float
    lat: float

    def __post_init__(self):
        if not -180.0 <= self.lon <= 180.0:
            raise errors.InvalidArgumentError(
                f'longitude {self.lon} is outside of [-180, 180]')
        if not -90.0 <= self.lat <= 90.0:
            raise errors.InvalidArgumentError(
                f'latitude {self.lat} is outside of [-90, 90]')


@dataclasses.dataclass(frozen=True)
class SolarPosition:
    """Sun elevation above the horizon and azimuth clockwise from north."""

    elevation_deg: float
    azimuth_deg: float

    def __post_init__(self):
        if not -90.0 <= self.elevation_deg <= 90.0:
            raise errors.InvalidArgumentError(
                f'elevation {self.elevation_deg} is outside of [-90, 90]')
        object.__setattr__(
            self, 'azimuth_deg', util.normalize_degrees(self.azimuth_deg))


def make_instant(local, utc_offset_minutes):
    """Attaches an explicit UTC offset to a naive civil date-time."""
    return local.replace(tzinfo=util.fixed_offset(utc_offset_minutes))


def solar_position(site, t):
    """Returns the SolarPosition of the sun seen from `site` at instant `t`.

    Raises:
        InvalidArgumentError: `t` is a naive datetime.
        UnsupportedEpochError: `t` lies outside of years 1950-2100.
    """
    elevation, azimuth = _sun_angles(
        np.array([_julian_day(t)]), site.lat, site.lon)
    return SolarPosition(float(elevation[0]), float(azimuth[0]))


def sun_path(site, date, step, tzinfo=dt.timezone.utc, start=dt.time(0),
             end=None):
    """Returns the ordered (instant, SolarPosition) samples of a civil day.

    Args:
        site: GeoPosition observed from.
        date: civil date in `tzinfo`.
        step: positive datetime.timedelta between samples.
        tzinfo: zone the civil date and the returned instants belong to.
        start: local clock time of the first sample.
        end: local clock time of the last sample (inclusive); when omitted the
            samples run up to, but excluding, the next local midnight.

    Raises:
        InvalidArgumentError: step is zero or negative.
    """
    first = dt.datetime.combine(date, start).replace(tzinfo=tzinfo)
    if end is None:
        _, last = util.local_day_bounds(date, tzinfo)
        inclusive = False
    else:
        last = dt.datetime.combine(date, end).replace(tzinfo=tzinfo)
        inclusive = True
    instants = list(util.time_range(
        first.astimezone(dt.timezone.utc), last, step, inclusive=inclusive))
    if not instants:
        return []
    elevations, azimuths = _sun_angles(
        np.array([_julian_day(t) for t in instants]), site.lat, site.lon)
    return [(t.astimezone(tzinfo), SolarPosition(float(el), float(az)))
            for t, el, az in zip(instants, elevations, azimuths)]


def sun_diagram(site, year, step=dt.timedelta(hours=1), tzinfo=dt.timezone.utc,
                day=20, start=dt.time(5), end=dt.time(20)):
    """Returns {date: sun_path} for the given day of every month of a year."""
    dates = [dt.date(year, month, day) for month in range(1, 13)]
    return {d: sun_path(site, d, step, tzinfo, start=start, end=end)
            for d in dates}


def solar_noon(site, date):
    """Returns the UTC instant of local solar noon at `site` on `date`."""
    midnight = dt.datetime.combine(date, dt.time(0), tzinfo=dt.timezone.utc)
    minutes = 720.0 - 4.0 * site.lon
    # Two refinements settle the equation of time to well under a second.
    for _ in range(2):
        instant = midnight + dt.timedelta(minutes=minutes)
        _, eot = _declination_and_eot(np.array([_julian_day(instant)]))
        minutes = 720.0 - 4.0 * site.lon - float(eot[0])
    return midnight + dt.timedelta(minutes=minutes)


@functools.lru_cache(maxsize=64)
def day_samples(site, start_utc, stop_utc, step):
    """Returns cached (instants, elevations, azimuths) over [start, stop).

    Instants are UTC; the arrays are read-only and shared between callers.
    """
    instants = tuple(util.time_range(start_utc, stop_utc, step))
    elevations, azimuths = _sun_angles(
        np.array([_julian_day(t) for t in instants]), site.lat, site.lon)
    elevations.flags.writeable = False
    azimuths.flags.writeable = False
    return instants, elevations, azimuths


def _julian_day(t):
    """Returns the Julian day number of an aware instant."""
    if t.tzinfo is None or t.utcoffset() is None:
        raise errors.InvalidArgumentError(f'{t} carries no UTC offset')
    year = t.astimezone(dt.timezone.utc).year
    if not MIN_YEAR <= year <= MAX_YEAR:
        raise errors.UnsupportedEpochError(
            f'{t.isoformat()} is outside of the supported years '
            f'{MIN_YEAR}-{MAX_YEAR}')
    return J2000_JULIAN_DAY + (t - J2000).total_seconds() / 86400.0


def _declination_and_eot(jd):
    """Returns (declination in radians, equation of time in minutes)."""
    t = (jd - J2000_JULIAN_DAY) / 36525.0
    mean_long = np.mod(280.46646 + t * (36000.76983 + t * 0.0003032), 360.0)
    mean_anom = np.radians(357.52911 + t * (35999.05029 - 0.0001537 * t))
    ecc = 0.016708634 - t * (0.000042037 + 0.0000001267 * t)
    center = (np.sin(mean_anom) * (1.914602 - t * (0.004817 + 0.000014 * t))
              + np.sin(2.0 * mean_anom) * (0.019993 - 0.000101 * t)
              + np.sin(3.0 * mean_anom) * 0.000289)
    omega = np.radians(125.04 - 1934.136 * t)
    apparent_long = np.radians(
        mean_long + center - 0.00569 - 0.00478 * np.sin(omega))
    mean_obliquity = 23.0 + (26.0 + (
        21.448 - t * (46.815 + t * (0.00059 - t * 0.001813))) / 60.0) / 60.0
    obliquity = np.radians(mean_obliquity + 0.00256 * np.cos(omega))
    declination = np.arcsin(np.sin(obliquity) * np.sin(apparent_long))

    y = np.tan(obliquity / 2.0) ** 2
    l0 = np.radians(mean_long)
    eot = 4.0 * np.degrees(
        y * np.sin(2.0 * l0)
        - 2.0 * ecc * np.sin(mean_anom)
        + 4.0 * ecc * y * np.sin(mean_anom) * np.cos(2.0 * l0)
        - 0.5 * y * y * np.sin(4.0 * l0)
        - 1.25 * ecc * ecc * np.sin(2.0 * mean_anom))
    return declination, eot


def _sun_angles(jd, lat, lon):
    """Returns (elevations, azimuths) in degrees for an array of Julian days."""
    declination, eot = _declination_and_eot(jd)
    utc_minutes = np.mod(jd + 0.5, 1.0) * MINUTES_PER_DAY
    true_solar = np.mod(utc_minutes + eot + 4.0 * lon, MINUTES_PER_DAY)
    hour_angle = np.radians(true_solar / 4.0 - 180.0)

    lat_r = math.radians(lat)
    cos_zenith = (math.sin(lat_r) * np.sin(declination)
                  + math.cos(lat_r) * np.cos(declination) * np.cos(hour_angle))
    elevation = 90.0 - np.degrees(np.arccos(np.clip(cos_zenith, -1.0, 1.0)))
    azimuth = np.mod(np.degrees(np.arctan2(
        np.sin(hour_angle),
        np.cos(hour_angle) * math.sin(lat_r)
        - np.tan(declination) * math.cos(lat_r))) + 180.0, 360.0)
    azimuth = np.where(azimuth >= 360.0, 0.0, azimuth)
    return elevation, azimuth
