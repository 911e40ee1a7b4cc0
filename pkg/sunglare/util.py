"""Arbitrary utility functions for the sunglare tool."""
import datetime as dt
import functools
import math
import re

from dateutil import tz
import parsedatetime as pdt

from . import errors


def prime_coroutine_generator(coroutine_generator):
    """Calls `next()` on the coroutine generator so it can accept `send()`."""
    @functools.wraps(coroutine_generator)
    def primed_coroutine_generator(*args, **kwargs):
        gen = coroutine_generator(*args, **kwargs)
        _ = next(gen, None)
        return gen
    return primed_coroutine_generator


def normalize_degrees(angle):
    """Returns the angle wrapped into [0, 360)."""
    angle = math.fmod(angle, 360.0)
    if angle < 0.0:
        angle += 360.0
    # fmod of a tiny negative value can round up to exactly 360.
    return 0.0 if angle >= 360.0 else angle


def angular_distance(a, b):
    """Returns the minimal circular distance between two directions, in [0, 180]."""
    diff = math.fabs(math.fmod(a - b, 360.0))
    return 360.0 - diff if diff > 180.0 else diff


def time_range(start, stop, step, inclusive=False):
    """Yields instants from `start` in increments of `step` up to `stop`.

    Args:
        start: first instant.
        stop: last instant, excluded unless `inclusive` is set.
        step: positive datetime.timedelta.
        inclusive: whether an instant equal to `stop` is yielded.

    Raises:
        InvalidArgumentError: step is zero or negative.
    """
    if step <= dt.timedelta(0):
        raise errors.InvalidArgumentError(f'step must be positive, got {step}')
    k = 0
    while True:
        instant = start + k * step
        if instant > stop or (instant == stop and not inclusive):
            return
        yield instant
        k += 1


def local_day_bounds(date, tzinfo):
    """Returns the UTC instants of the local midnights starting and ending `date`."""
    start = dt.datetime.combine(date, dt.time(0)).replace(tzinfo=tzinfo)
    end = dt.datetime.combine(
        date + dt.timedelta(days=1), dt.time(0)).replace(tzinfo=tzinfo)
    return start.astimezone(dt.timezone.utc), end.astimezone(dt.timezone.utc)


def fixed_offset(minutes):
    """Returns a tzinfo with a constant UTC offset of `minutes`."""
    return dt.timezone(dt.timedelta(minutes=minutes))


def resolve_timezone(name):
    """Returns a tzinfo for an IANA zone name, 'UTC', or a '+HH:MM' offset.

    Raises:
        InvalidArgumentError: the name does not denote a known zone.
    """
    offset_match = re.fullmatch(r'([+-])(\d\d):(\d\d)', name.strip())
    if offset_match:
        sign = -1 if offset_match.group(1) == '-' else 1
        minutes = int(offset_match.group(2)) * 60 + int(offset_match.group(3))
        return fixed_offset(sign * minutes)
    zone = tz.UTC if name.upper() in ('UTC', 'Z') else tz.gettz(name)
    if zone is None:
        raise errors.InvalidArgumentError(f'{name!r} is not a known time zone')
    return zone


def parse_dates(date_str):
    """Returns the dates interpreted from a comma-separated string.

    Each item is either an ISO date ('2018-01-20') or anything parseable by
    parsedatetime ('today', 'dec 20 2018').

    Raises:
        InvalidArgumentError: an item could not be parsed.
    """
    dates = []
    for item in (s.strip() for s in date_str.split(',')):
        if not item:
            continue
        try:
            dates.append(dt.date.fromisoformat(item))
        except ValueError:
            dates.append(_parse_natural_date(item))
    if not dates:
        raise errors.InvalidArgumentError(f'{date_str!r} holds no dates')
    return dates


def _parse_natural_date(date_str):
    """Parses a date with parsedatetime, anchored at today's noon."""
    noon_tuple = dt.datetime.today().replace(hour=12).timetuple()
    # Anchoring at noon keeps relative phrases ("tomorrow") on the right day
    # under frozen clocks in unit tests.
    parsed_time_struct, result = pdt.Calendar().parse(date_str, noon_tuple)
    if not result:
        raise errors.InvalidArgumentError(
            f'{date_str} could not be parsed into a date')
    return dt.datetime(*parsed_time_struct[:6]).date()


def format_hour(hour):
    """Formats a clock hour the way orientation tables print it ('8 am')."""
    if hour % 12 == 0:
        return '12 am' if hour % 24 == 0 else '12 pm'
    return f'{hour % 12} {"am" if hour < 12 else "pm"}'
