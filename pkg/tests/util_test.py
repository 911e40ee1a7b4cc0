"""Test cases for the sunglare.util module."""
import datetime as dt
import unittest

import freezegun

from sunglare import errors
from sunglare import util


class NormalizeDegreesTest(unittest.TestCase):
    """Tests for the normalize_degrees function."""

    def test_wraps_into_turn(self):
        """Tests that angles land in [0, 360)."""
        self.assertEqual(util.normalize_degrees(370.0), 10.0)
        self.assertEqual(util.normalize_degrees(-90.0), 270.0)
        self.assertEqual(util.normalize_degrees(360.0), 0.0)

    def test_tiny_negative_angle(self):
        """Tests that rounding never yields exactly 360."""
        self.assertLess(util.normalize_degrees(-1e-15), 360.0)


class AngularDistanceTest(unittest.TestCase):
    """Tests for the angular_distance function."""

    def test_across_north(self):
        """Tests that the distance takes the short way around."""
        self.assertAlmostEqual(util.angular_distance(350.0, 10.0), 20.0)
        self.assertAlmostEqual(util.angular_distance(10.0, 350.0), 20.0)

    def test_opposite_directions(self):
        self.assertAlmostEqual(util.angular_distance(0.0, 180.0), 180.0)


class TimeRangeTest(unittest.TestCase):
    """Tests for the time_range function."""

    START = dt.datetime(2018, 3, 20, 8, tzinfo=dt.timezone.utc)

    def test_stop_is_excluded(self):
        """Tests that the stop instant is not yielded by default."""
        instants = list(util.time_range(
            self.START, self.START + dt.timedelta(minutes=3),
            dt.timedelta(minutes=1)))
        self.assertEqual(len(instants), 3)

    def test_stop_is_included_on_request(self):
        instants = list(util.time_range(
            self.START, self.START + dt.timedelta(minutes=3),
            dt.timedelta(minutes=1), inclusive=True))
        self.assertEqual(instants[-1], self.START + dt.timedelta(minutes=3))

    def test_non_positive_step(self):
        """Tests that a zero step is rejected."""
        with self.assertRaises(errors.InvalidArgumentError):
            list(util.time_range(self.START, self.START, dt.timedelta(0)))


class LocalDayBoundsTest(unittest.TestCase):
    """Tests for the local_day_bounds function."""

    def test_daylight_saving_day(self):
        """Tests that the day DST starts lasts 23 hours."""
        zone = util.resolve_timezone('America/New_York')
        start, end = util.local_day_bounds(dt.date(2018, 3, 11), zone)
        self.assertEqual(end - start, dt.timedelta(hours=23))
        self.assertEqual(start, dt.datetime(2018, 3, 11, 5, tzinfo=dt.timezone.utc))


class ResolveTimezoneTest(unittest.TestCase):
    """Tests for the resolve_timezone function."""

    def test_fixed_offset(self):
        zone = util.resolve_timezone('-04:00')
        self.assertEqual(zone.utcoffset(None), dt.timedelta(hours=-4))

    def test_named_zone_follows_dst(self):
        """Tests that March 20 2018 is on daylight time in New York."""
        zone = util.resolve_timezone('America/New_York')
        instant = dt.datetime(2018, 3, 20, 8, tzinfo=zone)
        self.assertEqual(instant.utcoffset(), dt.timedelta(hours=-4))

    def test_utc(self):
        zone = util.resolve_timezone('UTC')
        self.assertEqual(
            dt.datetime(2018, 1, 1, tzinfo=zone).utcoffset(), dt.timedelta(0))

    def test_unknown_zone(self):
        """Tests that unknown names raise an error."""
        with self.assertRaises(errors.InvalidArgumentError):
            util.resolve_timezone('Mars/Olympus_Mons')


class ParseDatesTest(unittest.TestCase):
    """Tests for the parse_dates function."""

    def test_iso_dates(self):
        """Tests that comma-separated ISO dates are read in order."""
        self.assertEqual(util.parse_dates('2018-01-20, 2018-12-20'),
                         [dt.date(2018, 1, 20), dt.date(2018, 12, 20)])

    @freezegun.freeze_time(dt.datetime(2018, 3, 24, 9))
    def test_today(self):
        self.assertEqual(util.parse_dates('today'), [dt.date(2018, 3, 24)])

    @freezegun.freeze_time(dt.datetime(2018, 3, 24, 23))
    def test_tomorrow_late_in_the_day(self):
        """Tests that relative dates are anchored at today's noon."""
        self.assertEqual(util.parse_dates('tomorrow'), [dt.date(2018, 3, 25)])

    def test_unparseable(self):
        with self.assertRaisesRegex(ValueError, 'could not be parsed'):
            util.parse_dates('xyzzy')

    def test_empty(self):
        """Tests that a string without items is rejected."""
        with self.assertRaises(errors.InvalidArgumentError):
            util.parse_dates(' , ')


class FormatHourTest(unittest.TestCase):
    """Tests for the format_hour function."""

    def test_hours(self):
        self.assertEqual(util.format_hour(8), '8 am')
        self.assertEqual(util.format_hour(12), '12 pm')
        self.assertEqual(util.format_hour(20), '8 pm')
        self.assertEqual(util.format_hour(0), '12 am')


class PrimeCoroutineGeneratorTest(unittest.TestCase):
    """Tests for the prime_coroutine_generator decorator."""

    def test_accepts_send_immediately(self):
        """Tests that decorated generators can be sent to right away."""
        @util.prime_coroutine_generator
        def doubler():
            value = None
            while True:
                value = yield None if value is None else 2 * value

        self.assertEqual(doubler().send(21), 42)


if __name__ == '__main__':
    unittest.main()
