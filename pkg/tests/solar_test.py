"""Test cases for the sunglare.solar module."""
import csv
import datetime as dt
import os
import unittest

from sunglare import errors
from sunglare import solar
from sunglare import util

TESTDATA = os.path.join(os.path.dirname(__file__), 'testdata')
CAMBRIDGE = solar.GeoPosition(-71.117, 42.376)
NEW_YORK = util.resolve_timezone('America/New_York')


def load_oracle():
    """Returns the recorded (site, instant, elevation, azimuth) rows."""
    with open(os.path.join(TESTDATA, 'solar_oracle.csv'), encoding='utf-8') as oracle:
        return [(solar.GeoPosition(float(row['lon']), float(row['lat'])),
                 dt.datetime.fromisoformat(row['utc']),
                 float(row['elevation_deg']), float(row['azimuth_deg']))
                for row in csv.DictReader(oracle)]


class GeoPositionTest(unittest.TestCase):
    """Tests for the GeoPosition type."""

    def test_out_of_range(self):
        with self.assertRaises(errors.InvalidArgumentError):
            solar.GeoPosition(-71.0, 91.0)
        with self.assertRaises(ValueError):
            solar.GeoPosition(181.0, 0.0)


class SolarPositionTest(unittest.TestCase):
    """Tests for the solar_position function."""

    def test_matches_independent_oracle(self):
        """Tests 100 random sites and instants against a recorded oracle."""
        rows = load_oracle()
        self.assertEqual(len(rows), 100)
        for site, instant, elevation, azimuth in rows:
            with self.subTest(site=site, instant=instant):
                sun = solar.solar_position(site, instant)
                self.assertLessEqual(abs(sun.elevation_deg - elevation), 0.2)
                self.assertLessEqual(
                    util.angular_distance(sun.azimuth_deg, azimuth), 0.3)

    def test_same_instant_in_any_offset(self):
        """Tests that only the absolute instant matters."""
        local = solar.make_instant(dt.datetime(2018, 7, 5, 18, 45), -240)
        utc = dt.datetime(2018, 7, 5, 22, 45, tzinfo=dt.timezone.utc)
        self.assertEqual(solar.solar_position(CAMBRIDGE, local),
                         solar.solar_position(CAMBRIDGE, utc))

    def test_summer_evening_at_cambridge(self):
        """Tests a sun low in the west-north-west on a July evening."""
        sun = solar.solar_position(
            CAMBRIDGE, dt.datetime(2018, 7, 5, 18, 45, tzinfo=NEW_YORK))
        self.assertAlmostEqual(sun.elevation_deg, 15.8, delta=0.3)
        self.assertAlmostEqual(sun.azimuth_deg, 286.5, delta=0.3)

    def test_naive_instant(self):
        """Tests that instants without an offset are rejected."""
        with self.assertRaises(errors.InvalidArgumentError):
            solar.solar_position(CAMBRIDGE, dt.datetime(2018, 1, 20, 12))

    def test_unsupported_epoch(self):
        with self.assertRaises(errors.UnsupportedEpochError):
            solar.solar_position(
                CAMBRIDGE, dt.datetime(1900, 1, 1, tzinfo=dt.timezone.utc))

    def test_polar_day_and_night(self):
        """Tests that the midnight sun stays up and polar night stays down."""
        north = solar.GeoPosition(20.0, 80.0)
        midnight = dt.datetime(2018, 6, 21, 22, 40, tzinfo=dt.timezone.utc)
        noon = dt.datetime(2018, 12, 21, 10, 40, tzinfo=dt.timezone.utc)
        self.assertGreater(solar.solar_position(north, midnight).elevation_deg, 0.0)
        self.assertLess(solar.solar_position(north, noon).elevation_deg, 0.0)


class SunPathTest(unittest.TestCase):
    """Tests for the sun_path and sun_diagram functions."""

    def test_samples_a_whole_day(self):
        """Tests that a day is sampled from midnight to the next midnight."""
        path = solar.sun_path(CAMBRIDGE, dt.date(2018, 1, 20),
                              dt.timedelta(hours=1), NEW_YORK)
        self.assertEqual(len(path), 24)
        self.assertEqual(path[0][0], dt.datetime(2018, 1, 20, tzinfo=NEW_YORK))
        self.assertEqual(path[8][0].hour, 8)

    def test_bounded_path_is_inclusive(self):
        path = solar.sun_path(CAMBRIDGE, dt.date(2018, 1, 20),
                              dt.timedelta(hours=1), NEW_YORK,
                              start=dt.time(5), end=dt.time(20))
        self.assertEqual(len(path), 16)
        self.assertEqual(path[-1][0].hour, 20)

    def test_non_positive_step(self):
        with self.assertRaises(errors.InvalidArgumentError):
            solar.sun_path(CAMBRIDGE, dt.date(2018, 1, 20), dt.timedelta(0))

    def test_seasonal_ordering(self):
        """Tests June is above December at every common daylight hour."""
        diagram = solar.sun_diagram(CAMBRIDGE, 2018, tzinfo=NEW_YORK)
        self.assertEqual(len(diagram), 12)
        june = diagram[dt.date(2018, 6, 20)]
        december = diagram[dt.date(2018, 12, 20)]
        for (t_june, sun_june), (t_dec, sun_dec) in zip(june, december):
            self.assertEqual(t_june.hour, t_dec.hour)
            if sun_june.elevation_deg > 0.0 and sun_dec.elevation_deg > 0.0:
                self.assertGreaterEqual(sun_june.elevation_deg,
                                        sun_dec.elevation_deg)

        highest = {date: max(sun.elevation_deg for _, sun in path)
                   for date, path in diagram.items()}
        self.assertEqual(max(highest, key=highest.get), dt.date(2018, 6, 20))
        self.assertEqual(min(highest, key=highest.get), dt.date(2018, 12, 20))

    def test_daylight_shape(self):
        """Tests azimuth grows through the day and elevation has one peak."""
        for date in (dt.date(2018, 1, 20), dt.date(2018, 3, 20),
                     dt.date(2018, 6, 20), dt.date(2018, 9, 20),
                     dt.date(2018, 12, 20)):
            path = solar.sun_path(CAMBRIDGE, date, dt.timedelta(minutes=1),
                                  NEW_YORK)
            daylight = [sun for _, sun in path if sun.elevation_deg > 0.0]
            azimuths = [sun.azimuth_deg for sun in daylight]
            elevations = [sun.elevation_deg for sun in daylight]
            peak = elevations.index(max(elevations))
            with self.subTest(date=date):
                self.assertTrue(all(a < b for a, b in zip(azimuths, azimuths[1:])))
                self.assertTrue(all(a <= b for a, b in
                                    zip(elevations[:peak], elevations[1:peak + 1])))
                self.assertTrue(all(a >= b for a, b in
                                    zip(elevations[peak:], elevations[peak + 1:])))

    def test_equinox_at_the_equator(self):
        """Tests that the equinox sun passes overhead at the equator."""
        path = solar.sun_path(solar.GeoPosition(0.0, 0.0), dt.date(2018, 3, 20),
                              dt.timedelta(minutes=1))
        self.assertEqual(len(path), 1440)
        self.assertAlmostEqual(max(sun.elevation_deg for _, sun in path), 90.0,
                               delta=0.5)


class SolarNoonTest(unittest.TestCase):
    """Tests for the solar_noon function."""

    def test_sun_culminates_at_noon(self):
        """Tests that the sun is higher at noon than a minute around it."""
        date = dt.date(2018, 12, 20)
        noon = solar.solar_noon(CAMBRIDGE, date)
        minute = dt.timedelta(minutes=1)
        at_noon = solar.solar_position(CAMBRIDGE, noon)
        self.assertGreater(at_noon.elevation_deg,
                           solar.solar_position(CAMBRIDGE, noon - minute).elevation_deg)
        self.assertGreater(at_noon.elevation_deg,
                           solar.solar_position(CAMBRIDGE, noon + minute).elevation_deg)
        self.assertAlmostEqual(at_noon.azimuth_deg, 180.0, delta=0.1)

    def test_december_noon_is_below_glare_threshold(self):
        """Tests that the winter sun never climbs over 25 degrees."""
        noon = solar.solar_noon(CAMBRIDGE, dt.date(2018, 12, 20))
        self.assertLess(solar.solar_position(CAMBRIDGE, noon).elevation_deg, 25.0)
        self.assertEqual(noon.astimezone(NEW_YORK).hour, 11)


if __name__ == '__main__':
    unittest.main()
