"""Test cases for the sunglare.synthetic module."""
import datetime as dt
import unittest

import numpy as np

from sunglare import errors
from sunglare import panorama
from sunglare import roads
from sunglare import solar
from sunglare import synthetic
from sunglare import util


class SkylineTest(unittest.TestCase):
    """Tests for the Skyline type."""

    def test_wall(self):
        skyline = synthetic.Skyline.wall(260.0, 310.0, 15.8)
        self.assertEqual(skyline.elevation_at(285.0), 15.8)
        self.assertEqual(skyline.elevation_at(259.9), 0.0)
        self.assertEqual(skyline.elevation_at(310.0), 0.0)

    def test_wall_across_north(self):
        """Tests that a wall may span north."""
        skyline = synthetic.Skyline.wall(350.0, 10.0, 30.0, open_deg=5.0)
        self.assertEqual(skyline.elevation_at(0.0), 30.0)
        self.assertEqual(skyline.elevation_at(355.0), 30.0)
        self.assertEqual(skyline.elevation_at(-5.0), 30.0)
        self.assertEqual(skyline.elevation_at(180.0), 5.0)

    def test_levels_wrap_before_first_break(self):
        skyline = synthetic.Skyline((90.0, 270.0), (10.0, 20.0))
        self.assertEqual(skyline.elevation_at(45.0), 20.0)
        self.assertEqual(skyline.elevation_at(180.0), 10.0)

    def test_above_is_strict(self):
        skyline = synthetic.Skyline.constant(10.0)
        self.assertTrue(skyline.above(solar.SolarPosition(10.5, 0.0)))
        self.assertFalse(skyline.above(solar.SolarPosition(10.0, 0.0)))

    def test_rejects_bad_skylines(self):
        with self.assertRaises(errors.InvalidArgumentError):
            synthetic.Skyline((10.0, 5.0), (1.0, 2.0))
        with self.assertRaises(errors.InvalidArgumentError):
            synthetic.Skyline((10.0,), (1.0, 2.0))


class SkylineMaskTest(unittest.TestCase):
    """Tests for the skyline_mask function."""

    def test_mask_agrees_with_skyline(self):
        """Tests that the mask and the skyline agree on random sun positions."""
        rng = np.random.default_rng(11)
        skyline = synthetic.random_canyon_skyline(rng)
        frame = panorama.PanoramaFrame('canyon', synthetic.CAMBRIDGE, 123.4, 2018, 7,
                                       3600, 1800)
        mask = synthetic.skyline_mask(frame, skyline)
        self.assertEqual(mask.pano_id, 'canyon')
        for elevation, azimuth in zip(rng.uniform(0.01, 89.0, 2000),
                                      rng.uniform(0.0, 360.0, 2000)):
            sun = solar.SolarPosition(float(elevation), float(azimuth))
            level = skyline.elevation_at(sun.azimuth_deg)
            # Pixel edges are 0.1 degrees apart; skip suns right on an edge.
            if abs(elevation - level) < 0.1 or min(
                    util.angular_distance(azimuth, b) for b in skyline.breaks) < 0.1:
                continue
            with self.subTest(elevation=elevation, azimuth=azimuth):
                self.assertEqual(panorama.is_obstructed(frame, mask, sun),
                                 not skyline.above(sun))

    def test_tilted_frame(self):
        """Tests that a camera tilt shifts the raster, not the skyline."""
        frame = panorama.PanoramaFrame('tilted', synthetic.CAMBRIDGE, 0.0, 2018, 3,
                                       720, 360, tilt_deg=2.0)
        mask = synthetic.skyline_mask(frame, synthetic.Skyline.constant(20.0))
        self.assertTrue(panorama.is_obstructed(frame, mask,
                                               solar.SolarPosition(19.8, 90.0)))
        self.assertFalse(panorama.is_obstructed(frame, mask,
                                                solar.SolarPosition(20.2, 90.0)))

    def test_uniform_masks(self):
        self.assertEqual(synthetic.all_sky_mask(64).sky_fraction, 1.0)
        self.assertEqual(synthetic.all_building_mask(64).sky_fraction, 0.0)


class AnalyticCrossingsTest(unittest.TestCase):
    """Tests for the analytic_crossings function."""

    def test_uniform_canyon(self):
        """Tests that the sun clears a canyon once and drops behind it once."""
        scenario = synthetic.SCENARIOS['uniform-canyon-summer']
        (rise, rise_state), (fall, fall_state) = synthetic.analytic_crossings(scenario)
        self.assertFalse(rise_state)
        self.assertTrue(fall_state)
        for instant in (rise, fall):
            elevation = solar.solar_position(scenario.pose.position,
                                             instant).elevation_deg
            self.assertAlmostEqual(elevation, 10.0, delta=0.01)
        self.assertEqual(rise.utcoffset(), dt.timedelta(hours=-4))

    def test_southern_winter_local_day(self):
        scenario = synthetic.SCENARIOS['southern-winter']
        crossings = synthetic.analytic_crossings(scenario)
        self.assertEqual(len(crossings), 2)
        for instant, _ in crossings:
            self.assertEqual(instant.date(), scenario.date)
            self.assertEqual(instant.utcoffset(), dt.timedelta(hours=10))

    def test_deep_canyon(self):
        self.assertEqual(synthetic.analytic_crossings(
            synthetic.SCENARIOS['deep-canyon-winter']), [])


class StreetGridTest(unittest.TestCase):
    """Tests for the street_grid function."""

    def test_grid_geometry(self):
        """Tests the count, length and orientation of grid streets."""
        segments = synthetic.street_grid(synthetic.CAMBRIDGE, 4, 3, 100.0)
        self.assertEqual(len(segments), 7)
        east_west = [s for s in segments if '-ew-' in s.id]
        north_south = [s for s in segments if '-ns-' in s.id]
        self.assertEqual(len(east_west), 4)
        for segment in east_west:
            start, end = segment.polyline
            self.assertAlmostEqual(roads.distance(start, end), 200.0, delta=0.5)
            self.assertAlmostEqual(roads.bearing(start, end), 90.0, delta=0.01)
        for segment in north_south:
            start, end = segment.polyline
            self.assertAlmostEqual(roads.distance(start, end), 300.0, delta=0.5)
            self.assertAlmostEqual(util.angular_distance(roads.bearing(start, end), 0.0),
                                   0.0, places=6)


class CityStoreTest(unittest.TestCase):
    """Tests for the city_store function and InMemoryStore class."""

    def test_one_pair_per_site(self):
        site = roads.SampleSite('a@0.0', synthetic.CAMBRIDGE, 45.0, 'a', 0.0, 225.0)
        store = synthetic.city_store(
            [site], lambda frame: synthetic.all_sky_mask(frame.width, frame.pano_id),
            dt.date(2018, 7, 5))
        frame, mask = store.resolve(site)
        self.assertEqual(frame.yaw_deg, 45.0)
        self.assertEqual((frame.width, mask.width), (360, 360))
        self.assertEqual(mask.pano_id, frame.pano_id)
        other = roads.SampleSite('b@0.0', synthetic.CAMBRIDGE, 0.0, 'b', 0.0, None)
        self.assertIsNone(store.resolve(other))


if __name__ == '__main__':
    unittest.main()
