"""Test cases for the sunglare.roads module."""
import math
import unittest

import numpy as np

from sunglare import errors
from sunglare import panorama
from sunglare import roads
from sunglare import solar
from sunglare import util

CAMBRIDGE = solar.GeoPosition(-71.117, 42.376)


def walk(start, legs):
    """Returns the polyline reached by walking (bearing, meters) legs."""
    polyline = [start]
    for azimuth, meters in legs:
        here = polyline[-1]
        lon, lat, _ = roads.GEOD.fwd(here.lon, here.lat, azimuth, meters)
        polyline.append(solar.GeoPosition(lon, lat))
    return polyline


def make_frame(pano_id, month):
    return panorama.PanoramaFrame(pano_id, CAMBRIDGE, 0.0, 2018, month, 64, 32)


class SampleSegmentTest(unittest.TestCase):
    """Tests for the sample_segment function."""

    def test_straight_hundred_meters(self):
        """Tests sites at 0, 40 and 80 m with equal headings."""
        segment = roads.RoadSegment('main', walk(CAMBRIDGE, [(0.0, 100.0)]))
        sites = roads.sample_segment(segment)
        self.assertEqual([s.chainage_m for s in sites], [0.0, 40.0, 80.0])
        for site in sites:
            self.assertAlmostEqual(util.angular_distance(site.heading_deg, 0.0),
                                   0.0, places=6)
            self.assertAlmostEqual(util.angular_distance(site.reverse_heading_deg,
                                                         180.0), 0.0, places=6)
        self.assertEqual(sites[1].site_id, 'main@40.0')

    def test_forty_meters(self):
        """Tests that both endpoints of a 40 m segment are sites."""
        segment = roads.RoadSegment('short', walk(CAMBRIDGE, [(45.0, 40.0)]))
        self.assertEqual(len(roads.sample_segment(segment)), 2)

    def test_l_shaped_segment(self):
        """Tests headings follow the leg holding each site."""
        segment = roads.RoadSegment(
            'ell', walk(CAMBRIDGE, [(0.0, 60.0), (90.0, 60.0)]))
        sites = roads.sample_segment(segment)
        self.assertEqual(len(sites), 4)
        self.assertAlmostEqual(util.angular_distance(sites[1].heading_deg, 0.0),
                               0.0, places=6)
        self.assertAlmostEqual(sites[2].chainage_m, 80.0)
        self.assertAlmostEqual(sites[2].heading_deg, 90.0, places=6)
        self.assertAlmostEqual(sites[3].heading_deg, 90.0, places=6)

    def test_site_on_vertex_takes_outgoing_leg(self):
        segment = roads.RoadSegment(
            'corner', walk(CAMBRIDGE, [(0.0, 40.0), (90.0, 40.0)]))
        sites = roads.sample_segment(segment)
        self.assertAlmostEqual(sites[1].heading_deg, 90.0, places=6)

    def test_random_polylines(self):
        """Tests count and spacing on 50 random polylines."""
        rng = np.random.default_rng(40)
        for index in range(50):
            legs = [(float(rng.uniform(0, 360)), float(rng.uniform(10, 400)))
                    for _ in range(int(rng.integers(1, 6)))]
            polyline = walk(CAMBRIDGE, legs)
            offsets = [0.0]
            for a, b in zip(polyline, polyline[1:]):
                offsets.append(offsets[-1] + roads.distance(a, b))
            sites = roads.sample_segment(roads.RoadSegment(f'r{index}', polyline))
            with self.subTest(index=index):
                self.assertEqual(len(sites), math.floor(offsets[-1] / 40.0) + 1)
                for first, second in zip(sites, sites[1:]):
                    self.assertAlmostEqual(second.chainage_m - first.chainage_m, 40.0)
                    same_leg = any(lo <= first.chainage_m and second.chainage_m <= hi
                                   for lo, hi in zip(offsets, offsets[1:]))
                    if same_leg:
                        self.assertAlmostEqual(
                            roads.distance(first.position, second.position),
                            40.0, delta=0.1)

    def test_zero_length_segment(self):
        """Tests that degenerate segments are skipped with a warning."""
        segment = roads.RoadSegment('dot', [CAMBRIDGE, CAMBRIDGE])
        with self.assertLogs('sunglare.roads', level='WARNING'):
            self.assertEqual(roads.sample_segment(segment), [])

    def test_one_way_street(self):
        segment = roads.RoadSegment('oneway', walk(CAMBRIDGE, [(0.0, 50.0)]),
                                    bidirectional=False)
        site = roads.sample_segment(segment)[0]
        self.assertIsNone(site.reverse_heading_deg)
        self.assertEqual([direction for direction, _ in site.poses()], ['forward'])

    def test_two_way_poses(self):
        segment = roads.RoadSegment('twoway', walk(CAMBRIDGE, [(0.0, 50.0)]))
        poses = dict(roads.sample_segment(segment)[0].poses(slope_deg=3.0))
        self.assertAlmostEqual(poses['reverse'].heading_deg, 180.0, places=6)
        self.assertEqual(poses['reverse'].slope_deg, -3.0)

    def test_non_positive_spacing(self):
        segment = roads.RoadSegment('main', walk(CAMBRIDGE, [(0.0, 100.0)]))
        with self.assertRaises(errors.InvalidArgumentError):
            roads.sample_segment(segment, spacing_m=0.0)

    def test_network_counts_add_up(self):
        segments = [roads.RoadSegment('a', walk(CAMBRIDGE, [(0.0, 100.0)])),
                    roads.RoadSegment('b', walk(CAMBRIDGE, [(90.0, 130.0)]))]
        self.assertEqual(len(roads.sample_network(segments)), 3 + 4)


class BearingTest(unittest.TestCase):
    """Tests for the bearing function."""

    def test_due_north(self):
        value = roads.bearing(solar.GeoPosition(10.0, 10.0),
                              solar.GeoPosition(10.0, 11.0))
        self.assertAlmostEqual(util.angular_distance(value, 0.0), 0.0)

    def test_due_east_at_equator(self):
        self.assertAlmostEqual(
            roads.bearing(solar.GeoPosition(0.0, 0.0), solar.GeoPosition(0.001, 0.0)),
            90.0)

    def test_cambridge_north_east(self):
        value = roads.bearing(solar.GeoPosition(-71.1170, 42.3760),
                              solar.GeoPosition(-71.1160, 42.3770))
        self.assertGreater(value, 30.0)
        self.assertLess(value, 45.0)

    def test_identical_points(self):
        with self.assertRaises(errors.InvalidArgumentError):
            roads.bearing(CAMBRIDGE, CAMBRIDGE)


class SeasonTest(unittest.TestCase):
    """Tests for the season_tag and classify_season functions."""

    def test_months(self):
        self.assertTrue(roads.season_tag(7).leaf_on)
        self.assertFalse(roads.season_tag(12).leaf_on)
        self.assertFalse(roads.season_tag(4).leaf_on)
        self.assertTrue(roads.season_tag(5).leaf_on)
        self.assertTrue(roads.season_tag(10).leaf_on)
        self.assertFalse(roads.season_tag(11).leaf_on)

    def test_invalid_month(self):
        with self.assertRaises(errors.InvalidMetadataError):
            roads.season_tag(13)

    def test_partition(self):
        """Tests that frames are split by season and bad months set aside."""
        frames = [make_frame('a', 7), make_frame('b', 1), make_frame('c', 0),
                  make_frame('d', 5)]
        with self.assertLogs('sunglare.roads', level='WARNING'):
            partition = roads.classify_season(frames)
        self.assertEqual([f.pano_id for f in partition.leaf_on], ['a', 'd'])
        self.assertEqual([f.pano_id for f in partition.leaf_off], ['b'])
        self.assertEqual([f.pano_id for f in partition.invalid], ['c'])


if __name__ == '__main__':
    unittest.main()
