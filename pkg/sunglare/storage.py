"""Module for reading and writing sunglare data on a local computer.

Layouts handled here:

    roads.geojson / sites.geojson    line and point feature collections
    {store}/frames/{pano_id}.yaml    panorama frame records
    {store}/masks/{pano_id}.png      obstruction label rasters ('L' mode)
    {store}/masks/{pano_id}.yaml     mask sidecar: sky labels and source
    {store}/panoramas/{pano_id}.png  stitched panoramas, when fetched
"""
import json
import logging
import os

import numpy as np
from PIL import Image
import yaml

from . import acquisition
from . import errors
from . import formatters
from . import panorama
from . import roads
from . import solar

logger = logging.getLogger(__name__)

FRAMES_DIR = 'frames'
MASKS_DIR = 'masks'
PANORAMAS_DIR = 'panoramas'


def load_road_network(path):
    """Returns the RoadSegments of a GeoJSON file of line features.

    Each feature may carry an `id` property (else its index is used) and a
    boolean `oneway` property; parts of a MultiLineString become segments
    named `{id}/{part}`. Features of other geometry types are skipped.

    Raises:
        ParseError: the file is not a GeoJSON feature collection.
    """
    collection = _load_json(path)
    segments = []
    for index, feature in enumerate(collection.get('features') or []):
        properties = feature.get('properties') or {}
        geometry = feature.get('geometry') or {}
        segment_id = str(properties.get('id', index))
        bidirectional = not properties.get('oneway', False)
        if geometry.get('type') == 'LineString':
            parts = [(segment_id, geometry.get('coordinates'))]
        elif geometry.get('type') == 'MultiLineString':
            parts = [(f'{segment_id}/{part}', coordinates) for part, coordinates
                     in enumerate(geometry.get('coordinates'))]
        else:
            logger.warning('Skipping feature %r of type %r', segment_id,
                           geometry.get('type'))
            continue
        for part_id, coordinates in parts:
            try:
                polyline = [solar.GeoPosition(float(lon), float(lat))
                            for lon, lat, *_ in coordinates]
                segments.append(roads.RoadSegment(part_id, polyline,
                                                  bidirectional))
            except (TypeError, ValueError) as err:
                logger.warning('Skipping road %r: %s', part_id, err)
    return segments


def write_sites(path, sites):
    """Writes sample sites as a GeoJSON point feature collection."""
    with open(path, 'w', encoding='utf-8') as sites_file:
        sites_file.write(formatters.sites_geojson(sites))


def load_sites(path):
    """Returns the SampleSites of a file written by `write_sites`.

    Raises:
        ParseError: the file or one of its features is malformed.
    """
    collection = _load_json(path)
    sites = []
    for feature in collection.get('features') or []:
        try:
            properties = feature['properties']
            lon, lat = feature['geometry']['coordinates'][:2]
            reverse = properties.get('reverse_heading_deg')
            sites.append(roads.SampleSite(
                site_id=str(properties['site_id']),
                position=solar.GeoPosition(float(lon), float(lat)),
                heading_deg=float(properties['heading_deg']),
                segment_id=str(properties['segment_id']),
                chainage_m=float(properties['chainage_m']),
                reverse_heading_deg=None if reverse is None else float(reverse)))
        except (KeyError, TypeError, ValueError) as err:
            raise errors.ParseError(f'malformed site feature: {err}',
                                    path) from err
    return sites


def save_frame(store_path, frame):
    """Writes a frame record to `{store}/frames/{pano_id}.yaml`."""
    record = {
        'pano_id': frame.pano_id,
        'lon': frame.position.lon,
        'lat': frame.position.lat,
        'yaw': frame.yaw_deg,
        'year': frame.capture_year,
        'month': frame.capture_month,
        'width': frame.width,
        'height': frame.height,
        'tilt': frame.tilt_deg,
    }
    frames_path = os.path.join(store_path, FRAMES_DIR)
    os.makedirs(frames_path, exist_ok=True)
    path = os.path.join(frames_path, f'{frame.pano_id}.yaml')
    with open(path, 'w', encoding='utf-8') as frame_file:
        yaml.safe_dump(record, frame_file, sort_keys=True)
    return path


def load_frames(store_path):
    """Returns the frames stored under `{store}/frames`, ordered by pano_id.

    Files that are not yaml records, or whose values do not describe a valid
    frame, are skipped with a warning.
    """
    frames_path = os.path.join(store_path, FRAMES_DIR)
    if not os.path.isdir(frames_path):
        return []
    frames = []
    for frame_path in _record_paths(frames_path):
        with open(frame_path, encoding='utf-8') as frame_file:
            frame = _load_frame(frame_file)
        if frame is None:
            logger.warning('Skipping unreadable frame record %s', frame_path)
        else:
            frames.append(frame)
    return sorted(frames, key=lambda frame: frame.pano_id)


def save_mask(store_path, mask):
    """Writes a mask raster and its sidecar under `{store}/masks`."""
    if mask.pano_id is None:
        raise errors.InvalidArgumentError('only masks of a panorama are stored')
    masks_path = os.path.join(store_path, MASKS_DIR)
    os.makedirs(masks_path, exist_ok=True)
    raster_path = os.path.join(masks_path, f'{mask.pano_id}.png')
    Image.fromarray(np.asarray(mask.labels)).save(raster_path)
    with open(os.path.join(masks_path, f'{mask.pano_id}.yaml'), 'w',
              encoding='utf-8') as sidecar_file:
        yaml.safe_dump({'pano_id': mask.pano_id,
                        'sky_labels': sorted(mask.sky_labels),
                        'source': mask.source}, sidecar_file, sort_keys=True)
    return raster_path


def load_mask(store_path, pano_id, sky_labels=None):
    """Returns the stored ObstructionMask of a panorama, or None.

    `sky_labels` overrides the labels recorded in the sidecar.

    Raises:
        InvalidMaskError: the raster is not a 2:1 label image.
    """
    masks_path = os.path.join(store_path, MASKS_DIR)
    raster_path = os.path.join(masks_path, f'{pano_id}.png')
    if not os.path.isfile(raster_path):
        return None
    sidecar = {}
    sidecar_path = os.path.join(masks_path, f'{pano_id}.yaml')
    if os.path.isfile(sidecar_path):
        with open(sidecar_path, encoding='utf-8') as sidecar_file:
            try:
                sidecar = yaml.safe_load(sidecar_file) or {}
            except yaml.YAMLError:
                logger.warning('Ignoring unreadable mask sidecar %s',
                               sidecar_path)
    with Image.open(raster_path) as raster:
        labels = np.array(raster.convert('L'), dtype=np.uint8)
    if sky_labels is None:
        sky_labels = sidecar.get('sky_labels', [panorama.SKY_LABEL])
    return panorama.ObstructionMask(
        labels, sky_labels=frozenset(sky_labels), pano_id=pano_id,
        source=sidecar.get('source', 'model'))


def save_panorama(store_path, pano_id, image):
    panoramas_path = os.path.join(store_path, PANORAMAS_DIR)
    os.makedirs(panoramas_path, exist_ok=True)
    path = os.path.join(panoramas_path, f'{pano_id}.png')
    image.save(path, format='PNG')
    return path


def load_panorama(store_path, pano_id):
    """Returns the stored panorama image of `pano_id`, or None."""
    path = os.path.join(store_path, PANORAMAS_DIR, f'{pano_id}.png')
    if not os.path.isfile(path):
        return None
    with Image.open(path) as image:
        image.load()
        return image.copy()


class PanoramaStore():
    """Frames and masks on disk, resolvable from sample site positions."""

    def __init__(self, store_path, sky_labels=None):
        self._store_path = store_path
        self._sky_labels = sky_labels
        self._frames = load_frames(store_path)
        self._by_id = {frame.pano_id: frame for frame in self._frames}

    @property
    def frames(self):
        return list(self._frames)

    def frame(self, pano_id):
        """Returns the stored frame of `pano_id`.

        Raises:
            NotFoundError: no frame record exists.
        """
        try:
            return self._by_id[pano_id]
        except KeyError:
            raise errors.NotFoundError(
                f'no frame record for {pano_id!r}') from None

    def mask(self, pano_id):
        return load_mask(self._store_path, pano_id, self._sky_labels)

    def resolve(self, site, radius_m=25.0, policy='leaf-on-recent'):
        """Returns the (frame, mask) to use for a site, or None.

        The frame is chosen by `acquisition.select_record`; the mask is None
        when that frame has not been segmented.
        """
        records = [acquisition.PanoMetadataRecord(
            panoid=frame.pano_id, lon=frame.position.lon, lat=frame.position.lat,
            year=frame.capture_year, month=frame.capture_month,
            yaw_deg=frame.yaw_deg) for frame in self._frames]
        record = acquisition.select_record(records, site, radius_m, policy)
        if record is None:
            return None
        return self._by_id[record.panoid], self.mask(record.panoid)


def _load_json(path):
    try:
        with open(path, encoding='utf-8') as json_file:
            document = json.load(json_file)
    except (OSError, ValueError) as err:
        raise errors.ParseError(f'{path} is not readable JSON: {err}',
                                path) from err
    if not isinstance(document, dict):
        raise errors.ParseError(f'{path} is not a feature collection', path)
    return document


def _record_paths(directory):
    """Yields the yaml files of a directory in name order."""
    for dir_entry in sorted(os.scandir(directory), key=lambda e: e.name):
        if not dir_entry.is_file():
            continue
        unused_root, ext = os.path.splitext(dir_entry.name)
        if ext not in ('.yaml', '.yml'):
            continue
        yield dir_entry.path


def _load_frame(frame_file):
    """Returns the PanoramaFrame held by a yaml record, or None."""
    try:
        record = yaml.safe_load(frame_file)
    except (yaml.YAMLError, UnicodeDecodeError):
        return None
    try:
        return panorama.PanoramaFrame(
            pano_id=str(record['pano_id']),
            position=solar.GeoPosition(float(record['lon']), float(record['lat'])),
            yaw_deg=float(record['yaw']),
            capture_year=int(record['year']),
            capture_month=int(record['month']),
            width=int(record['width']),
            height=int(record['height']),
            tilt_deg=float(record.get('tilt', 0.0)))
    except (KeyError, TypeError, ValueError, AttributeError):
        return None
