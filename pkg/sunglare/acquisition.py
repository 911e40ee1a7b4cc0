"""Fetches panorama metadata and tiles, and stitches tiles into panoramas.

All network access goes through a transport: HttpTransport talks to the
configured endpoints, FixtureTransport serves a recorded directory laid out as

    {panoid}/metadata          YAML (or JSON) list of metadata records
    {panoid}/{zoom}/{x}_{y}    tile images

Both count the requests they serve so runs can report them.
"""
import dataclasses
import hashlib
import io
import logging
import os
import random
import tempfile
import threading
import time

from PIL import Image
import requests
from requests.adapters import HTTPAdapter
import yaml

from . import errors
from . import roads
from . import solar
from . import util

logger = logging.getLogger(__name__)

MAX_ZOOM = 5
DEFAULT_RATE_LIMIT = 5.0
DEFAULT_RETRY_BUDGET = 3
DEFAULT_BACKOFF_S = 0.5
REQUEST_TIMEOUT_S = 30
METADATA_FILENAME = 'metadata'
# Captures this close to each other share a location.
LOCATION_TOLERANCE_M = 2.0


@dataclasses.dataclass(frozen=True)
class PanoMetadataRecord:
    """One historical panorama captured near a site."""

    panoid: str
    lon: float
    lat: float
    year: int
    month: int
    yaw_deg: float

    def __post_init__(self):
        object.__setattr__(self, 'yaw_deg', util.normalize_degrees(self.yaw_deg))

    @classmethod
    def from_mapping(cls, mapping, payload_ref=None):
        """Builds a record from a parsed payload entry.

        Raises:
            ParseError: a field is missing or holds an unusable value.
        """
        try:
            record = cls(
                panoid=str(mapping['panoid']),
                lon=float(mapping['lon']),
                lat=float(mapping['lat']),
                year=int(mapping['year']),
                month=int(mapping['month']),
                yaw_deg=float(mapping['yaw']))
        except (KeyError, TypeError, ValueError) as err:
            raise errors.ParseError(
                f'malformed metadata record {mapping!r}: {err}',
                payload_ref) from err
        if not -180.0 <= record.lon <= 180.0 or not -90.0 <= record.lat <= 90.0:
            raise errors.ParseError(
                f'record {record.panoid!r} has coordinates out of range',
                payload_ref)
        return record

    @property
    def position(self):
        return solar.GeoPosition(self.lon, self.lat)


@dataclasses.dataclass(frozen=True)
class TileAddress:
    """Index of a tile in the 2:1 grid of a panorama at a zoom level."""

    panoid: str
    x: int
    y: int
    zoom: int

    def __post_init__(self):
        columns, rows = grid_shape(self.zoom)
        if not (0 <= self.x < columns and 0 <= self.y < rows):
            raise errors.InvalidArgumentError(
                f'tile ({self.x}, {self.y}) is outside of the {columns}x{rows} '
                f'grid at zoom {self.zoom}')


def grid_shape(zoom):
    """Returns the (columns, rows) of the tile grid at a zoom level."""
    if not 0 <= zoom <= MAX_ZOOM:
        raise errors.InvalidArgumentError(
            f'zoom {zoom} is outside of [0, {MAX_ZOOM}]')
    if zoom == 0:
        return 1, 1
    return 2 ** zoom, 2 ** (zoom - 1)


class RateLimiter():
    """Spaces calls so that at most `rate` happen per second, across threads."""

    def __init__(self, rate=DEFAULT_RATE_LIMIT, clock=time.monotonic,
                 sleep=time.sleep):
        if not rate > 0:
            raise errors.InvalidArgumentError(f'rate must be positive: {rate}')
        self._interval = 1.0 / rate
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_slot = 0.0

    def wait(self):
        """Blocks until the caller may issue its request."""
        with self._lock:
            now = self._clock()
            slot = max(now, self._next_slot)
            self._next_slot = slot + self._interval
        if slot > now:
            self._sleep(slot - now)


class FixtureTransport():
    """Serves metadata and tiles from a recorded fixture directory."""

    def __init__(self, root, search_radius_m=25.0):
        self._root = root
        self._search_radius_m = search_radius_m
        self._lock = threading.Lock()
        self.request_count = 0

    def get_metadata(self, lon, lat):
        """Returns a YAML payload of all records within the search radius."""
        self._count()
        site = solar.GeoPosition(lon, lat)
        nearby = []
        for panoid in sorted(os.listdir(self._root)):
            path = os.path.join(self._root, panoid, METADATA_FILENAME)
            if not os.path.isfile(path):
                continue
            with open(path, encoding='utf-8') as metadata_file:
                try:
                    entries = yaml.safe_load(metadata_file) or []
                except yaml.YAMLError:
                    logger.warning('Ignoring unreadable fixture %s', path)
                    continue
            for entry in entries:
                try:
                    position = solar.GeoPosition(
                        float(entry['lon']), float(entry['lat']))
                except (KeyError, TypeError, ValueError):
                    # Malformed entries are passed on for the parser to reject.
                    nearby.append(entry)
                    continue
                if roads.distance(site, position) <= self._search_radius_m:
                    nearby.append(entry)
        return yaml.safe_dump(nearby, sort_keys=True).encode('utf-8')

    def get_tile(self, address):
        """Returns the bytes of a recorded tile.

        Raises:
            NotFoundError: the fixture holds no such tile.
        """
        self._count()
        path = os.path.join(self._root, address.panoid, str(address.zoom),
                            f'{address.x}_{address.y}')
        for candidate in (path, path + '.png', path + '.jpg'):
            if os.path.isfile(candidate):
                with open(candidate, 'rb') as tile_file:
                    return tile_file.read()
        raise errors.NotFoundError(f'no fixture tile at {path}')

    def _count(self):
        with self._lock:
            self.request_count += 1


class HttpTransport():
    """Requests metadata and tiles from live endpoints.

    URL templates take `{lon}`, `{lat}`, `{key}` (metadata) and `{panoid}`,
    `{x}`, `{y}`, `{zoom}`, `{key}` (tiles) placeholders.
    """

    def __init__(self, metadata_url, tile_url, api_key='',
                 rate_limiter=None, retry_budget=DEFAULT_RETRY_BUDGET,
                 backoff_s=DEFAULT_BACKOFF_S, session=None, sleep=time.sleep):
        if not metadata_url or not tile_url:
            raise errors.ConfigurationError(
                'live transport needs both a metadata url and a tile url')
        self._metadata_url = metadata_url
        self._tile_url = tile_url
        self._api_key = api_key
        self._rate_limiter = rate_limiter or RateLimiter()
        self._retry_budget = retry_budget
        self._backoff_s = backoff_s
        self._sleep = sleep
        self._lock = threading.Lock()
        self.request_count = 0
        if session is None:
            session = requests.Session()
            session.mount('https://', HTTPAdapter(pool_connections=8,
                                                  pool_maxsize=16))
            session.mount('http://', HTTPAdapter(pool_connections=8,
                                                 pool_maxsize=16))
        self._session = session

    def get_metadata(self, lon, lat):
        return self._get(self._metadata_url.format(
            lon=lon, lat=lat, key=self._api_key))

    def get_tile(self, address):
        return self._get(self._tile_url.format(
            panoid=address.panoid, x=address.x, y=address.y,
            zoom=address.zoom, key=self._api_key))

    def _get(self, url):
        """GETs a url under the rate limit with jittered exponential backoff.

        Raises:
            NotFoundError: the endpoint answered 404.
            RejectedRequestError: the endpoint answered another 4xx than 429.
            TransportError: the retry budget was spent.
        """
        last_error = None
        for attempt in range(self._retry_budget + 1):
            if attempt:
                delay = self._backoff_s * 2 ** (attempt - 1)
                delay *= 1.0 + random.uniform(0.0, 0.5)
                logger.warning('Retrying %s in %.2fs after: %s',
                               url, delay, last_error)
                self._sleep(delay)
            self._rate_limiter.wait()
            with self._lock:
                self.request_count += 1
            try:
                response = self._session.get(url, timeout=REQUEST_TIMEOUT_S)
            except requests.RequestException as err:
                last_error = err
                continue
            if response.status_code == 404:
                raise errors.NotFoundError(f'{url} does not exist')
            if 400 <= response.status_code < 500 and response.status_code != 429:
                raise errors.RejectedRequestError(
                    f'{url} was refused with status {response.status_code}')
            try:
                response.raise_for_status()
            except requests.RequestException as err:
                last_error = err
                continue
            return response.content
        raise errors.TransportError(
            f'{url} failed after {self._retry_budget + 1} attempts: '
            f'{last_error}')


class PanoramaCache():
    """Content-addressed store of stitched panoramas on disk.

    Entries are written to a temporary file and renamed into place, so
    concurrent writers of the same key leave exactly one complete artifact.
    """

    def __init__(self, root):
        self._root = os.path.expanduser(root)
        try:
            os.makedirs(self._root, exist_ok=True)
        except OSError as err:
            raise errors.ConfigurationError(
                f'cache path {self._root} cannot be created: {err}') from err
        if not os.access(self._root, os.W_OK):
            raise errors.ConfigurationError(
                f'cache path {self._root} is not writable')

    @staticmethod
    def key(panoid, zoom):
        return hashlib.sha256(f'{panoid}\0{zoom}'.encode('utf-8')).hexdigest()

    def path(self, panoid, zoom):
        return os.path.join(self._root, f'{self.key(panoid, zoom)}.png')

    def lookup(self, panoid, zoom):
        """Returns the cached panorama image, or None."""
        path = self.path(panoid, zoom)
        if not os.path.isfile(path):
            return None
        with open(path, 'rb') as cached_file:
            image = Image.open(io.BytesIO(cached_file.read()))
            image.load()
        return image

    def store(self, panoid, zoom, image):
        """Persists a panorama; storing an existing key is a no-op."""
        path = self.path(panoid, zoom)
        if os.path.isfile(path):
            return path
        buffer = io.BytesIO()
        image.save(buffer, format='PNG')
        handle, temp_path = tempfile.mkstemp(dir=self._root, suffix='.part')
        try:
            with os.fdopen(handle, 'wb') as temp_file:
                temp_file.write(buffer.getvalue())
            os.replace(temp_path, path)
        finally:
            if os.path.exists(temp_path):
                os.remove(temp_path)
        return path


def fetch_metadata(site, transport):
    """Returns the historical metadata records near a sample site.

    Raises:
        TransportError: the transport failed after its retries.
        ParseError: the payload is not a list of valid records.
    """
    lon, lat = site.position.lon, site.position.lat
    payload_ref = f'metadata@{lon:.6f},{lat:.6f}'
    payload = transport.get_metadata(lon, lat)
    try:
        entries = yaml.safe_load(payload) if payload else []
    except yaml.YAMLError as err:
        raise errors.ParseError(f'unparseable metadata payload: {err}',
                                payload_ref) from err
    if entries is None:
        return []
    if not isinstance(entries, list):
        raise errors.ParseError('metadata payload is not a list', payload_ref)
    return [PanoMetadataRecord.from_mapping(entry, payload_ref)
            for entry in entries]


def fetch_panorama(panoid, zoom, transport, cache=None):
    """Downloads the whole tile grid of a panorama and stitches it.

    Nothing is cached unless every tile arrived and stitched cleanly.

    Raises:
        InvalidArgumentError: zoom is outside of [0, 5].
        IncompletePanoramaError: a tile could not be fetched.
        StitchError: tiles disagree on their size or the result is not 2:1.
    """
    columns, rows = grid_shape(zoom)
    if cache is not None:
        cached = cache.lookup(panoid, zoom)
        if cached is not None:
            return cached

    tiles = {}
    for y in range(rows):
        for x in range(columns):
            address = TileAddress(panoid, x, y, zoom)
            try:
                payload = transport.get_tile(address)
                tile = Image.open(io.BytesIO(payload))
                tile.load()
            except (errors.TransportError, errors.NotFoundError, OSError) as err:
                raise errors.IncompletePanoramaError(panoid, x, y, zoom) from err
            tiles[x, y] = tile.convert('RGB')

    tile_size = tiles[0, 0].size
    for (x, y), tile in tiles.items():
        if tile.size != tile_size:
            raise errors.StitchError(
                f'tile ({x}, {y}) of {panoid!r} is {tile.size}, expected '
                f'{tile_size}')
    tile_width, tile_height = tile_size
    panorama = Image.new('RGB', (tile_width * columns, tile_height * rows))
    for (x, y), tile in sorted(tiles.items(), key=lambda item: item[0][::-1]):
        panorama.paste(tile, (x * tile_width, y * tile_height))
    if panorama.width != 2 * panorama.height:
        raise errors.StitchError(
            f'{panoid!r} stitched to {panorama.width}x{panorama.height}, '
            f'which is not 2:1')
    if cache is not None:
        cache.store(panoid, zoom, panorama)
    return panorama


def select_record(records, site, radius_m=25.0, policy='leaf-on-recent'):
    """Picks the panorama record to use for a site, or None.

    Only records within `radius_m` of the site are eligible, and of those
    only the ones captured at the nearest location (within
    LOCATION_TOLERANCE_M of it). Among that location's captures the
    'leaf-on-recent' policy prefers the most recent leaf-on one and falls
    back to the most recent one; 'recent' ignores the season.

    Raises:
        InvalidArgumentError: unknown policy.
    """
    if policy not in ('leaf-on-recent', 'recent'):
        raise errors.InvalidArgumentError(f'unknown record policy {policy!r}')
    eligible = []
    for record in records:
        meters = roads.distance(site.position, record.position)
        if meters > radius_m:
            continue
        try:
            leaf_on = roads.season_tag(record.month).leaf_on
        except errors.InvalidMetadataError as err:
            logger.warning('Record %r: %s', record.panoid, err)
            continue
        eligible.append((meters, leaf_on, record))
    if not eligible:
        return None
    nearest = min(meters for meters, _, _ in eligible)
    eligible = [(leaf_on, record) for meters, leaf_on, record in eligible
                if meters <= nearest + LOCATION_TOLERANCE_M]

    def recency(item):
        leaf_on, record = item
        return (policy == 'leaf-on-recent' and leaf_on, record.year,
                record.month, record.panoid)
    return max(eligible, key=recency)[1]
