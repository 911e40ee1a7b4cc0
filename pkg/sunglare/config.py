"""Builds configuration options for the sunglare tool with nice defaults."""
import argparse
import configparser
import datetime as dt
import os

from . import errors
from . import mapper
from . import util

# Command-line flag (argparse dest) -> config key it overrides.
OVERRIDE_FLAGS = {
    'timezone': 'timezone',
    'step': 'scan step',
    'threshold': 'glare threshold',
    'horizon': 'horizon clearance',
    'table_horizon': 'table horizon clearance',
    'spacing': 'spacing',
    'radius': 'match radius',
    'policy': 'record policy',
    'sky_labels': 'sky labels',
    'zoom': 'zoom',
    'cache': 'cache path',
    'fixtures': 'fixture path',
    'rate_limit': 'rate limit',
    'workers': 'workers',
}


class Options():
    """Encapsulates sunglare options which are configurable through ~/.sunglarerc."""

    CONFIG_PATH = '~/.sunglarerc'
    DEFAULT_CONFIG_VALUES = {
        'timezone': 'America/New_York',
        'scan step': '60',
        'glare threshold': '25',
        'horizon clearance': '0',
        'table horizon clearance': '2',
        'spacing': '40',
        'match radius': '25',
        'record policy': 'leaf-on-recent',
        'sky labels': '0',
        'zoom': '3',
        'cache path': '~/.cache/sunglare',
        'fixture path': '',
        'metadata url': '',
        'tile url': '',
        'api key': '',
        'rate limit': '5',
        'retry budget': '3',
        'backoff': '0.5',
        'workers': '1',
    }

    @classmethod
    def from_argv(cls, argv):
        """Parses argv into options and the remaining subcommand arguments.

        Flags given on the command line override the matching config keys.
        """
        args = build_parser().parse_args(argv[1:])
        overrides = {key: str(getattr(args, flag))
                     for flag, key in OVERRIDE_FLAGS.items()
                     if getattr(args, flag, None) is not None}
        config_paths = [args.config] if args.config else []
        return cls(args.profile, config_paths, overrides), args

    def __init__(self, section='DEFAULT', config_paths=(), overrides=None):
        self._config = configparser.ConfigParser(
            self.DEFAULT_CONFIG_VALUES, interpolation=None)
        self._config.read(os.path.expanduser(self.CONFIG_PATH))
        for path in config_paths:
            if not self._config.read(path):
                raise errors.ConfigurationError(f'config file {path} is unreadable')
        if section != 'DEFAULT' and not self._config.has_section(section):
            raise errors.ConfigurationError(f'no [{section}] profile is configured')
        self._section = section
        for key, value in (overrides or {}).items():
            self._config[section][key] = value
        self._tzinfo = util.resolve_timezone(self._get('timezone'))
        if self.record_policy not in ('leaf-on-recent', 'recent'):
            raise errors.ConfigurationError(
                f'record policy {self.record_policy!r} is not one of '
                f'leaf-on-recent, recent')
        if not self.scan_step > dt.timedelta(0):
            raise errors.ConfigurationError('scan step must be positive')

    def _get(self, key):
        return self._config[self._section].get(key)

    def _getfloat(self, key):
        try:
            return self._config[self._section].getfloat(key)
        except ValueError as err:
            raise errors.ConfigurationError(f'{key}: {err}') from err

    def _getint(self, key):
        try:
            return self._config[self._section].getint(key)
        except ValueError as err:
            raise errors.ConfigurationError(f'{key}: {err}') from err

    @property
    def timezone(self):
        """Read-only accessor for the tzinfo civil dates are read in."""
        return self._tzinfo

    @property
    def scan_step(self):
        """Read-only accessor for the sampling step of glare scans."""
        return dt.timedelta(seconds=self._getfloat('scan step'))

    @property
    def glare_threshold(self):
        return self._getfloat('glare threshold')

    @property
    def horizon_clearance(self):
        return self._getfloat('horizon clearance')

    @property
    def table_horizon_clearance(self):
        """Read-only accessor for the sun elevation orientation tables require."""
        return self._getfloat('table horizon clearance')

    @property
    def spacing(self):
        return self._getfloat('spacing')

    @property
    def match_radius(self):
        return self._getfloat('match radius')

    @property
    def record_policy(self):
        return self._get('record policy')

    @property
    def sky_labels(self):
        """Read-only accessor for the mask labels counted as sky."""
        try:
            return frozenset(int(label) for label in
                             self._get('sky labels').split(',') if label.strip())
        except ValueError as err:
            raise errors.ConfigurationError(f'sky labels: {err}') from err

    @property
    def zoom(self):
        return self._getint('zoom')

    @property
    def cache_path(self):
        return os.path.expanduser(self._get('cache path'))

    @property
    def fixture_path(self):
        """Read-only accessor for the fixture directory; None means live."""
        path = self._get('fixture path')
        return os.path.expanduser(path) if path else None

    @property
    def metadata_url(self):
        return self._get('metadata url')

    @property
    def tile_url(self):
        return self._get('tile url')

    @property
    def api_key(self):
        return self._get('api key')

    @property
    def rate_limit(self):
        return self._getfloat('rate limit')

    @property
    def retry_budget(self):
        return self._getint('retry budget')

    @property
    def backoff(self):
        return self._getfloat('backoff')

    @property
    def workers(self):
        return max(1, self._getint('workers'))

    def glare_settings(self, horizon_deg=None):
        """Returns the mapper.GlareSettings described by these options."""
        return mapper.GlareSettings(
            tzinfo=self.timezone,
            step=self.scan_step,
            threshold_deg=self.glare_threshold,
            horizon_deg=(self.horizon_clearance if horizon_deg is None
                         else horizon_deg))


def build_parser():
    """Returns the argparse parser of the sunglare command line."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='extra config file read after ~/.sunglarerc')
    common.add_argument('--profile', default='DEFAULT',
                        help='config section to read options from')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')
    common.add_argument('--timezone', help='IANA zone or +HH:MM offset')
    common.add_argument('--step', type=float, help='scan step in seconds')
    common.add_argument('--threshold', type=float,
                        help='glare threshold in degrees')
    common.add_argument('--horizon', type=float,
                        help='sun elevation required for glare, in degrees')
    common.add_argument('--workers', type=int)

    parser = argparse.ArgumentParser(
        prog='sunglare', description='Predicts sun glare along streets.')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    sample = subparsers.add_parser(
        'sample', parents=[common], help='place sample sites along roads')
    sample.add_argument('roads', help='GeoJSON file of road lines')
    sample.add_argument('--out', help='sites file (default: stdout)')
    sample.add_argument('--spacing', type=float, help='site spacing in meters')

    fetch = subparsers.add_parser(
        'fetch', parents=[common], help='download panoramas of sample sites')
    fetch.add_argument('sites', help='sites file written by `sample`')
    fetch.add_argument('--store', required=True, help='panorama store directory')
    fetch.add_argument('--fixtures', help='serve requests from this directory')
    fetch.add_argument('--cache', help='panorama cache directory')
    fetch.add_argument('--zoom', type=int)
    fetch.add_argument('--radius', type=float, help='match radius in meters')
    fetch.add_argument('--policy', choices=('leaf-on-recent', 'recent'))
    fetch.add_argument('--rate-limit', type=float, help='requests per second')
    fetch.add_argument('--heuristic-masks', action='store_true',
                       help='also write heuristic sky masks')

    table = subparsers.add_parser(
        'glare-table', parents=[common],
        help='print orientation ranges exposed to glare, hour by hour')
    table.add_argument('--lat', type=float, required=True)
    table.add_argument('--lon', type=float, required=True)
    table.add_argument('--date', default='today',
                       help='comma-separated dates (ISO or natural language)')
    table.add_argument('--table-horizon', type=float,
                       help='sun elevation a table row requires, in degrees')

    glare_map = subparsers.add_parser(
        'map', parents=[common], help='map glare over sample sites')
    glare_map.add_argument('sites', help='sites file written by `sample`')
    glare_map.add_argument('--date', required=True)
    glare_map.add_argument('--kind', required=True, choices=('sunrise', 'sunset'))
    glare_map.add_argument('--store', help='panorama store with masks')
    glare_map.add_argument('--radius', type=float, help='match radius in meters')
    glare_map.add_argument('--policy', choices=('leaf-on-recent', 'recent'))
    glare_map.add_argument('--sky-labels', help='comma-separated sky labels')
    glare_map.add_argument('--out', help='map document (default: stdout)')
    glare_map.add_argument('--csv', help='also write the windows table here')
    glare_map.add_argument('--manifest', help='also write the run manifest here')

    overlay = subparsers.add_parser(
        'overlay', parents=[common], help='draw sun paths on a panorama')
    overlay.add_argument('--store', required=True)
    overlay.add_argument('--panoid', required=True)
    overlay.add_argument('--date', required=True)
    overlay.add_argument('--out', required=True, help='PNG file to write')
    overlay.add_argument('--use-mask', action='store_true',
                         help='draw over the mask instead of the imagery')

    validate = subparsers.add_parser(
        'validate', parents=[common],
        help='compare predicted obstruction boundaries with synthetic scenes')
    validate.add_argument('--scenario', default='all',
                          help='scenario name, or "all"')
    return parser
