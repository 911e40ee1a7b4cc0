"""Entry point for sunglare tool."""
import concurrent.futures
import json
import logging
import sys

from . import acquisition
from . import config
from . import errors
from . import formatters
from . import glare
from . import mapper
from . import panorama
from . import roads
from . import solar
from . import storage
from . import synthetic
from . import util

logger = logging.getLogger(__name__)


def main(argv=None):
    """Runs a sunglare subcommand and returns the process exit status.

    Usage errors exit with status 2 (argparse). Failures raise a
    SunglareError, reported as a one-line JSON object on stderr with status 1;
    file system failures are reported the same way, as OutputError.
    """
    argv = sys.argv if argv is None else argv
    try:
        options, args = config.Options.from_argv(argv)
        _configure_logging(args)
        COMMANDS[args.command](options, args)
    except errors.SunglareError as err:
        return _report(err)
    except OSError as err:
        return _report(errors.OutputError(str(err)))
    return 0


def sample_roads(options, args):
    """Writes the sample sites of a road network."""
    segments = storage.load_road_network(args.roads)
    sites = roads.sample_network(segments, options.spacing)
    logger.info('Placed %d sites on %d segments', len(sites), len(segments))
    if args.out:
        storage.write_sites(args.out, sites)
    else:
        sys.stdout.write(formatters.sites_geojson(sites))


def fetch_panoramas(options, args):
    """Downloads the panorama chosen for every site into a store."""
    sites = storage.load_sites(args.sites)
    cache = acquisition.PanoramaCache(options.cache_path)
    transport = _open_transport(options)
    manifest = mapper.RunManifest(sites=len(sites))

    def lookup(site):
        try:
            records = acquisition.fetch_metadata(site, transport)
        except errors.SunglareError as err:
            manifest.warn('Site %s: %s', site.site_id, err, counter='failed')
            return None
        record = acquisition.select_record(
            records, site, options.match_radius, options.record_policy)
        if record is None:
            manifest.warn('Site %s has no panorama within %.0f m',
                          site.site_id, options.match_radius, counter='degraded')
        return record

    def download(record):
        try:
            image = acquisition.fetch_panorama(
                record.panoid, options.zoom, transport, cache)
        except errors.SunglareError as err:
            manifest.warn('Panorama %s: %s', record.panoid, err, counter='failed')
            return
        frame = panorama.PanoramaFrame(
            pano_id=record.panoid, position=record.position,
            yaw_deg=record.yaw_deg, capture_year=record.year,
            capture_month=record.month, width=image.width, height=image.height)
        storage.save_frame(args.store, frame)
        storage.save_panorama(args.store, record.panoid, image)
        if args.heuristic_masks:
            storage.save_mask(args.store,
                              panorama.heuristic_sky_mask(image, record.panoid))

    with concurrent.futures.ThreadPoolExecutor(options.workers) as executor:
        records = [r for r in executor.map(lookup, sites) if r is not None]
        unique = {record.panoid: record for record in records}
        list(executor.map(download, [unique[p] for p in sorted(unique)]))
    manifest.panoramas = len(unique)
    manifest.requests = transport.request_count
    sys.stdout.write(formatters.manifest_yaml(manifest))


def print_glare_table(options, args):
    """Prints the headings exposed to glare, hour by hour."""
    site = solar.GeoPosition(args.lon, args.lat)
    rows = mapper.build_glare_table(
        site, util.parse_dates(args.date), options.timezone,
        options.glare_threshold, options.table_horizon_clearance)
    formatter = formatters.format_glare_table()
    for row in rows:
        for line in formatter.send(row):
            print(line)


def map_glare(options, args):
    """Writes the glare map of sample sites for one date and kind."""
    dates = util.parse_dates(args.date)
    if len(dates) != 1:
        raise errors.InvalidArgumentError('map takes exactly one date')
    sites = storage.load_sites(args.sites)
    kind = glare.GlareKind(args.kind)
    settings = options.glare_settings()
    if args.store:
        store = storage.PanoramaStore(args.store, options.sky_labels)
        document = mapper.map_obstructed_glare(
            sites, dates[0], kind, store, settings, options.match_radius,
            options.record_policy, options.workers)
    else:
        document = mapper.map_geometric_glare(
            sites, dates[0], kind, settings, options.workers)
    _write(args.out, formatters.glare_map_geojson(document))
    if args.csv:
        _write(args.csv, formatters.windows_csv(document.results))
    if args.manifest:
        _write(args.manifest, formatters.manifest_yaml(document.manifest))
    logger.info('%d of %d site directions have %s glare',
                len(document.flagged()), len(document.results), kind.value)


def draw_overlay(options, args):
    """Draws the sun paths of the given dates onto a stored panorama."""
    store = storage.PanoramaStore(args.store, options.sky_labels)
    frame = store.frame(args.panoid)
    mask = store.mask(args.panoid) if args.use_mask else None
    if args.use_mask and mask is None:
        raise errors.NotFoundError(f'no mask is stored for {args.panoid!r}')
    image = storage.load_panorama(args.store, args.panoid)
    canvas, markers = panorama.sun_path_overlay(
        frame, frame.position, util.parse_dates(args.date), options.scan_step,
        image=image, mask=mask, tzinfo=options.timezone)
    canvas.save(args.out, format='PNG')
    logger.info('Drew %d sun positions onto %s', len(markers), args.out)


def validate_scenarios(options, args):
    """Prints predicted and analytic obstruction boundaries of scenarios."""
    if args.scenario == 'all':
        scenarios = list(synthetic.SCENARIOS.values())
    elif args.scenario in synthetic.SCENARIOS:
        scenarios = [synthetic.SCENARIOS[args.scenario]]
    else:
        raise errors.InvalidArgumentError(
            f'unknown scenario {args.scenario!r}; known: '
            f'{", ".join(sorted(synthetic.SCENARIOS))}')
    for scenario in scenarios:
        transitions = mapper.validate_boundary(
            scenario.frame(), scenario.mask(), scenario.pose, scenario.date,
            options.scan_step, scenario.tzinfo)
        crossings = synthetic.analytic_crossings(scenario)
        for line in formatters.format_transitions(
                scenario.name, transitions, crossings, options.scan_step):
            print(line)


COMMANDS = {
    'sample': sample_roads,
    'fetch': fetch_panoramas,
    'glare-table': print_glare_table,
    'map': map_glare,
    'overlay': draw_overlay,
    'validate': validate_scenarios,
}


def _open_transport(options):
    if options.fixture_path:
        return acquisition.FixtureTransport(options.fixture_path,
                                            options.match_radius)
    return acquisition.HttpTransport(
        options.metadata_url, options.tile_url, options.api_key,
        acquisition.RateLimiter(options.rate_limit), options.retry_budget,
        options.backoff)


def _report(err):
    print(json.dumps({'error': err.category, 'message': str(err)}),
          file=sys.stderr)
    return 1


def _configure_logging(args):
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    else:
        level = logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format='%(levelname)s %(name)s: %(message)s')


def _write(path, text):
    if path:
        with open(path, 'w', encoding='utf-8') as out_file:
            out_file.write(text)
    else:
        sys.stdout.write(text)


if __name__ == '__main__':
    sys.exit(main())
