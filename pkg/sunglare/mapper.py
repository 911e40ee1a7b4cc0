"""Runs the glare model over sample sites and reproduces orientation tables."""
import collections
import concurrent.futures
import dataclasses
import datetime as dt
import logging
import threading
import time

from . import errors
from . import glare
from . import panorama
from . import solar
from . import util

logger = logging.getLogger(__name__)

_MANIFEST_LOCK = threading.Lock()

TABLE_HOURS = range(5, 21)
MAX_VALIDATION_STEP = dt.timedelta(seconds=60)
MASK_SOURCES = ('model', 'heuristic', 'none')

TableRow = collections.namedtuple('TableRow', ['date', 'hour', 'kind', 'range'])
Transition = collections.namedtuple(
    'Transition', ['instant', 'obstructed', 'during_glare'])


@dataclasses.dataclass(frozen=True)
class GlareSettings:
    """Parameters shared by every evaluation of a run."""

    tzinfo: dt.tzinfo = dt.timezone.utc
    step: dt.timedelta = glare.DEFAULT_STEP
    threshold_deg: float = glare.GLARE_THRESHOLD_DEG
    horizon_deg: float = 0.0


@dataclasses.dataclass(frozen=True)
class SiteGlareResult:
    """Glare windows of one site, driven in one direction, on one date.

    `geometric_windows` ignore obstruction; `windows` account for it when a
    mask was available and equal the geometric windows otherwise.
    """

    site_id: str
    date: dt.date
    direction: str
    windows: tuple
    geometric_windows: tuple
    pano_id: str = None
    mask_source: str = 'none'
    error: str = None

    def windows_of(self, kind, geometric=False):
        source = self.geometric_windows if geometric else self.windows
        return [window for window in source if window.kind is kind]

    def has_glare(self, kind, geometric=False):
        return bool(self.windows_of(kind, geometric))

    def duration(self, kind=None, geometric=False):
        """Total glare time, of one kind or of both."""
        source = self.geometric_windows if geometric else self.windows
        return sum((window.duration for window in source
                    if kind is None or window.kind is kind), dt.timedelta(0))


@dataclasses.dataclass
class RunManifest:
    """Summary of a mapping or fetching run."""

    sites: int = 0
    poses: int = 0
    panoramas: int = 0
    degraded: int = 0
    failed: int = 0
    requests: int = 0
    elapsed_s: float = 0.0
    warnings: list = dataclasses.field(default_factory=list)

    def warn(self, message, *args, counter=None):
        """Logs a warning and records it, bumping `counter` if one is named."""
        logger.warning(message, *args)
        with _MANIFEST_LOCK:
            self.warnings.append(message % args)
            if counter is not None:
                setattr(self, counter, getattr(self, counter) + 1)

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class GlareMapDocument:
    """Per-site glare flags of one date and kind, ordered by site id.

    `sites` maps every site id in `results` to its SampleSite.
    """

    date: dt.date
    kind: glare.GlareKind
    results: tuple
    sites: dict
    obstruction_considered: bool = False
    manifest: RunManifest = dataclasses.field(
        default_factory=RunManifest, compare=False)

    def flagged(self, geometric=False):
        """Returns the (site_id, direction) pairs with glare of this kind."""
        return [(result.site_id, result.direction) for result in self.results
                if result.has_glare(self.kind, geometric)]


def build_glare_table(site, dates, tzinfo=dt.timezone.utc,
                      threshold_deg=glare.GLARE_THRESHOLD_DEG, horizon_deg=0.0):
    """Returns the orientation ranges exposed to glare at whole clock hours.

    For each date, every hour from 5:00 to 20:00 local time whose sun lies
    between `horizon_deg` and the threshold yields a TableRow, labeled sunrise
    or sunset by the nearest solar noon.
    """
    rows = []
    for date in dates:
        noons = glare.solar_noons(site, date)
        for hour in TABLE_HOURS:
            instant = dt.datetime.combine(date, dt.time(hour)).replace(
                tzinfo=tzinfo)
            heading_range = glare.orientation_range(
                site, instant, threshold_deg, horizon_deg)
            if heading_range is not None:
                kind = glare.glare_kind(instant, noons)
                rows.append(TableRow(date, hour, kind, heading_range))
    return rows


def evaluate_site(site, date, settings=None, frame=None, mask=None,
                  slope_deg=0.0):
    """Returns a SiteGlareResult for every direction the site is driven.

    Raises:
        InvalidMaskError: the mask belongs to another panorama than `frame`.
    """
    settings = settings or GlareSettings()
    obstruction = None
    if frame is not None and mask is not None:
        _check_pair(frame, mask)

        def obstruction(instant):
            return panorama.is_obstructed(
                frame, mask, solar.solar_position(site.position, instant))

    results = []
    for direction, pose in site.poses(slope_deg):
        geometric = glare.glare_windows(
            pose, date, settings.step, None, settings.tzinfo,
            settings.threshold_deg, settings.horizon_deg)
        if obstruction is None:
            windows = geometric
        else:
            windows = glare.glare_windows(
                pose, date, settings.step, obstruction, settings.tzinfo,
                settings.threshold_deg, settings.horizon_deg)
        results.append(SiteGlareResult(
            site_id=site.site_id, date=date, direction=direction,
            windows=tuple(windows), geometric_windows=tuple(geometric),
            pano_id=frame.pano_id if obstruction else None,
            mask_source=mask.source if obstruction else 'none'))
    return results


def map_geometric_glare(sites, date, kind, settings=None, workers=1):
    """Flags the sites exposed to glare of `kind`, ignoring obstruction.

    Raises:
        InvalidArgumentError: no sites were given, or site ids repeat.
    """
    _check_sites(sites)
    started = time.monotonic()
    manifest = RunManifest(sites=len(sites))

    def evaluate(site):
        return evaluate_site(site, date, settings)

    results = _run(evaluate, sites, workers)
    manifest.poses = len(results)
    manifest.elapsed_s = time.monotonic() - started
    return _document(date, kind, results, sites, False, manifest)


def map_obstructed_glare(sites, date, kind, store, settings=None,
                         radius_m=25.0, policy='leaf-on-recent', workers=1):
    """Flags the sites exposed to glare of `kind`, accounting for obstruction.

    `store` resolves a site into a (frame, mask) pair, see
    storage.PanoramaStore. Sites without a frame or mask are evaluated
    geometrically and counted as degraded; sites whose evaluation fails are
    recorded with their error and counted as failed. Neither aborts the run.

    Raises:
        InvalidArgumentError: no sites were given, or site ids repeat.
    """
    _check_sites(sites)
    started = time.monotonic()
    manifest = RunManifest(sites=len(sites))

    def evaluate(site):
        try:
            resolved = store.resolve(site, radius_m, policy)
        except errors.SunglareError as err:
            return _failed(site, date, settings, err, manifest)
        if resolved is None or resolved[1] is None:
            manifest.warn('Site %s has no obstruction mask; evaluating '
                          'geometric glare only', site.site_id,
                          counter='degraded')
            return evaluate_site(site, date, settings)
        frame, mask = resolved
        try:
            return evaluate_site(site, date, settings, frame, mask)
        except errors.SunglareError as err:
            return _failed(site, date, settings, err, manifest)

    results = _run(evaluate, sites, workers)
    if manifest.degraded == len(sites):
        manifest.warn('No site could be resolved to an obstruction mask')
    manifest.poses = len(results)
    manifest.elapsed_s = time.monotonic() - started
    return _document(date, kind, results, sites, True, manifest)


def validate_boundary(frame, mask, pose, date, step=glare.DEFAULT_STEP,
                      tzinfo=dt.timezone.utc):
    """Returns the instants at which the sun passes between sky and obstruction.

    The day is scanned at `step`; each Transition carries the first sample
    in the new state, so it lags the true crossing by less than one step.
    Samples with the sun at or below the horizon are ignored.

    Raises:
        InvalidArgumentError: step is not positive or exceeds
            MAX_VALIDATION_STEP.
        InvalidMaskError: the mask belongs to another panorama than `frame`.
    """
    if not dt.timedelta(0) < step <= MAX_VALIDATION_STEP:
        raise errors.InvalidArgumentError(
            f'step must be positive and at most {MAX_VALIDATION_STEP}, '
            f'got {step}')
    _check_pair(frame, mask)
    start_utc, stop_utc = util.local_day_bounds(date, tzinfo)
    instants, elevations, azimuths = solar.day_samples(
        pose.position, start_utc, stop_utc, step)
    glaring = glare.glare_mask(pose, elevations, azimuths)

    transitions = []
    previous = None
    for t, elevation, azimuth, flag in zip(instants, elevations, azimuths,
                                           glaring):
        if elevation <= 0.0:
            previous = None
            continue
        obstructed = panorama.is_obstructed(
            frame, mask, solar.SolarPosition(float(elevation), float(azimuth)))
        if previous is not None and obstructed != previous:
            transitions.append(
                Transition(t.astimezone(tzinfo), obstructed, bool(flag)))
        previous = obstructed
    return transitions


def _check_sites(sites):
    if not sites:
        raise errors.InvalidArgumentError('at least one sample site is required')
    counts = collections.Counter(site.site_id for site in sites)
    repeated = sorted(site_id for site_id, count in counts.items() if count > 1)
    if repeated:
        raise errors.InvalidArgumentError(f'site ids repeat: {repeated}')


def _check_pair(frame, mask):
    if mask.pano_id is not None and mask.pano_id != frame.pano_id:
        raise errors.InvalidMaskError(
            f'mask of {mask.pano_id!r} applied to frame {frame.pano_id!r}')


def _failed(site, date, settings, err, manifest):
    manifest.warn('Site %s failed (%s): %s', site.site_id, err.category, err,
                  counter='failed')
    return [dataclasses.replace(result, error=f'{err.category}: {err}')
            for result in evaluate_site(site, date, settings)]


def _run(evaluate, sites, workers):
    """Evaluates every site, possibly in parallel, flattening the results."""
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(workers) as executor:
            per_site = list(executor.map(evaluate, sites))
    else:
        per_site = [evaluate(site) for site in sites]
    return [result for results in per_site for result in results]


def _document(date, kind, results, sites, obstruction_considered, manifest):
    return GlareMapDocument(
        date=date,
        kind=kind,
        results=tuple(sorted(results, key=lambda r: (r.site_id, r.direction))),
        sites={site.site_id: site for site in sites},
        obstruction_considered=obstruction_considered,
        manifest=manifest)
