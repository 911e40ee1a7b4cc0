"""Driver/sun relative angles, the glare criterion and daily glare windows.

A driver is exposed to glare when the sun is above the horizon and both the
horizontal angle between heading and sun azimuth and the vertical angle
between road grade and sun elevation are strictly lower than the glare
threshold (25 degrees by default), unless the sun is obstructed.
"""
import dataclasses
import datetime as dt
import enum

import numpy as np

from . import errors
from . import solar
from . import util

GLARE_THRESHOLD_DEG = 25.0
MAX_SLOPE_DEG = 45.0
DEFAULT_STEP = dt.timedelta(seconds=60)


class GlareKind(enum.Enum):
    """Whether glare happens while the sun rises or sets."""

    SUNRISE = 'sunrise'
    SUNSET = 'sunset'


@dataclasses.dataclass(frozen=True)
class DriverPose:
    """A driver position with heading (clockwise from north) and road grade."""

    position: solar.GeoPosition
    heading_deg: float
    slope_deg: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, 'heading_deg', util.normalize_degrees(self.heading_deg))
        if not abs(self.slope_deg) < MAX_SLOPE_DEG:
            raise errors.InvalidArgumentError(
                f'slope {self.slope_deg} must be within +/-{MAX_SLOPE_DEG}')


@dataclasses.dataclass(frozen=True)
class GlareVerdict:
    """Outcome of the glare criterion at one instant.

    `obstructed` is None when no obstruction data was consulted, in which case
    the final verdict is the geometric one.
    """

    geometric_glare: bool
    h_glare_deg: float
    v_glare_deg: float
    obstructed: bool = None

    @property
    def final_glare(self):
        """Glare after accounting for obstruction."""
        return self.geometric_glare and not self.obstructed

    def with_obstruction(self, obstructed):
        """Returns a copy of the verdict with the obstruction state set."""
        return dataclasses.replace(self, obstructed=obstructed)


@dataclasses.dataclass(frozen=True)
class GlareWindow:
    """A continuous stretch of glare, labeled by the half of the day it is in."""

    start: dt.datetime
    end: dt.datetime
    kind: GlareKind

    def __post_init__(self):
        if not self.start < self.end:
            raise errors.InvalidArgumentError(
                f'window start {self.start} is not before its end {self.end}')

    @property
    def duration(self):
        return self.end - self.start

    def contains(self, other):
        """Whether `other` lies within this window."""
        return self.start <= other.start and other.end <= self.end


@dataclasses.dataclass(frozen=True)
class OrientationRange:
    """The headings exposed to glare, from `low_deg` clockwise to `high_deg`."""

    low_deg: float
    high_deg: float

    @classmethod
    def around(cls, azimuth_deg, half_width_deg=GLARE_THRESHOLD_DEG):
        return cls(util.normalize_degrees(azimuth_deg - half_width_deg),
                   util.normalize_degrees(azimuth_deg + half_width_deg))

    @property
    def width_deg(self):
        return util.normalize_degrees(self.high_deg - self.low_deg)

    @property
    def center_deg(self):
        return util.normalize_degrees(self.low_deg + self.width_deg / 2.0)

    def contains(self, heading_deg):
        """Whether the heading lies strictly inside the range."""
        offset = util.normalize_degrees(heading_deg - self.low_deg)
        return 0.0 < offset < self.width_deg


def h_glare(sun_azimuth_deg, heading_deg):
    """Returns the horizontal sun/heading angle in [0, 180] degrees."""
    return util.angular_distance(sun_azimuth_deg, heading_deg)


def v_glare(sun_elevation_deg, slope_deg):
    """Returns the vertical angle between the sun and the road grade."""
    return abs(sun_elevation_deg - slope_deg)


def judge(pose, sun, threshold_deg=GLARE_THRESHOLD_DEG, horizon_deg=0.0):
    """Applies the glare criterion to a pose and a known SolarPosition."""
    h_angle = h_glare(sun.azimuth_deg, pose.heading_deg)
    v_angle = v_glare(sun.elevation_deg, pose.slope_deg)
    return GlareVerdict(
        geometric_glare=(sun.elevation_deg > horizon_deg
                         and h_angle < threshold_deg
                         and v_angle < threshold_deg),
        h_glare_deg=h_angle,
        v_glare_deg=v_angle)


def geometric_glare(pose, t, threshold_deg=GLARE_THRESHOLD_DEG,
                    horizon_deg=0.0):
    """Returns the GlareVerdict at instant `t`, obstruction left unset."""
    return judge(pose, solar.solar_position(pose.position, t),
                 threshold_deg, horizon_deg)


def orientation_range(site, t, threshold_deg=GLARE_THRESHOLD_DEG,
                      horizon_deg=0.0):
    """Returns the headings exposed to glare on a flat road, or None.

    A range exists only while the sun is above `horizon_deg` and lower than
    the threshold; it spans the sun azimuth +/- the threshold.
    """
    sun = solar.solar_position(site, t)
    if not horizon_deg < sun.elevation_deg < threshold_deg:
        return None
    return OrientationRange.around(sun.azimuth_deg, threshold_deg)


def solar_noons(site, date):
    """Returns the solar noons of the days before, of and after `date`."""
    return [solar.solar_noon(site, date + dt.timedelta(days=offset))
            for offset in (-1, 0, 1)]


def nearest_noon(t, noons):
    """Returns the solar noon in `noons` closest to instant `t`."""
    return min(noons, key=lambda noon: abs(t - noon))


def glare_kind(t, noons):
    """Labels an instant as sunrise or sunset by its nearest solar noon."""
    return GlareKind.SUNRISE if t < nearest_noon(t, noons) else GlareKind.SUNSET


def glare_windows(pose, date, step=DEFAULT_STEP, obstruction=None,
                  tzinfo=dt.timezone.utc, threshold_deg=GLARE_THRESHOLD_DEG,
                  horizon_deg=0.0):
    """Scans a civil day and returns its glare windows.

    Args:
        pose: DriverPose evaluated.
        date: civil date in `tzinfo`.
        step: positive datetime.timedelta between samples; boundaries of the
            returned windows are accurate to one step.
        obstruction: optional callable(instant) -> bool telling whether the
            sun is obstructed; only consulted at geometric glare samples.
        tzinfo: zone of the civil date and of the returned instants.
        threshold_deg: glare criterion on both relative angles.
        horizon_deg: sun elevation the sun must exceed.

    Returns:
        List of GlareWindow ordered by start. Each window is labeled by the
        solar noon nearest to it, so an evening sun scanned early in a civil
        day far from the site's meridian is still sunset glare. A window never
        spans a solar noon or the solar midnight between two noons.

    Raises:
        InvalidArgumentError: step is zero or negative.
    """
    if step <= dt.timedelta(0):
        raise errors.InvalidArgumentError(f'step must be positive, got {step}')
    start_utc, stop_utc = util.local_day_bounds(date, tzinfo)
    instants, elevations, azimuths = solar.day_samples(
        pose.position, start_utc, stop_utc, step)
    flags = glare_mask(pose, elevations, azimuths, threshold_deg, horizon_deg)

    tracker = track_windows(step, solar_noons(pose.position, date), tzinfo)
    windows = []
    for t, flag in zip(instants, flags):
        if flag and obstruction is not None:
            flag = not obstruction(t)
        windows.extend(tracker.send((t, flag)))
    windows.extend(tracker.send(None))
    return windows


def glare_mask(pose, elevations, azimuths, threshold_deg=GLARE_THRESHOLD_DEG,
               horizon_deg=0.0):
    """Vectorised geometric criterion over arrays of sun angles."""
    h_angles = np.abs(np.mod(azimuths - pose.heading_deg, 360.0))
    h_angles = np.where(h_angles > 180.0, 360.0 - h_angles, h_angles)
    v_angles = np.abs(elevations - pose.slope_deg)
    return ((elevations > horizon_deg)
            & (h_angles < threshold_deg)
            & (v_angles < threshold_deg))


@util.prime_coroutine_generator
def track_windows(step, noons, tzinfo=dt.timezone.utc):
    """Merges (instant, glare) samples into GlareWindows.

    `noons` are the solar noons samples are labeled by, see glare_kind.
    Send samples in chronological order; each send yields the list of windows
    closed by that sample. Send None to flush the open window.
    """
    noons = sorted(noons)
    closed = []
    run_start = run_last = run_phase = None
    while True:
        sample = yield closed
        closed = []
        if sample is None:
            flag = False
        else:
            t, flag = sample
            phase = _phase(t, noons)
            # A run never crosses a solar noon or a solar midnight.
            if run_start is not None and flag and phase != run_phase:
                closed.append(_close_window(run_start, run_last, step,
                                            run_phase, noons, tzinfo))
                run_start = None
        if flag:
            if run_start is None:
                run_start, run_phase = t, phase
            run_last = t
        elif run_start is not None:
            closed.append(_close_window(run_start, run_last, step, run_phase,
                                        noons, tzinfo))
            run_start = None


def _phase(t, noons):
    """Returns (nearest noon, kind), the half day instant `t` lies in."""
    noon = nearest_noon(t, noons)
    return noon, GlareKind.SUNRISE if t < noon else GlareKind.SUNSET


def _close_window(first, last, step, phase, noons, tzinfo):
    noon, kind = phase
    end = last + step
    if kind is GlareKind.SUNRISE:
        end = min(end, noon)
    else:
        later = [n for n in noons if n > noon]
        midnight = noon + ((later[0] - noon) / 2 if later
                           else dt.timedelta(hours=12))
        if midnight > last:
            end = min(end, midnight)
    return GlareWindow(first.astimezone(tzinfo), end.astimezone(tzinfo), kind)
