"""Equirectangular panoramas, their sky masks, and sun projection onto them.

Pixel layout of a panorama of width W and height H = W/2:

    - column W/2 faces the vehicle heading (yaw); x grows with clockwise
      azimuth, one full turn over the width;
    - row H/2 is the horizon of the (tilted) panorama; y shrinks as elevation
      grows, 180 degrees over the height.
"""
import dataclasses
import datetime as dt
import math

import numpy as np
from PIL import Image
from PIL import ImageDraw

from . import errors
from . import solar
from . import util

SKY_LABEL = 0
OBSTRUCTION_LABEL = 255
VERTICAL_SPAN_DEG = 180.0

# Heuristic sky classification thresholds (0-255 channel scale).
SKY_MIN_BRIGHTNESS = 90
SKY_MIN_BLUE_MARGIN = 15

MARKER_RADIUS = 3
PATH_COLORS = [
    (255, 0, 0), (255, 140, 0), (0, 160, 0), (0, 90, 255), (170, 0, 200),
    (0, 190, 190),
]


@dataclasses.dataclass(frozen=True)
class PanoramaFrame:
    """Metadata of a full-sphere equirectangular panorama.

    `capture_month` is not range-checked here; season classification reports
    bad months per frame.
    """

    pano_id: str
    position: solar.GeoPosition
    yaw_deg: float
    capture_year: int
    capture_month: int
    width: int
    height: int
    tilt_deg: float = 0.0

    def __post_init__(self):
        if self.height <= 0 or self.width != 2 * self.height:
            raise errors.InvalidFrameError(
                f'frame {self.pano_id!r} is {self.width}x{self.height}; '
                f'equirectangular frames are 2:1')
        object.__setattr__(self, 'yaw_deg', util.normalize_degrees(self.yaw_deg))


@dataclasses.dataclass(frozen=True, eq=False)
class ObstructionMask:
    """A label raster aligned to a panorama, split into sky and non-sky.

    `labels` is a (height, width) uint8 array of class indices. `source` tells
    where the labels came from: 'model' or 'heuristic'.
    """

    labels: np.ndarray
    sky_labels: frozenset = frozenset({SKY_LABEL})
    pano_id: str = None
    source: str = 'model'

    def __post_init__(self):
        labels = np.array(self.labels)
        if labels.ndim != 2 or labels.dtype != np.uint8:
            raise errors.InvalidMaskError(
                f'mask labels must be a 2-D uint8 raster, got '
                f'{labels.dtype} with shape {labels.shape}')
        height, width = labels.shape
        if height == 0 or width != 2 * height:
            raise errors.InvalidMaskError(
                f'mask is {width}x{height}; masks must be 2:1')
        labels.flags.writeable = False
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'sky_labels', frozenset(self.sky_labels))

    @property
    def width(self):
        return self.labels.shape[1]

    @property
    def height(self):
        return self.labels.shape[0]

    @property
    def sky(self):
        """Boolean raster, True where the label counts as open sky."""
        return np.isin(self.labels, list(self.sky_labels))

    @property
    def sky_fraction(self):
        return float(self.sky.mean())

    def upscaled(self, factor):
        """Returns the mask enlarged by an integer factor (nearest neighbour)."""
        labels = np.repeat(np.repeat(self.labels, factor, axis=0), factor, axis=1)
        return dataclasses.replace(self, labels=labels)


@dataclasses.dataclass(frozen=True)
class PixelPoint:
    """Continuous pixel coordinates inside a panorama raster."""

    x: float
    y: float


def project_sun(frame, sun):
    """Returns where the sun direction meets the panorama, or None.

    Raises:
        InvalidFrameError: frame is not 2:1.
    """
    _check_frame(frame)
    width, height = frame.width, frame.height
    x = math.fmod((sun.azimuth_deg - frame.yaw_deg) / 360.0 * width
                  + width / 2.0, width)
    if x < 0.0:
        x += width
    if x >= width:
        x = 0.0
    y = height / 2.0 - (sun.elevation_deg - frame.tilt_deg) / VERTICAL_SPAN_DEG * height
    if y < 0.0 or y > height:
        return None
    return PixelPoint(x, min(y, math.nextafter(float(height), 0.0)))


def pixel_to_direction(frame, point):
    """Returns the (azimuth, elevation) in degrees seen through a pixel point."""
    azimuth = util.normalize_degrees(
        frame.yaw_deg + (point.x - frame.width / 2.0) / frame.width * 360.0)
    elevation = (frame.tilt_deg
                 + (frame.height / 2.0 - point.y) / frame.height * VERTICAL_SPAN_DEG)
    return azimuth, elevation


def is_obstructed(frame, mask, sun):
    """Whether the sun falls on a non-sky pixel of the mask.

    The sun at or below the horizon counts as obstructed by the ground.

    Raises:
        InvalidMaskError: the mask is not 2:1.
    """
    if mask.width != 2 * mask.height:
        raise errors.InvalidMaskError(
            f'mask is {mask.width}x{mask.height}; masks must be 2:1')
    if sun.elevation_deg <= 0.0:
        return True
    point = project_sun(frame, sun)
    if point is None:
        return True
    column, row = _mask_pixel(frame, mask, point)
    return int(mask.labels[row, column]) not in mask.sky_labels


def sun_path_overlay(frame, site, dates, step, image=None, mask=None,
                     tzinfo=dt.timezone.utc):
    """Draws the sun paths of several days onto a panorama.

    The background is the binary mask rendering when a mask is given (white
    sky, black obstruction), else a copy of `image`, else a neutral canvas.
    Only samples with the sun above the horizon are marked.

    Returns:
        (PIL.Image.Image, markers) where markers is a list of
        (date, instant, PixelPoint) in drawing order.

    Raises:
        InvalidArgumentError: no dates were given or step is not positive.
    """
    if not dates:
        raise errors.InvalidArgumentError('at least one date is required')
    _check_frame(frame)
    size = (frame.width, frame.height)
    if mask is not None:
        rendering = Image.fromarray(np.where(mask.sky, 255, 0).astype(np.uint8))
        canvas = rendering.resize(size, Image.NEAREST).convert('RGB')
    elif image is not None:
        canvas = image.convert('RGB').resize(size, Image.NEAREST)
    else:
        canvas = Image.new('RGB', size, (128, 128, 128))

    draw = ImageDraw.Draw(canvas)
    markers = []
    for index, date in enumerate(dates):
        color = PATH_COLORS[index % len(PATH_COLORS)]
        for instant, sun in solar.sun_path(site, date, step, tzinfo):
            if sun.elevation_deg <= 0.0:
                continue
            point = project_sun(frame, sun)
            if point is None:
                continue
            draw.ellipse([point.x - MARKER_RADIUS, point.y - MARKER_RADIUS,
                          point.x + MARKER_RADIUS, point.y + MARKER_RADIUS],
                         fill=color)
            markers.append((date, instant, point))
    return canvas, markers


def heuristic_sky_mask(image, pano_id=None):
    """Labels bright, blue-dominant pixels as sky.

    Only meant for fixtures and demos; the returned mask is flagged as
    heuristic.

    Raises:
        InvalidArgumentError: the image is not 2:1.
    """
    width, height = image.size
    if height == 0 or width != 2 * height:
        raise errors.InvalidArgumentError(
            f'image is {width}x{height}; panoramas must be 2:1')
    rgb = np.asarray(image.convert('RGB'), dtype=np.int16)
    red, green, blue = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    brightness = rgb.mean(axis=2)
    sky = ((brightness >= SKY_MIN_BRIGHTNESS)
           & (blue - np.maximum(red, green) >= SKY_MIN_BLUE_MARGIN))
    labels = np.where(sky, SKY_LABEL, OBSTRUCTION_LABEL).astype(np.uint8)
    return ObstructionMask(labels, pano_id=pano_id, source='heuristic')


def _check_frame(frame):
    if frame.width != 2 * frame.height:
        raise errors.InvalidFrameError(
            f'frame {frame.pano_id!r} is {frame.width}x{frame.height}')


def _mask_pixel(frame, mask, point):
    """Returns the (column, row) of the mask pixel holding a frame point."""
    column = int(point.x * mask.width / frame.width)
    row = int(point.y * mask.height / frame.height)
    return min(column, mask.width - 1), min(row, mask.height - 1)
