"""Error categories raised by the sunglare toolkit.

Every error carries a machine-readable `category` which the command line
reports on failure. Errors describing bad values also derive from ValueError.
"""


class SunglareError(Exception):
    """Base class for all errors raised deliberately by sunglare."""

    category = 'internal'


class InvalidArgumentError(SunglareError, ValueError):
    """An argument is outside of the domain accepted by an operation."""

    category = 'invalid-argument'


class UnsupportedEpochError(SunglareError, ValueError):
    """An instant falls outside of the ephemeris validity window."""

    category = 'unsupported-epoch'


class InvalidFrameError(SunglareError, ValueError):
    """A panorama frame does not describe a full equirectangular sphere."""

    category = 'invalid-frame'


class InvalidMaskError(SunglareError, ValueError):
    """An obstruction mask cannot be aligned with a panorama."""

    category = 'invalid-mask'


class InvalidMetadataError(SunglareError, ValueError):
    """Panorama metadata holds values outside of their documented ranges."""

    category = 'invalid-metadata'


class ConfigurationError(SunglareError):
    """The configured environment cannot be used (e.g. unwritable cache)."""

    category = 'configuration'


class OutputError(SunglareError):
    """A file could not be read or written."""

    category = 'io'


class TransportError(SunglareError):
    """A request failed after its retry budget was spent."""

    category = 'transport'
    retriable = True


class RejectedRequestError(TransportError):
    """The endpoint refused a request (401, 403 and other client errors)."""

    retriable = False


class NotFoundError(SunglareError):
    """The transport answered that a requested resource does not exist."""

    category = 'not-found'


class ParseError(SunglareError):
    """A payload could not be parsed; `payload_ref` names where it came from."""

    category = 'parse'

    def __init__(self, message, payload_ref=None):
        super().__init__(message)
        self.payload_ref = payload_ref


class IncompletePanoramaError(SunglareError):
    """A tile of the panorama grid could not be retrieved."""

    category = 'incomplete-panorama'

    def __init__(self, panoid, x, y, zoom):
        super().__init__(
            f'panorama {panoid!r} is missing tile x={x} y={y} at zoom {zoom}')
        self.tile = (x, y)


class StitchError(SunglareError):
    """Tiles of a panorama grid disagree on their dimensions."""

    category = 'stitch'
