"""Turns glare results into text tables, GeoJSON documents and CSV rows.

Here is a summary of the implemented output formats:

    Output                  Shape
    ======                  =====
    orientation table       January 20, 2018
                              8 am   sunrise  [100.87, 150.87]
    sites                   GeoJSON points: site_id, heading_deg,
                            reverse_heading_deg, segment_id, chainage_m
    glare map               GeoJSON points, one per site and direction
    windows                 CSV: site_id, direction, kind, start, end,
                            duration_s, obstructed
    run manifest            YAML mapping of run counters

Documents are written with sorted keys and fixed float precision so that
identical inputs give byte-identical files.
"""
import csv
import io
import json

import yaml

from . import util

COORDINATE_DIGITS = 7
ANGLE_DIGITS = 4
WINDOW_FIELDS = ['site_id', 'direction', 'kind', 'start', 'end', 'duration_s',
                 'obstructed']


@util.prime_coroutine_generator
def format_glare_table():
    """Transforms TableRows into text lines, heading each new date.

    Each send returns the lines produced by one row.
    """
    lines = []
    current_date = None
    while True:
        row = yield lines
        lines = []
        if row.date != current_date:
            if current_date is not None:
                lines.append('')
            lines.append(f'{row.date:%B} {row.date.day}, {row.date.year}')
            current_date = row.date
        lines.append(format_table_row(row))


def format_table_row(row):
    """Returns '  8 am   sunrise  [100.87, 150.87]' for a TableRow."""
    return (f'  {util.format_hour(row.hour):<6} {row.kind.value:<8} '
            f'[{row.range.low_deg:.2f}, {row.range.high_deg:.2f}]')


def format_transitions(scenario_name, transitions, crossings=None, step=None):
    """Returns report lines comparing predicted and analytic transitions."""
    lines = [f'{scenario_name}: {len(transitions)} transition(s)']
    crossings = crossings if crossings is not None else [None] * len(transitions)
    for transition, crossing in zip(transitions, crossings):
        state = 'blocked' if transition.obstructed else 'clear'
        line = f'  {transition.instant.isoformat()}  {state}'
        if transition.during_glare:
            line += '  (during glare)'
        if crossing is not None:
            error_s = (transition.instant - crossing[0]).total_seconds()
            line += f'  analytic {crossing[0].isoformat(timespec="seconds")}'
            line += f'  error {error_s:.1f}s'
            if step is not None and abs(error_s) > step.total_seconds():
                line += '  OUT OF TOLERANCE'
        lines.append(line)
    if crossings and len(crossings) != len(transitions):
        lines.append(f'  expected {len(crossings)} crossing(s)')
    return lines


def sites_geojson(sites):
    """Returns the canonical GeoJSON point collection of sample sites."""
    features = []
    for site in sorted(sites, key=lambda s: s.site_id):
        reverse = site.reverse_heading_deg
        features.append(_point_feature(site.position, {
            'site_id': site.site_id,
            'heading_deg': round(site.heading_deg, ANGLE_DIGITS),
            'reverse_heading_deg': (None if reverse is None
                                    else round(reverse, ANGLE_DIGITS)),
            'segment_id': site.segment_id,
            'chainage_m': round(site.chainage_m, 3),
        }))
    return _dumps({'type': 'FeatureCollection', 'features': features})


def glare_map_geojson(document):
    """Returns the canonical GeoJSON of a GlareMapDocument.

    Each feature carries the obstructed and geometric glare flags of the
    document's kind, their total durations and the window boundaries, so a
    map can render either the flag or the duration.
    """
    features = []
    for result in document.results:
        site = document.sites[result.site_id]
        windows = result.windows_of(document.kind)
        features.append(_point_feature(site.position, {
            'site_id': result.site_id,
            'direction': result.direction,
            'heading_deg': round(site.heading_deg if result.direction == 'forward'
                                 else site.reverse_heading_deg, ANGLE_DIGITS),
            'glare': bool(windows),
            'geometric_glare': result.has_glare(document.kind, geometric=True),
            'duration_s': result.duration(document.kind).total_seconds(),
            'geometric_duration_s': result.duration(
                document.kind, geometric=True).total_seconds(),
            'windows': [[w.start.isoformat(), w.end.isoformat()]
                        for w in windows],
            'pano_id': result.pano_id,
            'mask_source': result.mask_source,
            'error': result.error,
        }))
    return _dumps({
        'type': 'FeatureCollection',
        'properties': {
            'date': document.date.isoformat(),
            'kind': document.kind.value,
            'obstruction_considered': document.obstruction_considered,
        },
        'features': features,
    })


def windows_csv(results):
    """Returns the flat CSV table of every window of the given results.

    Geometric windows are listed with `obstructed` false; windows left after
    obstruction are listed again with `obstructed` true when a mask was used.
    """
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=WINDOW_FIELDS,
                            lineterminator='\n')
    writer.writeheader()
    for result in sorted(results, key=lambda r: (r.site_id, r.direction)):
        listings = [(False, result.geometric_windows)]
        if result.mask_source != 'none':
            listings.append((True, result.windows))
        for obstructed, windows in listings:
            for window in windows:
                writer.writerow({
                    'site_id': result.site_id,
                    'direction': result.direction,
                    'kind': window.kind.value,
                    'start': window.start.isoformat(),
                    'end': window.end.isoformat(),
                    'duration_s': int(window.duration.total_seconds()),
                    'obstructed': str(obstructed).lower(),
                })
    return buffer.getvalue()


def manifest_yaml(manifest):
    return yaml.safe_dump(manifest.to_dict(), sort_keys=True)


def _point_feature(position, properties):
    return {
        'type': 'Feature',
        'geometry': {
            'type': 'Point',
            'coordinates': [round(position.lon, COORDINATE_DIGITS),
                            round(position.lat, COORDINATE_DIGITS)],
        },
        'properties': properties,
    }


def _dumps(document):
    return json.dumps(document, sort_keys=True, indent=2) + '\n'
