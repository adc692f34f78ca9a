"""Delimited-text feed formats (speed, alert, closure, weather).

Every feed starts with a ``format_version=N`` header line followed by a CSV
header row; see README for the field documentation.
"""

from __future__ import annotations

import csv
from typing import Sequence

from inciplan.domain import DomainError, SpeedFrame, WeatherRecord
from inciplan.ingest.incidents import AlertEvent, ClosureEvent

FEED_FORMAT_VERSION = 1

SPEED_FIELDS = ("segment_id", "timestamp", "speed_mph")
ALERT_FIELDS = ("timestamp", "segment_id", "category")
CLOSURE_FIELDS = ("open_timestamp", "close_timestamp", "segment_ids", "closure_type")
WEATHER_FIELDS = (
    "timestamp", "temperature", "humidity", "wind_speed",
    "pressure", "visibility", "precip_hourly", "pavement_wet",
)


def _open_feed(path):
    fh = open(path, newline="")
    header = fh.readline().strip()
    if header != f"format_version={FEED_FORMAT_VERSION}":
        fh.close()
        raise DomainError(f"{path}: unsupported feed header {header!r}")
    return fh


def _write_feed(path, fields, rows):
    with open(path, "w", newline="") as fh:
        fh.write(f"format_version={FEED_FORMAT_VERSION}\n")
        writer = csv.writer(fh)
        writer.writerow(fields)
        writer.writerows(rows)


def write_speed_feed(path, records: Sequence[tuple[str, int, float]]) -> None:
    """records: (segment_id, timestamp, speed_mph) tuples."""
    _write_feed(path, SPEED_FIELDS, records)


def read_speed_feed(path) -> list[tuple[str, int, float]]:
    with _open_feed(path) as fh:
        reader = csv.DictReader(fh)
        return [
            (row["segment_id"], int(row["timestamp"]), float(row["speed_mph"]))
            for row in reader
        ]


def write_speed_frames(path, frames: Sequence[SpeedFrame], segments: Sequence[str]) -> None:
    rows = [
        (seg, frame.timestamp, f"{frame.speeds[i]:.4f}")
        for frame in frames
        for i, seg in enumerate(segments)
    ]
    _write_feed(path, SPEED_FIELDS, rows)


def write_alert_feed(path, alerts: Sequence[AlertEvent]) -> None:
    _write_feed(path, ALERT_FIELDS, [(a.timestamp, a.segment_id, a.category) for a in alerts])


def read_alert_feed(path) -> list[AlertEvent]:
    with _open_feed(path) as fh:
        return [
            AlertEvent(int(r["timestamp"]), r["segment_id"], r["category"])
            for r in csv.DictReader(fh)
        ]


def write_closure_feed(path, closures: Sequence[ClosureEvent]) -> None:
    rows = [
        (c.open_timestamp, c.close_timestamp, ";".join(c.segment_ids), c.closure_type)
        for c in closures
    ]
    _write_feed(path, CLOSURE_FIELDS, rows)


def read_closure_feed(path) -> list[ClosureEvent]:
    with _open_feed(path) as fh:
        return [
            ClosureEvent(
                int(r["open_timestamp"]),
                int(r["close_timestamp"]),
                tuple(s for s in r["segment_ids"].split(";") if s),
                r["closure_type"],
            )
            for r in csv.DictReader(fh)
        ]


def write_weather_feed(path, records: Sequence[WeatherRecord]) -> None:
    rows = [
        (
            r.timestamp, r.temperature, r.humidity, r.wind_speed,
            r.pressure, r.visibility, r.precip_hourly, r.pavement_wet,
        )
        for r in records
    ]
    _write_feed(path, WEATHER_FIELDS, rows)


def read_weather_feed(path) -> list[WeatherRecord]:
    with _open_feed(path) as fh:
        out = []
        for r in csv.DictReader(fh):
            out.append(
                WeatherRecord(
                    timestamp=int(r["timestamp"]),
                    temperature=float(r["temperature"]),
                    humidity=float(r["humidity"]),
                    wind_speed=float(r["wind_speed"]),
                    pressure=float(r["pressure"]),
                    visibility=float(r["visibility"]),
                    precip_hourly=float(r["precip_hourly"]),
                    pavement_wet=int(r["pavement_wet"]),
                )
            )
        return out
