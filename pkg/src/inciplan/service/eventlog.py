"""Append-only engagement log with crash-safe reload."""

from __future__ import annotations

import json
import os
import threading

from inciplan.domain import DomainError, EngagementRecord


class EngagementLog:
    """Line-delimited JSON records, strictly time-ordered, single writer.

    Reload ignores a partially written (unterminated or unparseable) final
    line; corruption anywhere else is an error.
    """

    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()
        self._records: list[EngagementRecord] = []
        if os.path.exists(path):
            self._records = self._load(path)

    @staticmethod
    def _load(path) -> list[EngagementRecord]:
        with open(path, "rb") as fh:
            raw = fh.read()
        records: list[EngagementRecord] = []
        lines = raw.split(b"\n")
        lines.pop()  # content after the last newline is a partial write: drop it
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                records.append(EngagementRecord.from_json(line.decode()))
            except (ValueError, KeyError, UnicodeDecodeError) as exc:
                raise DomainError(f"{path}: corrupt engagement record on line {i + 1}") from exc
        for a, b in zip(records, records[1:]):
            if b.timestamp < a.timestamp:
                raise DomainError(f"{path}: records out of time order")
        return records

    @property
    def records(self) -> list[EngagementRecord]:
        with self._lock:
            return list(self._records)

    def since(self, timestamp: int) -> list[EngagementRecord]:
        with self._lock:
            return [r for r in self._records if r.timestamp >= timestamp]

    def append(self, record: EngagementRecord) -> None:
        with self._lock:
            if self._records and record.timestamp < self._records[-1].timestamp:
                raise DomainError(
                    f"out-of-order engagement: {record.timestamp} < {self._records[-1].timestamp}"
                )
            with open(self.path, "a") as fh:
                fh.write(record.to_json() + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._records.append(record)
