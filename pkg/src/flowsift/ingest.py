"""Streaming reader for binetflow-style CSV flow exports.

One pass, bounded memory: rows are parsed, validated and yielded one at a
time. Malformed rows are never fatal — each is counted under exactly one
drop-reason tag so divergence from other tools' row-cleaning policies can
be audited.
"""

from __future__ import annotations

import csv
import gzip
import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterator

from .errors import ConfigError
from .flows import Label, RawFlow, parse_label

#: Logical field -> default binetflow column name.
BINETFLOW_COLUMNS = {
    "start_time": "StartTime",
    "duration": "Dur",
    "protocol": "Proto",
    "src_addr": "SrcAddr",
    "src_port": "Sport",
    "dst_addr": "DstAddr",
    "dst_port": "Dport",
    "tot_pkts": "TotPkts",
    "tot_bytes": "TotBytes",
    "src_bytes": "SrcBytes",
    "label": "Label",
}

_TIME_FORMATS = (
    "%Y/%m/%d %H:%M:%S.%f",
    "%Y/%m/%d %H:%M:%S",
    "%Y-%m-%d %H:%M:%S.%f",
    "%Y-%m-%d %H:%M:%S",
)

DROP_ROW_TOO_SHORT = "row_too_short"
DROP_BAD_NUMERIC = "bad_numeric"
DROP_NEGATIVE = "negative_value"
DROP_SRC_EXCEEDS_TOTAL = "src_bytes_exceed_total"
DROP_ZERO_PKTS_NONZERO_BYTES = "zero_pkts_nonzero_bytes"


@dataclass
class IngestStats:
    rows_read: int = 0
    rows_kept: int = 0
    rows_dropped: int = 0
    drop_reasons: Counter = field(default_factory=Counter)

    def summary(self) -> str:
        drops = " ".join(f"{k}={v}" for k, v in sorted(self.drop_reasons.items()))
        return (
            f"rows_read={self.rows_read} rows_kept={self.rows_kept} "
            f"rows_dropped={self.rows_dropped}" + (f" [{drops}]" if drops else "")
        )

    def as_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_kept": self.rows_kept,
            "rows_dropped": self.rows_dropped,
            "drop_reasons": dict(sorted(self.drop_reasons.items())),
        }


def parse_port(token: str) -> int | None:
    """Parse a port token: decimal, or hexadecimal when prefixed "0x".

    Empty, unparseable or out-of-range (not 0-65535) tokens yield None.
    Total function: never raises.
    """
    t = token.strip()
    if not t:
        return None
    try:
        value = int(t, 16) if t[:2] in ("0x", "0X") else int(t, 10)
    except ValueError:
        return None
    return value if 0 <= value <= 65535 else None


def parse_start_time(token: str) -> float:
    """Lenient timestamp parse to epoch seconds (UTC); 0.0 when unparseable.

    Duration is the authoritative time quantity downstream, so failures here
    never drop a row.
    """
    t = token.strip()
    if not t:
        return 0.0
    try:
        return float(t)
    except ValueError:
        pass
    for fmt in _TIME_FORMATS:
        try:
            return datetime.strptime(t, fmt).replace(tzinfo=timezone.utc).timestamp()
        except ValueError:
            continue
    return 0.0


def _parse_count(token: str) -> int | None:
    """Non-negative integer count; tolerant of float-typed text like "12.0"."""
    t = token.strip()
    try:
        return int(t)
    except ValueError:
        pass
    try:
        v = float(t)
    except ValueError:
        return None
    if not math.isfinite(v) or v != int(v):
        return None
    return int(v)


class FlowReader:
    """Iterable over (RawFlow, Label) pairs from one CSV source.

    ``source`` may be a path (gzip-transparent for ``*.gz``) or an open
    text/binary stream. ``stats`` is complete once iteration finishes.
    Column names default to the binetflow header; override per logical field
    via ``columns``. With ``require_label=False`` a missing label column is
    tolerated (rows come back Benign with an empty ``label_raw``) so that
    unlabeled traffic can be scored.
    """

    def __init__(
        self,
        source: str | os.PathLike | IO,
        columns: dict[str, str] | None = None,
        require_label: bool = True,
        with_rows: bool = False,
    ):
        self._source = source
        self._columns = dict(BINETFLOW_COLUMNS)
        if columns:
            unknown = set(columns) - set(BINETFLOW_COLUMNS)
            if unknown:
                raise ConfigError(f"unknown logical fields: {sorted(unknown)}")
            self._columns.update(columns)
        self._require_label = require_label
        self.with_rows = with_rows
        self.stats = IngestStats()
        self.header: list[str] = []

    def _open(self) -> IO:
        src = self._source
        if isinstance(src, (str, os.PathLike)):
            path = Path(src)
            if path.suffix == ".gz":
                return gzip.open(path, "rt", encoding="utf-8", newline="")
            return open(path, "r", encoding="utf-8", newline="")
        if isinstance(src, (io.RawIOBase, io.BufferedIOBase)) or (
            hasattr(src, "read") and isinstance(src.read(0), bytes)
        ):
            return io.TextIOWrapper(src, encoding="utf-8", newline="")
        return src

    def _resolve_indices(self, header: list[str]) -> dict[str, int]:
        pos = {name: i for i, name in enumerate(header)}
        indices: dict[str, int] = {}
        missing: list[str] = []
        for logical, column in self._columns.items():
            if column in pos:
                indices[logical] = pos[column]
            elif logical == "label" and not self._require_label:
                indices[logical] = -1
            else:
                missing.append(column)
        if missing:
            raise ConfigError(f"missing required column(s) in header: {missing}")
        return indices

    def __iter__(self) -> Iterator[tuple[RawFlow, Label]]:
        self.stats = IngestStats()
        stats = self.stats
        handle = self._open()
        own = isinstance(self._source, (str, os.PathLike))
        try:
            reader = csv.reader(handle)
            try:
                header = next(reader)
            except StopIteration:
                raise ConfigError("empty input: no header row") from None
            self.header = header
            idx = self._resolve_indices(header)
            need = max(i for i in idx.values())
            i_time, i_dur = idx["start_time"], idx["duration"]
            i_proto = idx["protocol"]
            i_saddr, i_sport = idx["src_addr"], idx["src_port"]
            i_daddr, i_dport = idx["dst_addr"], idx["dst_port"]
            i_pkts, i_bytes, i_sbytes = idx["tot_pkts"], idx["tot_bytes"], idx["src_bytes"]
            i_label = idx["label"]
            for row in reader:
                if not row:
                    continue
                stats.rows_read += 1
                if len(row) <= need:
                    stats.rows_dropped += 1
                    stats.drop_reasons[DROP_ROW_TOO_SHORT] += 1
                    continue
                try:
                    duration = float(row[i_dur])
                except ValueError:
                    duration = math.nan
                tot_pkts = _parse_count(row[i_pkts])
                tot_bytes = _parse_count(row[i_bytes])
                src_bytes = _parse_count(row[i_sbytes])
                if (
                    not math.isfinite(duration)
                    or tot_pkts is None
                    or tot_bytes is None
                    or src_bytes is None
                ):
                    stats.rows_dropped += 1
                    stats.drop_reasons[DROP_BAD_NUMERIC] += 1
                    continue
                if duration < 0:
                    stats.rows_dropped += 1
                    stats.drop_reasons[DROP_NEGATIVE] += 1
                    continue
                if src_bytes > tot_bytes:
                    stats.rows_dropped += 1
                    stats.drop_reasons[DROP_SRC_EXCEEDS_TOTAL] += 1
                    continue
                if tot_pkts == 0 and tot_bytes > 0:
                    stats.rows_dropped += 1
                    stats.drop_reasons[DROP_ZERO_PKTS_NONZERO_BYTES] += 1
                    continue
                label_raw = row[i_label].strip() if i_label >= 0 else ""
                flow = RawFlow(
                    start_time=parse_start_time(row[i_time]),
                    duration=duration,
                    protocol=row[i_proto].strip().lower(),
                    src_addr=row[i_saddr].strip(),
                    src_port=parse_port(row[i_sport]),
                    dst_addr=row[i_daddr].strip(),
                    dst_port=parse_port(row[i_dport]),
                    tot_pkts=tot_pkts,
                    tot_bytes=tot_bytes,
                    src_bytes=src_bytes,
                    label_raw=label_raw,
                )
                stats.rows_kept += 1
                if self.with_rows:
                    yield flow, parse_label(label_raw), row
                else:
                    yield flow, parse_label(label_raw)
        finally:
            if own:
                handle.close()


def read_flows(
    source: str | os.PathLike | IO,
    columns: dict[str, str] | None = None,
    require_label: bool = True,
    with_rows: bool = False,
) -> FlowReader:
    """Open a binetflow-style CSV source as a streaming FlowReader."""
    return FlowReader(source, columns=columns, require_label=require_label,
                      with_rows=with_rows)
