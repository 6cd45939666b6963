"""Event-stream ingestion, tokenization, day partitioning and coverage.

Input is newline-delimited records, one flat JSON object per line, with a
schema config mapping canonical field names to the source's field names.
Timestamps are accepted as ISO-8601 strings or integer epoch seconds and
are held internally as UTC epoch seconds.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

log = logging.getLogger(__name__)

MAX_TEXT_CHARS = 10_000

CANONICAL_FIELDS = ("id", "timestamp", "author_id", "text", "retweet_source_id", "lat", "lon")

_HASHTAG_RE = re.compile(r"#(\w+)", re.UNICODE)
_TOKEN_RE = re.compile(r"[\w#@]+", re.UNICODE)


class IngestError(ValueError):
    """A record stream cannot be ingested as a whole (e.g. duplicate ids)."""


@dataclass(frozen=True)
class TweetRecord:
    """One event: who posted what, when, optionally retweeting whom and from where."""

    id: str
    timestamp: int  # UTC epoch seconds
    author_id: str
    text: str
    retweet_source_id: str | None = None
    geo: tuple[float, float] | None = None  # (lat, lon) degrees

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("record id must be nonempty")
        if not self.author_id:
            raise ValueError(f"record {self.id}: author_id must be nonempty")
        if len(self.text) > MAX_TEXT_CHARS:
            raise ValueError(f"record {self.id}: text exceeds {MAX_TEXT_CHARS} chars")
        if self.retweet_source_id is not None and not self.retweet_source_id:
            raise ValueError(f"record {self.id}: retweet_source_id present but empty")
        if self.geo is not None:
            lat, lon = self.geo
            if not (-90.0 <= lat <= 90.0):
                raise ValueError(f"record {self.id}: latitude {lat} out of [-90, 90]")
            if not (-180.0 <= lon <= 180.0):
                raise ValueError(f"record {self.id}: longitude {lon} out of [-180, 180]")


@dataclass(frozen=True)
class Corpus:
    """Immutable, timestamp-sorted collection of records with unique ids."""

    label: str
    records: tuple[TweetRecord, ...]
    tz_offset_hours: float = 0.0  # default day-boundary timezone

    @classmethod
    def from_records(
        cls, records: Iterable[TweetRecord], label: str = "corpus", tz_offset_hours: float = 0.0
    ) -> "Corpus":
        recs = sorted(records, key=lambda r: r.timestamp)
        seen: set[str] = set()
        for r in recs:
            if r.id in seen:
                raise IngestError(f"duplicate record id: {r.id!r}")
            seen.add(r.id)
        return cls(label=label, records=tuple(recs), tz_offset_hours=tz_offset_hours)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TweetRecord]:
        return iter(self.records)

    def __getitem__(self, i: int) -> TweetRecord:
        return self.records[i]

    def relabel(self, label: str) -> "Corpus":
        return Corpus(label=label, records=self.records, tz_offset_hours=self.tz_offset_hours)


@dataclass(frozen=True)
class SchemaConfig:
    """Maps canonical field names to the names used in the source records."""

    id: str = "id"
    timestamp: str = "timestamp"
    author_id: str = "author_id"
    text: str = "text"
    retweet_source_id: str = "retweet_source_id"
    lat: str = "lat"
    lon: str = "lon"

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "SchemaConfig":
        unknown = set(mapping) - set(CANONICAL_FIELDS)
        if unknown:
            raise ValueError(f"unknown schema fields: {sorted(unknown)}")
        return cls(**dict(mapping))

    @classmethod
    def from_file(cls, path: str | Path) -> "SchemaConfig":
        with open(path, encoding="utf-8") as f:
            return cls.from_mapping(json.load(f))


@dataclass(frozen=True)
class RecordError:
    """One malformed input record: where it was and what was wrong."""

    line_no: int
    message: str


@dataclass(frozen=True)
class IngestResult:
    corpus: Corpus
    errors: tuple[RecordError, ...]

    @property
    def malformed_count(self) -> int:
        return len(self.errors)


def parse_timestamp(value) -> int:
    """Parse an ISO-8601 string or epoch-seconds number to UTC epoch seconds."""
    if isinstance(value, bool):
        raise ValueError(f"not a timestamp: {value!r}")
    if isinstance(value, (int, float)):
        return int(value)
    if isinstance(value, str):
        s = value.strip()
        try:
            return int(s)
        except ValueError:
            pass
        iso = s[:-1] + "+00:00" if s.endswith(("Z", "z")) else s
        try:
            dt = datetime.fromisoformat(iso)
        except ValueError:
            raise ValueError(f"unparseable timestamp: {value!r}") from None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())
    raise ValueError(f"unparseable timestamp: {value!r}")


def _record_from_object(obj: Mapping, schema: SchemaConfig) -> TweetRecord:
    def get(canonical: str):
        source = getattr(schema, canonical)
        value = obj.get(source)
        return None if value in (None, "") else value

    for required in ("id", "timestamp", "author_id", "text"):
        if get(required) is None:
            raise ValueError(f"missing field {getattr(schema, required)!r}")

    lat, lon = get("lat"), get("lon")
    if (lat is None) != (lon is None):
        raise ValueError("geo point must carry both lat and lon")
    geo = (float(lat), float(lon)) if lat is not None else None

    rts = get("retweet_source_id")
    return TweetRecord(
        id=str(get("id")),
        timestamp=parse_timestamp(get("timestamp")),
        author_id=str(get("author_id")),
        text=str(get("text")),
        retweet_source_id=str(rts) if rts is not None else None,
        geo=geo,
    )


def ingest(
    lines: Iterable[str],
    schema: SchemaConfig | None = None,
    label: str = "corpus",
    tz_offset_hours: float = 0.0,
) -> IngestResult:
    """Parse newline-delimited records into a validated, sorted Corpus.

    Malformed records are collected (with their line numbers) and reported,
    never silently dropped. A duplicate id aborts the whole ingest.
    """
    schema = schema or SchemaConfig()
    records: list[TweetRecord] = []
    errors: list[RecordError] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("line is not an object")
            record = _record_from_object(obj, schema)
        except (ValueError, TypeError) as exc:
            errors.append(RecordError(line_no, str(exc)))
            continue
        if record.id in seen_ids:
            raise IngestError(f"duplicate record id: {record.id!r} (line {line_no})")
        seen_ids.add(record.id)
        records.append(record)
    if errors:
        log.warning("ingest(%s): %d malformed record(s) reported", label, len(errors))
    corpus = Corpus.from_records(records, label=label, tz_offset_hours=tz_offset_hours)
    return IngestResult(corpus=corpus, errors=tuple(errors))


def ingest_file(
    path: str | Path,
    schema: SchemaConfig | None = None,
    label: str | None = None,
    tz_offset_hours: float = 0.0,
) -> IngestResult:
    with open(path, encoding="utf-8") as f:
        return ingest(f, schema=schema, label=label or Path(path).stem, tz_offset_hours=tz_offset_hours)


def record_to_object(record: TweetRecord) -> dict:
    obj = {
        "id": record.id,
        "timestamp": record.timestamp,
        "author_id": record.author_id,
        "text": record.text,
    }
    if record.retweet_source_id is not None:
        obj["retweet_source_id"] = record.retweet_source_id
    if record.geo is not None:
        obj["lat"], obj["lon"] = record.geo
    return obj


def write_jsonl(corpus: Corpus, path: str | Path) -> None:
    """Serialize in the canonical ingest line format (one JSON object per line)."""
    with open(path, "w", encoding="utf-8") as f:
        for record in corpus:
            f.write(json.dumps(record_to_object(record), sort_keys=True, ensure_ascii=False))
            f.write("\n")


def extract_hashtags(text: str) -> list[str]:
    """All '#'-prefixed runs of word characters, case-folded, in order.

    Word characters are Unicode letters, digits and underscore, so
    non-Latin hashtags are extracted too. Duplicates are preserved.
    """
    return ["#" + m.casefold() for m in _HASHTAG_RE.findall(text)]


def tokenize(text: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    """Case-folded tokens split on anything outside [word chars, '#', '@'].

    Stopwords and tokens shorter than two characters are removed.
    """
    folded = text.casefold()
    return [t for t in _TOKEN_RE.findall(folded) if len(t) >= 2 and t not in stopwords]


def day_key(timestamp: int, tz_offset_hours: float = 0.0) -> str:
    """Local date (ISO string) of a UTC instant under a fixed hour offset."""
    tz = timezone(timedelta(hours=tz_offset_hours))
    return datetime.fromtimestamp(timestamp, tz=tz).date().isoformat()


def partition_by_day(corpus: Corpus, tz_offset_hours: float | None = None) -> dict[str, Corpus]:
    """Split a corpus into one bucket per local calendar day."""
    offset = corpus.tz_offset_hours if tz_offset_hours is None else tz_offset_hours
    buckets: dict[str, list[TweetRecord]] = {}
    for record in corpus:
        buckets.setdefault(day_key(record.timestamp, offset), []).append(record)
    return {
        day: Corpus(label=corpus.label, records=tuple(records), tz_offset_hours=offset)
        for day, records in sorted(buckets.items())
    }


@dataclass(frozen=True)
class DayCoverage:
    day: str
    reference_count: int
    sample_count: int
    ratio: float


@dataclass(frozen=True)
class CoverageReport:
    """Per-day sample/reference ratios with a five-number summary."""

    days: tuple[DayCoverage, ...]
    overall_ratio: float
    summary: tuple[float, float, float, float, float]  # min, Q1, median, Q3, max
    skipped_days: tuple[str, ...] = field(default=())


def coverage_from_counts(
    day_counts: Mapping[str, tuple[int, int]],
) -> CoverageReport:
    """Build a coverage report from per-day (reference, sample) counts.

    Days with a zero reference count have no defined ratio; they are
    excluded from the quartile summary and reported as skipped.
    """
    days: list[DayCoverage] = []
    skipped: list[str] = []
    total_ref = 0
    total_sample = 0
    for day in sorted(day_counts):
        ref_count, sample_count = day_counts[day]
        total_ref += ref_count
        total_sample += sample_count
        if ref_count == 0:
            log.warning("coverage: day %s has zero reference records; omitted from summary", day)
            skipped.append(day)
            continue
        days.append(DayCoverage(day, ref_count, sample_count, sample_count / ref_count))
    if total_ref == 0:
        raise ValueError("coverage undefined: reference has no records")
    if not days:
        raise ValueError("coverage undefined: no day has reference records")
    ratios = np.array([d.ratio for d in days], dtype=float)
    q = np.quantile(ratios, [0.0, 0.25, 0.5, 0.75, 1.0], method="linear")
    return CoverageReport(
        days=tuple(days),
        overall_ratio=total_sample / total_ref,
        summary=tuple(float(x) for x in q),
        skipped_days=tuple(skipped),
    )


def coverage(sample: Corpus, reference: Corpus, tz_offset_hours: float = 0.0) -> CoverageReport:
    """How much of the reference volume the sample carries, per day and overall."""
    if len(reference) == 0:
        raise ValueError("coverage undefined: reference corpus is empty")
    if len(sample) == 0:
        raise ValueError("coverage undefined: sample corpus is empty")
    ref_days = partition_by_day(reference, tz_offset_hours)
    sample_days = partition_by_day(sample, tz_offset_hours)
    counts = {
        day: (len(ref_days.get(day, ())), len(sample_days.get(day, ())))
        for day in set(ref_days) | set(sample_days)
    }
    return coverage_from_counts(counts)
