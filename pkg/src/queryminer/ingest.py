"""Parse analytics-export rows, pull user queries out of URLs, rebuild visits.

The export is a delimited text file with a header row; a column schema maps
the five logical fields (visitor id, visit id, timestamp, URL, custom
variables) onto column names.  Queries live in URL parameters and need
percent-decoding and tokenization before anything downstream can use them.
"""

from __future__ import annotations

import csv
import re
import statistics
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BadTimestamp, MalformedRow, UnparseableUrl
from urllib.parse import parse_qs, urlsplit

# Tokens are maximal runs of unicode letters and digits.  Hyphens,
# apostrophes, underscores and all other punctuation separate tokens;
# diacritics are kept because they carry signal (accented and unaccented
# alias spellings are indexed separately).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_DIGITS_RE = re.compile(r"^[0-9]+$")

DEFAULT_QUERY_PARAMS = ("all_q", "any_q", "exact_q", "none_q")

DEFAULT_TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M:%S"


class SourceField(str, Enum):
    """Which URL parameter a query was read from, by position in the
    configured parameter list."""

    ALL = "ALL"
    ANY = "ANY"
    EXACT = "EXACT"
    NONE = "NONE"


_SOURCE_BY_POSITION = (SourceField.ALL, SourceField.ANY, SourceField.EXACT,
                       SourceField.NONE)


@dataclass(frozen=True)
class ColumnSchema:
    """Maps logical record fields onto export column names."""

    visitor_id: str = "visitor_id"
    visit_id: str = "visit_id"
    timestamp: str = "timestamp"
    url: str = "url"
    custom_vars: str = "custom_vars"
    timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT
    custom_vars_delimiter: str = ";"


@dataclass(frozen=True)
class LogRecord:
    visitor_id: str
    visit_id: str
    timestamp: datetime
    url: str
    custom_vars: tuple[str, ...] = ()


@dataclass(frozen=True)
class Query:
    raw_text: str
    tokens: tuple[str, ...]
    visit_id: str
    timestamp: datetime
    source_field: SourceField


@dataclass(frozen=True)
class Visit:
    visit_id: str
    visitor_id: str
    queries: tuple[Query, ...]


@dataclass
class DiscardCounts:
    """Queries dropped during extraction, by reason."""

    digits_only: int = 0
    empty: int = 0
    url_without_query: int = 0

    def merge(self, other: "DiscardCounts") -> None:
        self.digits_only += other.digits_only
        self.empty += other.empty
        self.url_without_query += other.url_without_query


def normalize_text(raw: str) -> list[str]:
    """Case-fold and split into tokens.

    Deterministic; never yields an empty token.  Joining the result with
    single spaces and re-normalizing is a fixed point.
    """
    return _TOKEN_RE.findall(raw.lower())


def parse_record(row: Mapping[str, str], schema: ColumnSchema) -> LogRecord:
    """Turn one export row (as read by a DictReader) into a LogRecord.

    Raises MalformedRow when a schema column is absent and BadTimestamp when
    the timestamp does not parse.
    """
    values = {}
    for logical in ("visitor_id", "visit_id", "timestamp", "url"):
        column = getattr(schema, logical)
        if column not in row or row[column] is None:
            raise MalformedRow(f"missing column {column!r}")
        values[logical] = row[column]
    if not values["url"]:
        raise MalformedRow(f"empty column {schema.url!r}")
    try:
        ts = datetime.strptime(values["timestamp"], schema.timestamp_format)
    except ValueError as exc:
        raise BadTimestamp(f"cannot parse timestamp {values['timestamp']!r}") from exc
    ts = ts.replace(tzinfo=timezone.utc)
    raw_vars = row.get(schema.custom_vars) or ""
    custom_vars = tuple(
        part.strip()
        for part in raw_vars.split(schema.custom_vars_delimiter)
        if part.strip()
    )
    return LogRecord(
        visitor_id=values["visitor_id"],
        visit_id=values["visit_id"],
        timestamp=ts,
        url=values["url"],
        custom_vars=custom_vars,
    )


def read_export(path: str, schema: ColumnSchema,
                delimiter: str = "\t") -> Iterator[Mapping[str, str]]:
    """Yield raw rows of a delimited export file with a header row."""
    with open(path, encoding="utf-8", newline="") as handle:
        yield from csv.DictReader(handle, delimiter=delimiter)


def extract_queries(
    record: LogRecord,
    params: Sequence[str] = DEFAULT_QUERY_PARAMS,
) -> tuple[list[Query], DiscardCounts]:
    """Extract one Query per non-empty listed URL parameter.

    Parameters are percent-decoded with plus-as-space, then tokenized.
    Digits-only queries are dropped and counted; so are values that
    normalize to nothing.  Raises UnparseableUrl when the URL carries no
    query string at all.
    """
    if len(params) > len(_SOURCE_BY_POSITION):
        raise ValueError("at most four query parameters are supported")
    parts = urlsplit(record.url)
    if not parts.query:
        raise UnparseableUrl(f"no query string in {record.url!r}")
    decoded = parse_qs(parts.query, keep_blank_values=False,
                       encoding="utf-8", errors="replace")
    queries: list[Query] = []
    discards = DiscardCounts()
    for position, name in enumerate(params):
        for value in decoded.get(name, []):
            tokens = normalize_text(value)
            if not tokens:
                discards.empty += 1
                continue
            if all(_DIGITS_RE.match(tok) for tok in tokens):
                discards.digits_only += 1
                continue
            queries.append(Query(
                raw_text=value,
                tokens=tuple(tokens),
                visit_id=record.visit_id,
                timestamp=record.timestamp,
                source_field=_SOURCE_BY_POSITION[position],
            ))
    return queries, discards


def build_visits(
    records: Iterable[LogRecord],
    params: Sequence[str] = DEFAULT_QUERY_PARAMS,
) -> tuple[list[Visit], DiscardCounts]:
    """Group extracted queries into visits, one per distinct visit id.

    Records whose URL has no query string are tolerated and counted.  The
    result is independent of input ordering: visits are sorted by visit id
    and queries within a visit by (timestamp, raw text, source).
    """
    discards = DiscardCounts()
    by_visit: dict[str, list[Query]] = {}
    visitors: dict[str, set[str]] = {}
    for record in records:
        try:
            queries, row_discards = extract_queries(record, params)
        except UnparseableUrl:
            discards.url_without_query += 1
            continue
        discards.merge(row_discards)
        if not queries:
            continue
        by_visit.setdefault(record.visit_id, []).extend(queries)
        visitors.setdefault(record.visit_id, set()).add(record.visitor_id)
    visits = []
    for visit_id in sorted(by_visit):
        ordered = sorted(
            by_visit[visit_id],
            key=lambda q: (q.timestamp, q.raw_text, q.source_field.value),
        )
        visits.append(Visit(
            visit_id=visit_id,
            visitor_id=min(visitors[visit_id]),
            queries=tuple(ordered),
        ))
    return visits, discards


@dataclass(frozen=True)
class Summary:
    """Five-number summary of a count distribution."""

    mean: float
    stddev: float
    median: float
    min: float
    max: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "Summary":
        if not values:
            return cls(0.0, 0.0, 0.0, 0.0, 0.0)
        return cls(
            mean=statistics.fmean(values),
            stddev=statistics.pstdev(values),
            median=float(statistics.median(values)),
            min=float(min(values)),
            max=float(max(values)),
        )

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stddev": self.stddev,
            "median": self.median,
            "min": self.min,
            "max": self.max,
        }


@dataclass(frozen=True)
class CorpusStats:
    total_queries: int
    distinct_queries: int
    visit_count: int
    distinct_per_visit: Summary
    total_per_visit: Summary
    tokens_per_query: Summary
    queries_with_at_most_k_tokens: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "total_queries": self.total_queries,
            "distinct_queries": self.distinct_queries,
            "visit_count": self.visit_count,
            "distinct_per_visit": self.distinct_per_visit.to_dict(),
            "total_per_visit": self.total_per_visit.to_dict(),
            "tokens_per_query": self.tokens_per_query.to_dict(),
            "queries_with_at_most_k_tokens": {
                str(k): v
                for k, v in sorted(self.queries_with_at_most_k_tokens.items())
            },
        }


def corpus_stats(visits: Sequence[Visit]) -> CorpusStats:
    """Corpus-level statistics over reconstructed visits.

    Distinct queries compare raw text case-insensitively.  Per-visit query
    counts are summarized both as distinct-per-visit and total-per-visit
    because the two disagree whenever a visitor repeats a query; both are
    reported under their own name.  Standard deviations are population
    standard deviations.
    """
    all_queries = [q for visit in visits for q in visit.queries]
    distinct_global = {q.raw_text.lower() for q in all_queries}
    distinct_counts = [
        len({q.raw_text.lower() for q in visit.queries}) for visit in visits
    ]
    total_counts = [len(visit.queries) for visit in visits]
    token_counts = [len(q.tokens) for q in all_queries]
    at_most: dict[int, int] = {}
    if token_counts:
        for k in range(1, max(token_counts) + 1):
            at_most[k] = sum(1 for n in token_counts if n <= k)
    return CorpusStats(
        total_queries=len(all_queries),
        distinct_queries=len(distinct_global),
        visit_count=len(visits),
        distinct_per_visit=Summary.of(distinct_counts),
        total_per_visit=Summary.of(total_counts),
        tokens_per_query=Summary.of(token_counts),
        queries_with_at_most_k_tokens=at_most,
    )
