"""Canonical document model and newline-delimited JSON record streaming.

Every other module consumes or emits :class:`Document` streams.  Records on
the wire are UTF-8 JSON objects, one per line, with a required ``text`` key
and recognized keys ``id``, ``source_class``, ``dup_count``, ``curated``,
``timestamp``.  Unknown keys survive a read/write round-trip via
``Document.extra``.

Malformed lines are skipped and reported instead of aborting the stream:
curation runs over very large corpora must be fault-tolerant.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Any, Callable, Iterable, Iterator

logger = logging.getLogger(__name__)

__all__ = [
    "Document",
    "RecordError",
    "RecordWriteError",
    "SourceClass",
    "TokenCounter",
    "document_to_json",
    "read_records",
    "word_count",
    "write_records",
]

#: A pluggable pure function mapping text to a length in counting units.
TokenCounter = Callable[[str], int]

_KNOWN_KEYS = ("id", "text", "source_class", "dup_count", "curated", "timestamp")


class SourceClass(str, Enum):
    """Origin class of a document, used by dedup and mix weighting."""

    COMMON_CRAWL = "CommonCrawl"
    CURATED = "Curated"
    CODE = "Code"
    SYNTHETIC = "Synthetic"


@dataclass
class Document:
    """One corpus record.

    ``dup_count`` is the size of the near-duplicate cluster this document
    represents (1 = unique).  ``timestamp`` is an ISO-8601 date string;
    ISO dates compare correctly as strings so no parsing is done here.
    ``extra`` preserves unrecognized wire keys verbatim (any JSON value).
    """

    id: str
    text: str
    source_class: SourceClass = SourceClass.COMMON_CRAWL
    dup_count: int = 1
    curated: bool = False
    timestamp: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be non-empty")
        if self.dup_count < 1:
            raise ValueError(f"dup_count must be >= 1, got {self.dup_count}")


@dataclass
class RecordError:
    """A malformed input line, reported without stopping the stream."""

    line_number: int
    message: str
    raw: str


class RecordWriteError(OSError):
    """Raised when emission fails partway; ``written`` records made it out."""

    def __init__(self, written: int, cause: BaseException):
        super().__init__(f"record write failed after {written} records: {cause}")
        self.written = written


def word_count(text: str) -> int:
    """Number of maximal non-whitespace runs (whitespace-delimited words)."""
    return len(text.split())


def _parse_line(line: str, line_number: int) -> Document:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    if "text" not in obj:
        raise ValueError('record is missing required key "text"')
    text = obj["text"]
    if not isinstance(text, str):
        raise ValueError('"text" must be a string')

    source = obj.get("source_class", SourceClass.COMMON_CRAWL.value)
    try:
        source_class = SourceClass(source)
    except ValueError:
        raise ValueError(f"unknown source_class {source!r}") from None

    dup_count = obj.get("dup_count", 1)
    if not isinstance(dup_count, int) or isinstance(dup_count, bool):
        raise ValueError('"dup_count" must be an integer')

    # id is recognized but optional on the wire; synthesize a per-shard
    # unique one from the line number when absent.
    doc_id = obj.get("id", f"line-{line_number}")
    if not isinstance(doc_id, str):
        doc_id = str(doc_id)

    timestamp = obj.get("timestamp")
    if timestamp is not None and not isinstance(timestamp, str):
        raise ValueError('"timestamp" must be a string')

    extra = {k: v for k, v in obj.items() if k not in _KNOWN_KEYS}
    return Document(
        id=doc_id,
        text=text,
        source_class=source_class,
        dup_count=dup_count,
        curated=bool(obj.get("curated", False)),
        timestamp=timestamp,
        extra=extra,
    )


def read_records(
    stream: IO[str] | Iterable[str],
    on_error: Callable[[RecordError], None] | None = None,
) -> Iterator[Document]:
    """Yield :class:`Document` per input line, in order.

    Missing optional fields default (``dup_count=1``, ``curated=False``).
    Malformed lines (bad JSON, missing ``text``, bad field types) are
    passed to ``on_error`` as :class:`RecordError` with their 1-based line
    number; parsing then continues with the next line.  The default
    handler logs a warning.

    Blank lines are ignored.
    """
    for line_number, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            yield _parse_line(line, line_number)
        except (ValueError, json.JSONDecodeError) as exc:
            err = RecordError(line_number, str(exc), line.rstrip("\n"))
            if on_error is not None:
                on_error(err)
            else:
                logger.warning("skipping line %d: %s", err.line_number, err.message)


def document_to_json(doc: Document) -> dict[str, Any]:
    """Wire form of a document; inverse of the read-side parsing."""
    obj: dict[str, Any] = {
        "id": doc.id,
        "text": doc.text,
        "source_class": doc.source_class.value,
        "dup_count": doc.dup_count,
        "curated": doc.curated,
    }
    if doc.timestamp is not None:
        obj["timestamp"] = doc.timestamp
    obj.update(doc.extra)
    return obj


def write_records(documents: Iterable[Document], stream: IO[str]) -> int:
    """Write one JSON line per document; returns the record count.

    ``read_records(write_records(X))`` reproduces X field for field:
    embedded newlines and other control characters are JSON-escaped.  An
    I/O failure aborts with :class:`RecordWriteError` carrying the number
    of records fully written so far.
    """
    written = 0
    for doc in documents:
        try:
            stream.write(json.dumps(document_to_json(doc), ensure_ascii=False))
            stream.write("\n")
        except OSError as exc:
            raise RecordWriteError(written, exc) from exc
        written += 1
    return written
