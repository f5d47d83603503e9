"""Parsers turning browsing-history exports and local documents into profile inputs.

The canonical history format is JSON-lines, one visit per line:

    {"url": str, "title": str, "visit_time": int, "duration": int,
     "transition": "typed"|"clicked"}

All operations here are pure or read-only on the filesystem.
"""

from __future__ import annotations

import fnmatch
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, IO, Iterable
from urllib.parse import parse_qs, urlparse

from .model import SearchQueryRecord, Transition, VisitRecord
from .stopwords import STOPWORDS

_WORD_RE = re.compile(r"\w+", re.UNICODE)


@dataclass
class RejectedRow:
    line_number: int
    reason: str
    raw: str = ""


@dataclass(frozen=True)
class TokenizerConfig:
    min_len: int = 3
    stopwords: frozenset[str] = STOPWORDS
    stemmer: Callable[[str], str] | None = None  # hook, off by default


# (host suffix, query parameter) pairs identifying search-engine result pages
DEFAULT_SEARCH_ENGINES: tuple[tuple[str, str], ...] = (
    ("google.", "q"),
    ("bing.", "q"),
    ("search.yahoo.", "p"),
)


def _validate_row(row: dict) -> tuple[VisitRecord | None, str | None]:
    url = row.get("url")
    if not url or not isinstance(url, str):
        return None, "missing url"
    parsed = urlparse(url)
    if not parsed.scheme or not parsed.netloc:
        return None, "invalid url"
    visit_time = row.get("visit_time")
    if not isinstance(visit_time, int) or visit_time <= 0:
        return None, "missing or invalid visit_time"
    duration = row.get("duration")
    if not isinstance(duration, (int, float)) or isinstance(duration, bool) or duration < 0:
        return None, "missing or invalid duration"
    transition = Transition.TYPED if row.get("transition") == "typed" else Transition.CLICKED
    title = row.get("title", "")
    if not isinstance(title, str):
        return None, "invalid title"
    return (
        VisitRecord(
            url=url,
            title=title,
            visit_time=visit_time,
            duration=duration,
            transition=transition,
        ),
        None,
    )


def parse_history(stream: IO[str] | Iterable[str]) -> tuple[list[VisitRecord], list[RejectedRow]]:
    """Parse a JSON-lines history export.

    Invalid rows are reported with their line number and reason, never
    silently dropped; |records| + |rejects| always equals the row count.
    """
    records: list[VisitRecord] = []
    rejects: list[RejectedRow] = []
    for line_number, line in enumerate(stream, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            row = json.loads(stripped)
        except json.JSONDecodeError as exc:
            rejects.append(RejectedRow(line_number, f"invalid JSON: {exc.msg}", stripped))
            continue
        if not isinstance(row, dict):
            rejects.append(RejectedRow(line_number, "row is not an object", stripped))
            continue
        record, reason = _validate_row(row)
        if record is None:
            rejects.append(RejectedRow(line_number, reason or "invalid row", stripped))
        else:
            records.append(record)
    return records, rejects


def _match_search_url(url: str, engines: tuple[tuple[str, str], ...]) -> str | None:
    parsed = urlparse(url)
    host = parsed.netloc.lower()
    for host_part, param in engines:
        if host_part in host:
            values = parse_qs(parsed.query).get(param)
            if values and values[0].strip():
                return values[0]
    return None


def extract_search_queries(
    visits: list[VisitRecord],
    engines: tuple[tuple[str, str], ...] = DEFAULT_SEARCH_ENGINES,
) -> list[SearchQueryRecord]:
    """Pull search queries out of visit URLs, aggregating identical queries.

    Output order is deterministic: by normalized query text.
    """
    buckets: dict[str, dict] = {}
    for visit in visits:
        raw = _match_search_url(visit.url, engines)
        if raw is None:
            continue
        terms = raw.lower().split()
        if not terms:
            continue
        normalized = " ".join(terms)
        bucket = buckets.get(normalized)
        if bucket is None:
            buckets[normalized] = {
                "terms": terms,
                "issued_at": visit.visit_time,
                "frequency": 1,
            }
        else:
            bucket["frequency"] += 1
            bucket["issued_at"] = max(bucket["issued_at"], visit.visit_time)
    return [
        SearchQueryRecord(
            raw_query=normalized,
            terms=b["terms"],
            issued_at=b["issued_at"],
            frequency=b["frequency"],
        )
        for normalized, b in sorted(buckets.items())
    ]


def extract_keywords(text: str, config: TokenizerConfig = TokenizerConfig()) -> dict[str, int]:
    """Lowercase word tokenization with length and stopword filtering."""
    counts: Counter[str] = Counter()
    for token in _WORD_RE.findall(text.lower()):
        if len(token) < config.min_len or token in config.stopwords:
            continue
        if config.stemmer is not None:
            token = config.stemmer(token)
        counts[token] += 1
    return dict(counts)


class DocumentKind:
    TEXT = "text"
    METADATA = "metadata"


@dataclass
class DocumentRecord:
    path: str
    kind: str
    extracted_text: str
    scanned_at: int = 0


@dataclass
class ScanWarning:
    path: str
    reason: str


class _HtmlTextExtractor(HTMLParser):
    """Strips tags; keeps title and meta description, repeated x3."""

    _SKIP = {"script", "style"}

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.body_parts: list[str] = []
        self.title_parts: list[str] = []
        self.meta_description = ""
        self._stack: list[str] = []

    def handle_starttag(self, tag, attrs):
        self._stack.append(tag)
        if tag == "meta":
            d = dict(attrs)
            if d.get("name", "").lower() == "description" and d.get("content"):
                self.meta_description = d["content"]

    def handle_endtag(self, tag):
        while self._stack and self._stack.pop() != tag:
            pass

    def handle_data(self, data):
        if any(t in self._SKIP for t in self._stack):
            return
        if "title" in self._stack:
            self.title_parts.append(data)
        else:
            self.body_parts.append(data)


def strip_html(html: str) -> str:
    parser = _HtmlTextExtractor()
    parser.feed(html)
    emphasized = " ".join(parser.title_parts) + " " + parser.meta_description
    # title/description carry the page's topic; repeat so they outweigh body noise
    return " ".join([emphasized.strip()] * 3 + [" ".join(parser.body_parts)]).strip()


_TEXT_SUFFIXES = {".txt", ".md", ".rst", ".csv", ".log"}
_HTML_SUFFIXES = {".html", ".htm", ".xhtml"}


def filename_tokens(path: Path) -> list[str]:
    return [t for t in re.split(r"[^0-9A-Za-z]+", path.stem.lower()) if t]


def _selected(rel: str, include: list[str], exclude: list[str]) -> bool:
    name = Path(rel).name
    if include and not any(
        fnmatch.fnmatch(rel, g) or fnmatch.fnmatch(name, g) for g in include
    ):
        return False
    return not any(fnmatch.fnmatch(rel, g) or fnmatch.fnmatch(name, g) for g in exclude)


def scan_documents(
    paths: list[str | Path],
    include: list[str] | None = None,
    exclude: list[str] | None = None,
    now: int = 0,
) -> tuple[list[DocumentRecord], list[ScanWarning]]:
    """Scan files and directories into document records.

    Text and HTML files yield extracted text; anything else is metadata-only
    (filename tokens).  Unreadable files become warnings, the scan continues.
    """
    include = include or []
    exclude = exclude or []
    records: list[DocumentRecord] = []
    warnings: list[ScanWarning] = []
    files: list[Path] = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(q for q in p.rglob("*") if q.is_file()))
        else:
            files.append(p)
    for f in files:
        if not _selected(str(f), include, exclude):
            continue
        suffix = f.suffix.lower()
        try:
            if suffix in _TEXT_SUFFIXES:
                text = f.read_text(encoding="utf-8", errors="replace")
                records.append(DocumentRecord(str(f), DocumentKind.TEXT, text, now))
            elif suffix in _HTML_SUFFIXES:
                text = strip_html(f.read_text(encoding="utf-8", errors="replace"))
                records.append(DocumentRecord(str(f), DocumentKind.TEXT, text, now))
            else:
                tokens = " ".join(filename_tokens(f))
                records.append(DocumentRecord(str(f), DocumentKind.METADATA, tokens, now))
        except OSError as exc:
            warnings.append(ScanWarning(str(f), str(exc)))
    return records, warnings
