"""Percentile machinery plus search-pattern, URL, and keyword grading.

Percentiles use the average-rank convention: items are ranked ascending by
value (1..n), tied values share the mean of their ranks, and the percentile
is ``100 * mean_rank / n``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Hashable, Sequence

from .model import KeywordEntry, SearchQueryRecord, Transition, UrlGrade, VisitRecord

DEFAULT_KEYWORD_EPSILON = 70.0


@dataclass(frozen=True)
class PercentileRow:
    item_id: Hashable
    value: float
    percentile: float


@dataclass(frozen=True)
class PercentileTable:
    rows: tuple[PercentileRow, ...]

    def get(self, item_id: Hashable) -> float:
        return self._mapping[item_id]

    @property
    def _mapping(self) -> dict[Hashable, float]:
        return {r.item_id: r.percentile for r in self.rows}

    def as_dict(self) -> dict[Hashable, float]:
        return self._mapping


def percentile_rank(values: Sequence[tuple[Hashable, float]]) -> PercentileTable:
    """Average-rank percentile over a population of (id, value) pairs."""
    if not values:
        raise ValueError("empty population")
    n = len(values)
    ordered = sorted(range(n), key=lambda i: values[i][1])
    percentiles = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[ordered[j + 1]][1] == values[ordered[i]][1]:
            j += 1
        mean_rank = (i + 1 + j + 1) / 2  # ranks are 1-based
        pct = 100.0 * mean_rank / n
        for k in range(i, j + 1):
            percentiles[ordered[k]] = pct
        i = j + 1
    rows = tuple(
        PercentileRow(values[i][0], values[i][1], percentiles[i]) for i in range(n)
    )
    return PercentileTable(rows)


def extract_search_patterns(queries: list[SearchQueryRecord]) -> list[SearchQueryRecord]:
    """Grade aggregated queries by frequency percentile."""
    if not queries:
        return []
    table = percentile_rank([(i, q.frequency) for i, q in enumerate(queries)])
    return [
        replace(q, percentile_grade=table.get(i)) for i, q in enumerate(queries)
    ]


def grade_urls(visits: list[VisitRecord]) -> dict[str, UrlGrade]:
    """Grade every URL in the current observation window.

    Per URL: visit-count percentile, summed-duration percentile, a typed bit
    (1 if any visit was typed), and a freshness value from the percentile of
    the most recent last-modified time.  Percentile components are scaled to
    [0, 1] so they are commensurate with the typed bit.
    """
    if not visits:
        return {}
    counts: dict[str, int] = {}
    durations: dict[str, float] = {}
    typed: dict[str, int] = {}
    last_modified: dict[str, int] = {}
    for v in visits:
        counts[v.url] = counts.get(v.url, 0) + 1
        durations[v.url] = durations.get(v.url, 0.0) + v.duration
        typed[v.url] = max(typed.get(v.url, 0), int(v.transition is Transition.TYPED))
        last_modified[v.url] = max(last_modified.get(v.url, 0), v.last_modified_time)
    urls = sorted(counts)
    freq_pct = percentile_rank([(u, counts[u]) for u in urls]).as_dict()
    dur_pct = percentile_rank([(u, durations[u]) for u in urls]).as_dict()
    fresh_pct = percentile_rank([(u, last_modified[u]) for u in urls]).as_dict()
    return {
        u: UrlGrade(
            url=u,
            frequency_pct=freq_pct[u] / 100.0,
            duration_pct=dur_pct[u] / 100.0,
            typed=typed[u],
            freshness_value=fresh_pct[u] / 100.0,
        )
        for u in urls
    }


def grade_keywords(
    page_keywords: dict[str, int],
    keyword_db: dict[str, KeywordEntry],
    epsilon: float = DEFAULT_KEYWORD_EPSILON,
) -> dict[str, KeywordEntry]:
    """Merge a page's high-percentile keywords into the keyword database.

    Page terms are percentile-ranked by page-local frequency; terms above
    ``epsilon`` enter the database (existing terms gain +1 frequency, new
    terms start at 1).  Database percentile grades are recomputed over the
    whole database afterwards.
    """
    db = {term: replace(entry) for term, entry in keyword_db.items()}
    if page_keywords:
        table = percentile_rank(sorted(page_keywords.items()))
        for term, pct in table.as_dict().items():
            if pct <= epsilon:
                continue
            existing = db.get(term)
            if existing is None:
                db[term] = KeywordEntry(term, 1)
            else:
                existing.frequency += 1
    if db:
        table = percentile_rank([(t, e.frequency) for t, e in sorted(db.items())])
        for term, pct in table.as_dict().items():
            db[term].percentile_grade = pct
    return db
