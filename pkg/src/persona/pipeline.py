"""Glue between the parsers and the profile: applying ingested activity.

Shared by the HTTP service and the CLI so both update the profile the same
way: visits land in the Present band, URL grades are recomputed over the
current window, search patterns are re-aggregated and regraded, and page
titles feed the keyword database and topic graph.
"""

from __future__ import annotations

from . import topics
from .grading import extract_search_patterns, grade_keywords, grade_urls
from .ingest import TokenizerConfig, extract_keywords, extract_search_queries
from .model import KeywordEntry, KeywordTree, Profile, SearchQueryRecord, VisitRecord, rotate_wob, should_rotate


def _url_text(url: str) -> str:
    from urllib.parse import urlparse

    parsed = urlparse(url)
    host = parsed.netloc.split(":")[0]
    labels = [l for l in host.split(".") if l not in ("www", "com", "org", "net", "example")]
    return " ".join(labels) + " " + parsed.path.replace("/", " ").replace("-", " ").replace("_", " ")


def _merge_queries(
    existing: list[SearchQueryRecord], new: list[SearchQueryRecord]
) -> list[SearchQueryRecord]:
    merged: dict[str, SearchQueryRecord] = {q.raw_query: q for q in existing}
    for q in new:
        prior = merged.get(q.raw_query)
        if prior is None:
            merged[q.raw_query] = q
        else:
            prior.frequency += q.frequency
            prior.issued_at = max(prior.issued_at, q.issued_at)
    return [merged[k] for k in sorted(merged)]


def apply_visits(
    profile: Profile,
    records: list[VisitRecord],
    tokenizer: TokenizerConfig = TokenizerConfig(),
) -> Profile:
    """Fold parsed visit records into the profile (mutates and returns it)."""
    profile.visits_present.extend(records)
    profile.url_grades = grade_urls(profile.current_wob_visits())
    new_queries = extract_search_queries(records)
    if new_queries:
        profile.search_patterns = extract_search_patterns(
            _merge_queries(profile.search_patterns, new_queries)
        )
    for record in records:
        # url host+path tokens count too, so page-defining terms repeat and
        # clear the page-local percentile cutoff
        tokens = extract_keywords(f"{record.title} {_url_text(record.url)}", tokenizer)
        if not tokens:
            continue
        profile.keyword_db = grade_keywords(tokens, profile.keyword_db)
        components = profile.url_grades[record.url]
        topics.assimilate_page(
            profile.topic_graph,
            topics.PageDigest(
                url=record.url,
                keyword_tree=KeywordTree.from_counts(tokens),
                frequency_pct=components.frequency_pct,
                duration_pct=components.duration_pct,
            ),
        )
    return profile


def apply_documents(
    profile: Profile,
    texts: list[str],
    tokenizer: TokenizerConfig = TokenizerConfig(),
) -> Profile:
    """Fold extracted document text into the offline profile."""
    for text in texts:
        for term, count in extract_keywords(text, tokenizer).items():
            entry = profile.offline_profile.get(term)
            if entry is None:
                profile.offline_profile[term] = KeywordEntry(term, count)
            else:
                entry.frequency += count
    if profile.offline_profile:
        from .grading import percentile_rank

        table = percentile_rank(
            [(t, e.frequency) for t, e in sorted(profile.offline_profile.items())]
        )
        for term, pct in table.as_dict().items():
            profile.offline_profile[term].percentile_grade = pct
    return profile


def maybe_rotate(profile: Profile) -> tuple[Profile, bool]:
    if should_rotate(profile):
        return rotate_wob(profile), True
    return profile, False
