"""Search bank fetching, six-signal result grading, re-ranking, and evaluation.

Grading blends six signals, each normalized to [0, 1]:

    grade = a*u_g + b*k_w + c*t_v + d*o_v + e*w_r + f*s_g

u_g: visited-URL grade; k_w: mean keyword percentile over result tokens;
t_v: relative value of the best-matching topic; o_v: cosine match against the
offline document profile; w_r: provider rank rescaled; s_g: best matching
search-pattern grade.  Re-ranking reorders the bank, never adds results.
"""

from __future__ import annotations

import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Protocol

from . import topics
from .grading import grade_keywords, grade_urls
from .ingest import TokenizerConfig, extract_keywords
from .model import KeywordTree, Profile, Transition, VisitRecord

DEFAULT_BANK_SIZE = 100


class ProviderError(RuntimeError):
    """Search provider failure; ``retryable`` hints whether retrying may help."""

    def __init__(self, message: str, retryable: bool = False):
        super().__init__(message)
        self.retryable = retryable


@dataclass(frozen=True)
class SearchResult:
    url: str
    title: str
    snippet: str
    web_rank: int


@dataclass
class SearchBank:
    query: str
    results: list[SearchResult]
    capacity: int = DEFAULT_BANK_SIZE


@dataclass(frozen=True)
class ResultGrade:
    url: str
    u_g: float
    k_w: float
    t_v: float
    o_v: float
    w_r: float
    s_g: float
    grade: float

    def signals(self) -> dict[str, float]:
        return {
            "u_g": self.u_g,
            "k_w": self.k_w,
            "t_v": self.t_v,
            "o_v": self.o_v,
            "w_r": self.w_r,
            "s_g": self.s_g,
        }


class SearchProvider(Protocol):
    def search(self, query: str, n: int) -> list[dict]:
        """Return up to n raw results: {"url", "title", "snippet"} in rank order."""
        ...


class FixtureProvider:
    """Deterministic provider backed by canned results.

    Accepts a single ``{"query": ..., "results": [...]}`` object, or a list
    of such objects keyed by query.  Unknown queries yield an empty bank.
    """

    def __init__(self, fixtures: dict | list[dict]):
        if isinstance(fixtures, dict):
            fixtures = [fixtures]
        self._by_query = {f["query"]: list(f["results"]) for f in fixtures}

    @classmethod
    def from_file(cls, path) -> "FixtureProvider":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(json.load(fh))

    def search(self, query: str, n: int) -> list[dict]:
        return list(self._by_query.get(query, []))[:n]


class HttpProvider:
    """Generic JSON-over-HTTP provider configured by URL template and field paths.

    ``url_template`` may use {query} and {n}; ``results_path`` is a dotted
    path to the result array in the response, and the ``*_field`` names pick
    each result's fields.
    """

    def __init__(
        self,
        url_template: str,
        results_path: str = "results",
        url_field: str = "url",
        title_field: str = "title",
        snippet_field: str = "snippet",
        timeout: float = 10.0,
    ):
        self.url_template = url_template
        self.results_path = results_path
        self.url_field = url_field
        self.title_field = title_field
        self.snippet_field = snippet_field
        self.timeout = timeout

    def search(self, query: str, n: int) -> list[dict]:
        import requests
        from urllib.parse import quote_plus

        url = self.url_template.format(query=quote_plus(query), n=n)
        try:
            response = requests.get(url, timeout=self.timeout)
            response.raise_for_status()
            doc = response.json()
        except requests.RequestException as exc:
            raise ProviderError(f"provider request failed: {exc}", retryable=True) from exc
        except ValueError as exc:
            raise ProviderError(f"provider returned invalid JSON: {exc}") from exc
        node = doc
        for part in self.results_path.split("."):
            if part:
                try:
                    node = node[part]
                except (KeyError, TypeError):
                    raise ProviderError(f"results path {self.results_path!r} not found")
        if not isinstance(node, list):
            raise ProviderError(f"results path {self.results_path!r} is not an array")
        return [
            {
                "url": r.get(self.url_field, ""),
                "title": r.get(self.title_field, ""),
                "snippet": r.get(self.snippet_field, ""),
            }
            for r in node
        ][:n]


def fetch_results(query: str, provider: SearchProvider, n: int = DEFAULT_BANK_SIZE) -> SearchBank:
    """Fill a search bank from the provider, deduplicating by URL (best rank kept)."""
    raw = provider.search(query, n)
    seen: set[str] = set()
    results: list[SearchResult] = []
    for row in raw:
        url = row.get("url", "")
        if not url or url in seen:
            continue
        seen.add(url)
        results.append(
            SearchResult(
                url=url,
                title=row.get("title", ""),
                snippet=row.get("snippet", ""),
                web_rank=len(results) + 1,
            )
        )
        if len(results) >= n:
            break
    return SearchBank(query=query, results=results, capacity=n)


def _result_tokens(result: SearchResult, config: TokenizerConfig) -> dict[str, int]:
    return extract_keywords(f"{result.title} {result.snippet}", config)


def _cosine(a: dict[str, int], b: dict[str, int]) -> float:
    dot = sum(f * b[t] for t, f in a.items() if t in b)
    if dot == 0:
        return 0.0
    na = math.sqrt(sum(f * f for f in a.values()))
    nb = math.sqrt(sum(f * f for f in b.values()))
    return dot / (na * nb)


def grade_result(
    result: SearchResult,
    profile: Profile,
    bank_size: int,
    tokenizer: TokenizerConfig = TokenizerConfig(),
) -> ResultGrade:
    """Compute the six signals and their blended grade for one result."""
    tokens = _result_tokens(result, tokenizer)

    url_grade = profile.url_grades.get(result.url)
    u_g = url_grade.total / 3.0 if url_grade else 0.0

    found = [profile.keyword_db[t].percentile_grade for t in tokens if t in profile.keyword_db]
    k_w = sum(found) / (100.0 * len(found)) if found else 0.0

    t_v = 0.0
    if profile.topic_graph.nodes and tokens:
        tree = KeywordTree.from_counts(tokens)
        name, sim = topics.best_matching_topic(profile.topic_graph, tree)
        if name is not None and sim > 0.0:
            max_value = max(topics.topic_value(n) for n in profile.topic_graph.nodes.values())
            if max_value > 0.0:
                t_v = topics.topic_value(profile.topic_graph.nodes[name]) / max_value

    offline_counts = {t: e.frequency for t, e in profile.offline_profile.items()}
    o_v = _cosine(tokens, offline_counts)

    n = max(bank_size, 1)
    w_r = (n - result.web_rank + 1) / n

    token_set = set(tokens)
    s_g = 0.0
    for pattern in profile.search_patterns:
        if all(term in token_set for term in pattern.terms):
            s_g = max(s_g, pattern.percentile_grade / 100.0)

    c = profile.coefficients
    grade = c.a * u_g + c.b * k_w + c.c * t_v + c.d * o_v + c.e * w_r + c.f * s_g
    return ResultGrade(result.url, u_g, k_w, t_v, o_v, w_r, s_g, grade)


def rerank(
    bank: SearchBank,
    profile: Profile,
    threshold: float = 0.0,
    tokenizer: TokenizerConfig = TokenizerConfig(),
) -> list[tuple[SearchResult, ResultGrade]]:
    """Personalized ordering: descending grade, provider rank breaks ties."""
    n = len(bank.results)
    graded = [
        (r, grade_result(r, profile, n, tokenizer))
        for r in bank.results
    ]
    kept = [(r, g) for r, g in graded if g.grade > threshold]
    kept.sort(key=lambda pair: (-pair[1].grade, pair[0].web_rank))
    return kept


def record_click(
    profile: Profile,
    query: str,
    result: SearchResult,
    dwell_seconds: float,
    now: int | None = None,
    tokenizer: TokenizerConfig = TokenizerConfig(),
) -> Profile:
    """Feed one click back into the profile (mutates and returns it).

    The click becomes a visit, the result's tokens are graded into the
    keyword database, and a page digest is assimilated into the topic graph.
    """
    ts = int(now if now is not None else time.time())
    profile.visits_present.append(
        VisitRecord(
            url=result.url,
            title=result.title,
            visit_time=ts,
            duration=max(dwell_seconds, 0.0),
            transition=Transition.CLICKED,
        )
    )
    profile.url_grades = grade_urls(profile.current_wob_visits())
    tokens = _result_tokens(result, tokenizer)
    if tokens:
        profile.keyword_db = grade_keywords(tokens, profile.keyword_db)
        components = profile.url_grades[result.url]
        digest = topics.PageDigest(
            url=result.url,
            keyword_tree=KeywordTree.from_counts(tokens),
            frequency_pct=components.frequency_pct,
            duration_pct=components.duration_pct,
        )
        topics.assimilate_page(profile.topic_graph, digest)
    return profile


@dataclass
class RankShiftRow:
    url: str
    original_rank: int
    revised_rank: int
    shift: int  # positive = moved up
    relevant: bool


@dataclass
class RankShiftReport:
    rows: list[RankShiftRow]
    not_retrieved: list[str] = field(default_factory=list)

    @property
    def relevant_rows(self) -> list[RankShiftRow]:
        return [r for r in self.rows if r.relevant]

    @property
    def mean_shift(self) -> float:
        rows = self.relevant_rows
        return sum(r.shift for r in rows) / len(rows) if rows else 0.0

    def top_k_hits(self, k: int) -> tuple[int, int]:
        """(#relevant in original top-k, #relevant in revised top-k)."""
        before = sum(1 for r in self.rows if r.relevant and r.original_rank <= k)
        after = sum(1 for r in self.rows if r.relevant and r.revised_rank <= k)
        return before, after

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("url,original_rank,revised_rank,shift,relevant\n")
        for r in self.rows:
            out.write(
                f"{r.url},{r.original_rank},{r.revised_rank},{r.shift},{int(r.relevant)}\n"
            )
        return out.getvalue()


def compare_rankings(
    original: SearchBank,
    personalized: list[tuple[SearchResult, ResultGrade]],
    relevant: set[str],
) -> RankShiftReport:
    """Per-URL rank shift between provider order and personalized order.

    Relevant URLs missing from the bank are reported as not retrieved:
    re-ranking can reorder results but never add them.
    """
    original_rank = {r.url: r.web_rank for r in original.results}
    rows = [
        RankShiftRow(
            url=result.url,
            original_rank=original_rank[result.url],
            revised_rank=revised,
            shift=original_rank[result.url] - revised,
            relevant=result.url in relevant,
        )
        for revised, (result, _) in enumerate(personalized, start=1)
    ]
    retrieved = {r.url for r in rows}
    not_retrieved = sorted(u for u in relevant if u not in retrieved)
    return RankShiftReport(rows=rows, not_retrieved=not_retrieved)
