"""HTTP JSON API exposing the engine to the UI and other clients.

Single-writer discipline: mutating endpoints take a non-blocking writer lock
(a second concurrent writer gets 409), work on a deep copy, persist the new
profile to disk, and only then swap the in-memory reference.  Readers always
see a complete snapshot, and an acknowledged mutation is never lost.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import topics
from .grading import percentile_rank
from .ingest import TokenizerConfig, parse_history
from .model import (
    GradeCoefficients,
    Profile,
    WobConfig,
    load_profile,
    rotate_wob,
    save_profile,
)
from .pipeline import apply_visits, maybe_rotate
from .rerank import (
    DEFAULT_BANK_SIZE,
    FixtureProvider,
    HttpProvider,
    ProviderError,
    SearchProvider,
    fetch_results,
    record_click,
    rerank,
)


def provider_from_spec(spec: str) -> SearchProvider:
    """Build a provider from a spec string: ``fixture:<file>`` or ``http:<url template>``."""
    kind, _, rest = spec.partition(":")
    if kind == "fixture":
        if not rest:
            raise ValueError("fixture provider needs a file path")
        return FixtureProvider.from_file(rest)
    if kind == "http":
        if not rest:
            raise ValueError("http provider needs a URL template")
        return HttpProvider(rest)
    raise ValueError(f"unknown provider spec {spec!r}")


@dataclass
class ServiceConfig:
    listen: str = "127.0.0.1:8765"
    profile_path: str = "profile.json"
    provider_spec: str = ""
    coefficients: GradeCoefficients | None = None
    wob_config: WobConfig | None = None
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    cors_allowed_origins: list[str] = field(default_factory=list)

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        cfg = cls(**overrides)
        cfg.listen = os.environ.get("PERSONA_LISTEN", cfg.listen)
        cfg.profile_path = os.environ.get("PERSONA_PROFILE", cfg.profile_path)
        cfg.provider_spec = os.environ.get("PERSONA_PROVIDER", cfg.provider_spec)
        return cfg


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse a simple ``key=value`` config file (``#`` comments, blank lines ok)."""
    out: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed config line: {line!r}")
        out[key.strip()] = value.strip()
    return out


class ProfileStore:
    """Owns the profile value; serializes writers, hands snapshots to readers."""

    def __init__(self, path: str | Path, template: Profile | None = None):
        self.path = Path(path)
        self._writer_lock = threading.Lock()
        if self.path.exists():
            self._profile = load_profile(self.path)
        else:
            self._profile = template if template is not None else Profile()
            save_profile(self._profile, self.path)

    @property
    def profile(self) -> Profile:
        return self._profile  # reference swap is atomic; snapshot is never mutated

    def mutate(self, fn):
        """Apply ``fn`` to a copy under the writer lock; persist before swapping."""
        if not self._writer_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="another writer is active")
        try:
            candidate = self._profile.snapshot()
            result = fn(candidate)
            profile = result if isinstance(result, Profile) else candidate
            save_profile(profile, self.path)
            self._profile = profile
            return profile
        finally:
            self._writer_lock.release()


def _summary(profile: Profile) -> dict:
    graph = profile.topic_graph
    component_index: dict[str, int] = {}
    for i, component in enumerate(topics.clusters(graph)):
        for name in component:
            component_index[name] = i
    top_keywords = sorted(
        profile.keyword_db.values(), key=lambda e: (-e.frequency, e.term)
    )[:20]
    top_topics = sorted(
        graph.nodes.values(), key=lambda n: (-topics.topic_value(n), n.name)
    )[:10]
    return {
        "counts": {
            "visits": len(profile.visits_present)
            + len(profile.visits_prev)
            + len(profile.visits_old),
            "keywords": len(profile.keyword_db),
            "topics": len(graph.nodes),
            "edges": len(graph.edges),
            "search_patterns": len(profile.search_patterns),
            "offline_terms": len(profile.offline_profile),
        },
        "wob_bands": {
            "present": len(profile.visits_present),
            "prev": len(profile.visits_prev),
            "old": len(profile.visits_old),
        },
        "top_keywords": [
            {"term": e.term, "frequency": e.frequency, "percentile": e.percentile_grade}
            for e in top_keywords
        ],
        "top_topics": [
            {
                "name": n.name,
                "topic_value": topics.topic_value(n),
                "cluster": component_index[n.name],
            }
            for n in top_topics
        ],
    }


def create_app(config: ServiceConfig, provider: SearchProvider | None = None) -> FastAPI:
    if provider is None:
        if not config.provider_spec:
            raise ValueError("a provider spec is required")
        provider = provider_from_spec(config.provider_spec)

    template = Profile()
    if config.wob_config is not None:
        template.wob_config = config.wob_config
    if config.coefficients is not None:
        template.coefficients = config.coefficients
    store = ProfileStore(config.profile_path, template=template)
    if config.coefficients is not None and store.profile.coefficients != config.coefficients:
        store.mutate(lambda p: setattr(p, "coefficients", config.coefficients) or p)

    app = FastAPI(title="persona", docs_url=None, redoc_url=None)
    if config.cors_allowed_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_allowed_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )
    app.state.store = store
    bank_cache: dict[str, object] = {}

    @app.get("/api/profile/summary")
    def profile_summary():
        return _summary(store.profile)

    @app.post("/api/ingest/history")
    async def ingest_history(request: Request):
        body = (await request.body()).decode("utf-8", errors="replace")
        records, rejects = parse_history(body.splitlines())

        def apply(profile: Profile) -> Profile:
            apply_visits(profile, records, config.tokenizer)
            profile, _ = maybe_rotate(profile)
            return profile

        store.mutate(apply)
        return {
            "accepted": len(records),
            "rejected": len(rejects),
            "rejects": [
                {"line": r.line_number, "reason": r.reason} for r in rejects[:50]
            ],
        }

    @app.post("/api/search")
    def search(payload: dict = Body(...)):
        query = payload.get("query")
        if not isinstance(query, str) or not query.strip():
            raise HTTPException(status_code=400, detail="query is required")
        n = payload.get("n", DEFAULT_BANK_SIZE)
        if not isinstance(n, int) or n < 1:
            raise HTTPException(status_code=400, detail="n must be a positive integer")
        try:
            bank = fetch_results(query, provider, n)
        except ProviderError as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        bank_cache[query] = bank
        ordered = rerank(bank, store.profile, tokenizer=config.tokenizer)
        return {
            "query": query,
            "results": [
                {
                    "url": r.url,
                    "title": r.title,
                    "snippet": r.snippet,
                    "original_rank": r.web_rank,
                    "revised_rank": i + 1,
                    "grade": g.grade,
                    "signals": g.signals(),
                }
                for i, (r, g) in enumerate(ordered)
            ],
        }

    @app.post("/api/feedback/click", status_code=204)
    def feedback_click(payload: dict = Body(...)):
        query = payload.get("query")
        url = payload.get("url")
        dwell = payload.get("dwell_seconds", 0)
        if not isinstance(query, str) or not isinstance(url, str) or not url:
            raise HTTPException(status_code=400, detail="query and url are required")
        if not isinstance(dwell, (int, float)) or dwell < 0:
            raise HTTPException(status_code=400, detail="dwell_seconds must be non-negative")
        bank = bank_cache.get(query)
        if bank is None:
            try:
                bank = fetch_results(query, provider, DEFAULT_BANK_SIZE)
            except ProviderError as exc:
                raise HTTPException(status_code=503, detail=str(exc))
            bank_cache[query] = bank
        match = next((r for r in bank.results if r.url == url), None)
        if match is None:
            raise HTTPException(status_code=404, detail="result not in the bank for this query")
        store.mutate(
            lambda p: record_click(p, query, match, float(dwell), tokenizer=config.tokenizer)
        )
        return Response(status_code=204)

    @app.delete("/api/profile/keyword/{term}", status_code=204)
    def delete_keyword(term: str):
        if term not in store.profile.keyword_db:
            raise HTTPException(status_code=404, detail="unknown keyword")

        def apply(profile: Profile) -> Profile:
            profile.keyword_db.pop(term, None)
            _regrade_db(profile)
            return profile

        store.mutate(apply)
        return Response(status_code=204)

    @app.put("/api/profile/keyword/{term}")
    def put_keyword(term: str, payload: dict = Body(...)):
        frequency = payload.get("frequency")
        if not isinstance(frequency, int) or frequency < 1:
            raise HTTPException(status_code=400, detail="frequency must be a positive integer")

        def apply(profile: Profile) -> Profile:
            from .model import KeywordEntry

            entry = profile.keyword_db.get(term)
            if entry is None:
                profile.keyword_db[term] = KeywordEntry(term, frequency)
            else:
                entry.frequency = frequency
            _regrade_db(profile)
            return profile

        updated = store.mutate(apply)
        entry = updated.keyword_db[term]
        return {
            "term": entry.term,
            "frequency": entry.frequency,
            "percentile": entry.percentile_grade,
        }

    @app.delete("/api/profile/topic/{name}", status_code=204)
    def delete_topic(name: str):
        if name not in store.profile.topic_graph.nodes:
            raise HTTPException(status_code=404, detail="unknown topic")
        store.mutate(lambda p: p.topic_graph.remove_node(name) or p)
        return Response(status_code=204)

    @app.post("/api/profile/rotate")
    def force_rotate():
        store.mutate(rotate_wob)
        return _summary(store.profile)

    return app


def _regrade_db(profile: Profile) -> None:
    if profile.keyword_db:
        table = percentile_rank(
            [(t, e.frequency) for t, e in sorted(profile.keyword_db.items())]
        )
        for term, pct in table.as_dict().items():
            profile.keyword_db[term].percentile_grade = pct


def run(config: ServiceConfig) -> None:
    import uvicorn

    host, _, port = config.listen.partition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port or 8765))
