"""Profile domain types, the window-of-observation lifecycle, and persistence.

The profile is a plain value object: ingestion and feedback mutate it under an
exclusive writer (see ``persona.service``), readers work on snapshots.
"""

from __future__ import annotations

import copy
import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

PROFILE_FORMAT_VERSION = 1

DEFAULT_SIZE_LIMIT_BYTES = 100 * 2**20
DEFAULT_EVENT_LIMIT = 10_000
DEFAULT_FRESHNESS_FACTOR = 0.9
DEFAULT_EDGE_PRUNE_THRESHOLD = 0.05


class ProfileFormatError(ValueError):
    """Raised when a profile file cannot be parsed.

    ``offset`` is the byte offset of the first unparseable position when the
    failure is a JSON syntax error, otherwise None.
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class UnsupportedVersionError(ProfileFormatError):
    pass


class Transition(enum.Enum):
    TYPED = "typed"
    CLICKED = "clicked"


@dataclass
class VisitRecord:
    url: str
    title: str
    visit_time: int
    duration: float
    transition: Transition
    last_modified_time: int = 0  # falls back to visit_time when unknown

    def __post_init__(self) -> None:
        if not self.url:
            raise ValueError("url must be non-empty")
        if self.visit_time <= 0:
            raise ValueError("visit_time must be positive")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if self.last_modified_time <= 0:
            self.last_modified_time = self.visit_time


@dataclass
class SearchQueryRecord:
    raw_query: str
    terms: list[str]
    issued_at: int
    frequency: int = 1
    percentile_grade: float = 0.0

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("terms must be non-empty")
        if self.frequency < 1:
            raise ValueError("frequency must be >= 1")
        if not 0.0 <= self.percentile_grade <= 100.0:
            raise ValueError("percentile_grade must be in [0, 100]")


@dataclass
class KeywordEntry:
    term: str
    frequency: int
    percentile_grade: float = 0.0

    def __post_init__(self) -> None:
        if self.frequency < 1:
            raise ValueError("frequency must be >= 1")
        if not 0.0 <= self.percentile_grade <= 100.0:
            raise ValueError("percentile_grade must be in [0, 100]")


def _outranks(a: KeywordEntry, b: KeywordEntry) -> bool:
    """Heap ordering: higher frequency wins, ties go to the smaller term."""
    if a.frequency != b.frequency:
        return a.frequency > b.frequency
    return a.term < b.term


class KeywordTree:
    """Max-heap of keyword entries ordered by frequency.

    The root term names the topic the tree describes.  Ties on frequency are
    broken lexicographically (ascending) so the root is deterministic.
    """

    def __init__(self, entries: Iterable[KeywordEntry] = ()):
        self._entries: list[KeywordEntry] = []
        self._index: dict[str, int] = {}
        for entry in entries:
            self.push(entry)

    @classmethod
    def from_counts(cls, counts: dict[str, int]) -> "KeywordTree":
        if not counts:
            raise ValueError("cannot build a keyword tree from an empty map")
        tree = cls()
        # sorted insertion order keeps the heap array deterministic
        for term in sorted(counts, key=lambda t: (-counts[t], t)):
            tree._entries.append(KeywordEntry(term, counts[term]))
            tree._index[term] = len(tree._entries) - 1
        return tree

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[KeywordEntry]:
        return iter(self._entries)

    def __contains__(self, term: str) -> bool:
        return term in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KeywordTree):
            return NotImplemented
        return self.as_counts() == other.as_counts()

    def __repr__(self) -> str:
        return f"KeywordTree({self.as_counts()!r})"

    @property
    def root_term(self) -> str:
        if not self._entries:
            raise ValueError("empty keyword tree has no root")
        return self._entries[0].term

    @property
    def entries(self) -> list[KeywordEntry]:
        return list(self._entries)

    def as_counts(self) -> dict[str, int]:
        return {e.term: e.frequency for e in self._entries}

    def frequency(self, term: str) -> int:
        return self._entries[self._index[term]].frequency

    def push(self, entry: KeywordEntry) -> None:
        if entry.term in self._index:
            raise ValueError(f"duplicate term {entry.term!r}")
        self._entries.append(entry)
        self._index[entry.term] = len(self._entries) - 1
        self._sift_up(len(self._entries) - 1)

    def add(self, term: str, count: int) -> None:
        """Add ``count`` occurrences of ``term``, inserting it if new."""
        if count <= 0:
            raise ValueError("count must be positive")
        i = self._index.get(term)
        if i is None:
            self.push(KeywordEntry(term, count))
        else:
            self._entries[i].frequency += count
            self._sift_up(i)

    def merge(self, other: "KeywordTree") -> None:
        """Fold another tree in, summing per-term frequencies."""
        for entry in other:
            self.add(entry.term, entry.frequency)

    def is_heap(self) -> bool:
        """Full-scan check of the heap invariant (used by tests)."""
        for i in range(1, len(self._entries)):
            parent = self._entries[(i - 1) // 2]
            child = self._entries[i]
            if _outranks(child, parent):
                return False
        return True

    def _swap(self, i: int, j: int) -> None:
        e = self._entries
        e[i], e[j] = e[j], e[i]
        self._index[e[i].term] = i
        self._index[e[j].term] = j

    def _sift_up(self, i: int) -> None:
        while i > 0:
            parent = (i - 1) // 2
            if _outranks(self._entries[i], self._entries[parent]):
                self._swap(i, parent)
                i = parent
            else:
                break


class EdgeKind(enum.Enum):
    SIMILARITY = "sim"
    HYPERLINK = "link"


@dataclass
class TopicNode:
    name: str
    keyword_tree: KeywordTree
    weight_present: float = 1.0
    weight_prev: float = 0.0
    weight_old: float = 0.0

    def __post_init__(self) -> None:
        if min(self.weight_present, self.weight_prev, self.weight_old) < 0:
            raise ValueError("topic weights must be non-negative")

    @property
    def total_weight(self) -> float:
        return self.weight_present + self.weight_prev + self.weight_old


def _edge_key(a: str, b: str) -> tuple[str, str]:
    if a == b:
        raise ValueError("self-loops are not allowed")
    return (a, b) if a < b else (b, a)


class TopicGraph:
    """Weighted undirected graph of topics.

    Edges are tagged similarity or hyperlink; both kinds count for
    connectivity.  ``url_topics`` remembers which topic absorbed each
    assimilated page so hyperlinks can be resolved to topic nodes.
    """

    def __init__(self, edge_prune_threshold: float = DEFAULT_EDGE_PRUNE_THRESHOLD):
        self.nodes: dict[str, TopicNode] = {}
        self.edges: dict[tuple[str, str], tuple[float, EdgeKind]] = {}
        self.edge_prune_threshold = edge_prune_threshold
        self.url_topics: dict[str, str] = {}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TopicGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and self.edge_prune_threshold == other.edge_prune_threshold
            and self.url_topics == other.url_topics
        )

    def __repr__(self) -> str:
        return f"TopicGraph(nodes={sorted(self.nodes)}, edges={len(self.edges)})"

    def add_node(self, node: TopicNode) -> None:
        if node.name in self.nodes:
            raise ValueError(f"topic {node.name!r} already exists")
        self.nodes[node.name] = node

    def set_edge(self, a: str, b: str, weight: float, kind: EdgeKind) -> None:
        if a not in self.nodes or b not in self.nodes:
            raise ValueError("edge endpoints must exist")
        if weight < 0:
            raise ValueError("edge weight must be non-negative")
        self.edges[_edge_key(a, b)] = (weight, kind)

    def edge_weight(self, a: str, b: str) -> float:
        entry = self.edges.get(_edge_key(a, b))
        return entry[0] if entry else 0.0

    def neighbors(self, name: str) -> list[str]:
        out = []
        for (a, b) in self.edges:
            if a == name:
                out.append(b)
            elif b == name:
                out.append(a)
        return out

    def max_edge_weight(self) -> float:
        return max((w for w, _ in self.edges.values()), default=0.0)

    def remove_node(self, name: str) -> None:
        del self.nodes[name]
        self.edges = {k: v for k, v in self.edges.items() if name not in k}
        self.url_topics = {u: t for u, t in self.url_topics.items() if t != name}

    def rename_node(self, old: str, new: str) -> None:
        """Rename a topic, re-pointing its edges and URL associations.

        If ``new`` already names another topic the two are folded together:
        trees merged, band weights summed, parallel edges keep max weight.
        """
        if old == new:
            return
        node = self.nodes.pop(old)
        target = self.nodes.get(new)
        if target is not None:
            target.keyword_tree.merge(node.keyword_tree)
            target.weight_present += node.weight_present
            target.weight_prev += node.weight_prev
            target.weight_old += node.weight_old
        else:
            node.name = new
            self.nodes[new] = node
        rewired: dict[tuple[str, str], tuple[float, EdgeKind]] = {}
        for (a, b), (w, kind) in self.edges.items():
            a2 = new if a == old else a
            b2 = new if b == old else b
            if a2 == b2:
                continue  # edge collapsed onto the merged node
            key = _edge_key(a2, b2)
            prev = rewired.get(key)
            if prev is None or w > prev[0]:
                rewired[key] = (w, kind)
        self.edges = rewired
        self.url_topics = {
            u: (new if t == old else t) for u, t in self.url_topics.items()
        }


@dataclass
class UrlGrade:
    url: str
    frequency_pct: float
    duration_pct: float
    typed: int
    freshness_value: float
    total: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("frequency_pct", "duration_pct", "freshness_value"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.typed not in (0, 1):
            raise ValueError("typed must be 0 or 1")
        self.total = (self.frequency_pct + self.duration_pct + self.typed) * self.freshness_value


@dataclass
class WobConfig:
    size_limit_bytes: int = DEFAULT_SIZE_LIMIT_BYTES
    event_limit: int = DEFAULT_EVENT_LIMIT
    freshness_factor: float = DEFAULT_FRESHNESS_FACTOR

    def __post_init__(self) -> None:
        if self.size_limit_bytes <= 0 or self.event_limit <= 0:
            raise ValueError("limits must be positive")
        if not 0.0 < self.freshness_factor <= 1.0:
            raise ValueError("freshness_factor must be in (0, 1]")


@dataclass
class GradeCoefficients:
    """Blend weights for the six re-ranking signals."""

    a: float  # url grade
    b: float  # keyword weight
    c: float  # topic value
    d: float  # offline value
    e: float  # web rank
    f: float  # search pattern grade

    def __post_init__(self) -> None:
        vals = (self.a, self.b, self.c, self.d, self.e, self.f)
        if any(not 0.0 <= v <= 1.0 for v in vals):
            raise ValueError("coefficients must be in [0, 1]")
        if not math.isclose(sum(vals), 1.0, abs_tol=1e-9):
            raise ValueError("coefficients must sum to 1")

    @classmethod
    def uniform(cls) -> "GradeCoefficients":
        return cls(1 / 6, 1 / 6, 1 / 6, 1 / 6, 1 / 6, 1 / 6)


@dataclass
class Profile:
    """The whole user model."""

    wob_config: WobConfig = field(default_factory=WobConfig)
    visits_present: list[VisitRecord] = field(default_factory=list)
    visits_prev: list[VisitRecord] = field(default_factory=list)
    visits_old: list[VisitRecord] = field(default_factory=list)
    keyword_db: dict[str, KeywordEntry] = field(default_factory=dict)
    topic_graph: TopicGraph = field(default_factory=TopicGraph)
    url_grades: dict[str, UrlGrade] = field(default_factory=dict)
    search_patterns: list[SearchQueryRecord] = field(default_factory=list)
    offline_profile: dict[str, KeywordEntry] = field(default_factory=dict)
    coefficients: GradeCoefficients = field(default_factory=GradeCoefficients.uniform)

    def current_wob_visits(self) -> list[VisitRecord]:
        """Visits in the current window of observation (Present + Prev)."""
        return self.visits_present + self.visits_prev

    def events_since_rotation(self) -> int:
        return len(self.visits_present)

    def snapshot(self) -> "Profile":
        return copy.deepcopy(self)


def rotate_wob(profile: Profile) -> Profile:
    """Retire the present observation window.

    Topic weights shift one band down; the retired Prev and Old bands merge
    into Old under the freshness decay.  Visit records shift identically.
    Edges and topics that decay below the prune threshold are dropped.
    """
    new = profile.snapshot()
    ff = new.wob_config.freshness_factor
    graph = new.topic_graph
    for node in graph.nodes.values():
        node.weight_old = ff * (node.weight_old + node.weight_prev)
        node.weight_prev = node.weight_present
        node.weight_present = 0.0
    threshold = graph.edge_prune_threshold
    graph.edges = {k: v for k, v in graph.edges.items() if v[0] >= threshold}
    for name in [n for n, node in graph.nodes.items() if node.total_weight < threshold]:
        graph.remove_node(name)
    new.visits_old = new.visits_old + new.visits_prev
    new.visits_prev = new.visits_present
    new.visits_present = []
    return new


def should_rotate(profile: Profile) -> bool:
    cfg = profile.wob_config
    if profile.events_since_rotation() >= cfg.event_limit:
        return True
    return profile_size_bytes(profile) >= cfg.size_limit_bytes


def profile_size_bytes(profile: Profile) -> int:
    return len(dumps_profile(profile).encode("utf-8"))


# ---------------------------------------------------------------------------
# persistence (versioned JSON, see README for the schema)
# ---------------------------------------------------------------------------

def _visit_to_json(v: VisitRecord) -> dict:
    return {
        "url": v.url,
        "title": v.title,
        "visit_time": int(v.visit_time),
        "duration": v.duration,
        "transition": v.transition.value,
        "last_modified_time": int(v.last_modified_time),
    }


def _visit_from_json(d: dict) -> VisitRecord:
    return VisitRecord(
        url=d["url"],
        title=d.get("title", ""),
        visit_time=d["visit_time"],
        duration=d["duration"],
        transition=Transition(d["transition"]),
        last_modified_time=d.get("last_modified_time", 0),
    )


def _entry_to_json(e: KeywordEntry) -> dict:
    return {"term": e.term, "frequency": e.frequency, "percentile_grade": e.percentile_grade}


def _entry_from_json(d: dict) -> KeywordEntry:
    return KeywordEntry(d["term"], d["frequency"], d.get("percentile_grade", 0.0))


def _graph_to_json(g: TopicGraph) -> dict:
    nodes = []
    for name in sorted(g.nodes):
        node = g.nodes[name]
        nodes.append(
            {
                "name": node.name,
                "tree": [_entry_to_json(e) for e in node.keyword_tree],
                "weight_present": node.weight_present,
                "weight_prev": node.weight_prev,
                "weight_old": node.weight_old,
            }
        )
    edges = [
        {"a": a, "b": b, "w": w, "kind": kind.value}
        for (a, b), (w, kind) in sorted(g.edges.items())
    ]
    return {
        "nodes": nodes,
        "edges": edges,
        "edge_prune_threshold": g.edge_prune_threshold,
        "url_topics": dict(sorted(g.url_topics.items())),
    }


def _graph_from_json(d: dict) -> TopicGraph:
    g = TopicGraph(edge_prune_threshold=d.get("edge_prune_threshold", DEFAULT_EDGE_PRUNE_THRESHOLD))
    for nd in d.get("nodes", []):
        tree = KeywordTree(_entry_from_json(e) for e in nd["tree"])
        g.add_node(
            TopicNode(
                name=nd["name"],
                keyword_tree=tree,
                weight_present=nd["weight_present"],
                weight_prev=nd["weight_prev"],
                weight_old=nd["weight_old"],
            )
        )
    for ed in d.get("edges", []):
        g.set_edge(ed["a"], ed["b"], ed["w"], EdgeKind(ed["kind"]))
    g.url_topics = dict(d.get("url_topics", {}))
    return g


def dumps_profile(profile: Profile) -> str:
    doc = {
        "version": PROFILE_FORMAT_VERSION,
        "wob_config": {
            "size_limit_bytes": profile.wob_config.size_limit_bytes,
            "event_limit": profile.wob_config.event_limit,
            "freshness_factor": profile.wob_config.freshness_factor,
        },
        "visits": {
            "present": [_visit_to_json(v) for v in profile.visits_present],
            "prev": [_visit_to_json(v) for v in profile.visits_prev],
            "old": [_visit_to_json(v) for v in profile.visits_old],
        },
        "keyword_db": [_entry_to_json(e) for _, e in sorted(profile.keyword_db.items())],
        "topic_graph": _graph_to_json(profile.topic_graph),
        "url_grades": [
            {
                "url": g.url,
                "frequency_pct": g.frequency_pct,
                "duration_pct": g.duration_pct,
                "typed": g.typed,
                "freshness_value": g.freshness_value,
                "total": g.total,
            }
            for _, g in sorted(profile.url_grades.items())
        ],
        "search_patterns": [
            {
                "query": q.raw_query,
                "terms": q.terms,
                "issued_at": int(q.issued_at),
                "frequency": q.frequency,
                "percentile_grade": q.percentile_grade,
            }
            for q in profile.search_patterns
        ],
        "offline_profile": [_entry_to_json(e) for _, e in sorted(profile.offline_profile.items())],
        "coefficients": {
            "a": profile.coefficients.a,
            "b": profile.coefficients.b,
            "c": profile.coefficients.c,
            "d": profile.coefficients.d,
            "e": profile.coefficients.e,
            "f": profile.coefficients.f,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def loads_profile(text: str) -> Profile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileFormatError(f"invalid profile JSON: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(doc, dict):
        raise ProfileFormatError("profile document must be a JSON object")
    version = doc.get("version")
    if version != PROFILE_FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"unsupported profile version {version!r} (expected {PROFILE_FORMAT_VERSION})"
        )
    try:
        wob = doc["wob_config"]
        visits = doc["visits"]
        profile = Profile(
            wob_config=WobConfig(
                size_limit_bytes=wob["size_limit_bytes"],
                event_limit=wob["event_limit"],
                freshness_factor=wob["freshness_factor"],
            ),
            visits_present=[_visit_from_json(v) for v in visits["present"]],
            visits_prev=[_visit_from_json(v) for v in visits["prev"]],
            visits_old=[_visit_from_json(v) for v in visits["old"]],
            keyword_db={e["term"]: _entry_from_json(e) for e in doc["keyword_db"]},
            topic_graph=_graph_from_json(doc["topic_graph"]),
            url_grades={
                g["url"]: UrlGrade(
                    url=g["url"],
                    frequency_pct=g["frequency_pct"],
                    duration_pct=g["duration_pct"],
                    typed=g["typed"],
                    freshness_value=g["freshness_value"],
                )
                for g in doc["url_grades"]
            },
            search_patterns=[
                SearchQueryRecord(
                    raw_query=q["query"],
                    terms=list(q["terms"]),
                    issued_at=q["issued_at"],
                    frequency=q["frequency"],
                    percentile_grade=q["percentile_grade"],
                )
                for q in doc["search_patterns"]
            ],
            offline_profile={e["term"]: _entry_from_json(e) for e in doc["offline_profile"]},
            coefficients=GradeCoefficients(**doc["coefficients"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ProfileFormatError):
            raise
        raise ProfileFormatError(f"malformed profile document: {exc}") from exc
    return profile


def save_profile(profile: Profile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_profile(profile))


def load_profile(path) -> Profile:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_profile(fh.read())
