"""Shared hypothesis strategies and fixture builders."""

from __future__ import annotations

import string

from hypothesis import strategies as st

from persona.model import (
    EdgeKind,
    GradeCoefficients,
    KeywordEntry,
    KeywordTree,
    Profile,
    SearchQueryRecord,
    TopicGraph,
    TopicNode,
    Transition,
    UrlGrade,
    VisitRecord,
    WobConfig,
)

terms = st.text(alphabet=string.ascii_lowercase, min_size=3, max_size=8)

weights = st.floats(min_value=0.0, max_value=100.0, allow_nan=False)

freq_maps = st.dictionaries(terms, st.integers(min_value=1, max_value=50), min_size=1, max_size=12)


@st.composite
def keyword_trees(draw) -> KeywordTree:
    return KeywordTree.from_counts(draw(freq_maps))


@st.composite
def topic_nodes(draw) -> TopicNode:
    tree = draw(keyword_trees())
    return TopicNode(
        name=tree.root_term,
        keyword_tree=tree,
        weight_present=draw(weights),
        weight_prev=draw(weights),
        weight_old=draw(weights),
    )


@st.composite
def topic_graphs(draw, max_nodes: int = 8) -> TopicGraph:
    graph = TopicGraph()
    nodes = draw(st.lists(topic_nodes(), min_size=0, max_size=max_nodes))
    for node in nodes:
        if node.name not in graph.nodes:
            graph.add_node(node)
    names = sorted(graph.nodes)
    if len(names) >= 2:
        n_edges = draw(st.integers(min_value=0, max_value=len(names) * 2))
        for _ in range(n_edges):
            i = draw(st.integers(min_value=0, max_value=len(names) - 1))
            j = draw(st.integers(min_value=0, max_value=len(names) - 1))
            if i == j:
                continue
            w = draw(st.floats(min_value=0.05, max_value=10.0, allow_nan=False))
            kind = draw(st.sampled_from([EdgeKind.SIMILARITY, EdgeKind.HYPERLINK]))
            graph.set_edge(names[i], names[j], w, kind)
    return graph


@st.composite
def visit_records(draw) -> VisitRecord:
    host = draw(st.text(alphabet=string.ascii_lowercase, min_size=3, max_size=8))
    path = draw(st.text(alphabet=string.ascii_lowercase + "/", max_size=10))
    return VisitRecord(
        url=f"https://{host}.example/{path}",
        title=draw(st.text(alphabet=string.ascii_lowercase + " ", max_size=30)),
        visit_time=draw(st.integers(min_value=1, max_value=2_000_000_000)),
        duration=draw(st.integers(min_value=0, max_value=3600)),
        transition=draw(st.sampled_from([Transition.TYPED, Transition.CLICKED])),
    )


@st.composite
def search_query_records(draw) -> SearchQueryRecord:
    ts = draw(st.lists(terms, min_size=1, max_size=4))
    return SearchQueryRecord(
        raw_query=" ".join(ts),
        terms=ts,
        issued_at=draw(st.integers(min_value=1, max_value=2_000_000_000)),
        frequency=draw(st.integers(min_value=1, max_value=20)),
        percentile_grade=draw(st.floats(min_value=0, max_value=100, allow_nan=False)),
    )


@st.composite
def keyword_entries(draw) -> KeywordEntry:
    return KeywordEntry(
        term=draw(terms),
        frequency=draw(st.integers(min_value=1, max_value=100)),
        percentile_grade=draw(st.floats(min_value=0, max_value=100, allow_nan=False)),
    )


@st.composite
def url_grades(draw, url: str) -> UrlGrade:
    return UrlGrade(
        url=url,
        frequency_pct=draw(st.floats(min_value=0, max_value=1, allow_nan=False)),
        duration_pct=draw(st.floats(min_value=0, max_value=1, allow_nan=False)),
        typed=draw(st.sampled_from([0, 1])),
        freshness_value=draw(st.floats(min_value=0, max_value=1, allow_nan=False)),
    )


@st.composite
def profiles(draw) -> Profile:
    visits = draw(st.lists(visit_records(), max_size=6))
    grade_urls = draw(st.lists(visit_records(), max_size=4))
    entries = draw(st.lists(keyword_entries(), max_size=8))
    offline = draw(st.lists(keyword_entries(), max_size=6))
    return Profile(
        wob_config=WobConfig(
            event_limit=draw(st.integers(min_value=1, max_value=100_000)),
        ),
        visits_present=visits,
        visits_prev=draw(st.lists(visit_records(), max_size=4)),
        visits_old=draw(st.lists(visit_records(), max_size=4)),
        keyword_db={e.term: e for e in entries},
        topic_graph=draw(topic_graphs()),
        url_grades={v.url: draw(url_grades(v.url)) for v in grade_urls},
        search_patterns=draw(st.lists(search_query_records(), max_size=5)),
        offline_profile={e.term: e for e in offline},
        coefficients=GradeCoefficients.uniform(),
    )
