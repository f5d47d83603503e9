"""Profile domain types, WOB rotation, and persistence."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persona.model import (
    GradeCoefficients,
    KeywordEntry,
    KeywordTree,
    Profile,
    ProfileFormatError,
    TopicGraph,
    TopicNode,
    UnsupportedVersionError,
    UrlGrade,
    VisitRecord,
    Transition,
    WobConfig,
    dumps_profile,
    load_profile,
    loads_profile,
    rotate_wob,
    save_profile,
)

from conftest import freq_maps, profiles, topic_graphs


class TestVisitRecord:
    def test_rejects_empty_url(self):
        with pytest.raises(ValueError):
            VisitRecord("", "t", 1, 0, Transition.TYPED)

    def test_rejects_negative_duration(self):
        with pytest.raises(ValueError):
            VisitRecord("https://a.example", "t", 1, -1, Transition.TYPED)

    def test_last_modified_defaults_to_visit_time(self):
        v = VisitRecord("https://a.example", "t", 1700, 5, Transition.CLICKED)
        assert v.last_modified_time == 1700


class TestKeywordTree:
    def test_root_is_highest_frequency(self):
        tree = KeywordTree.from_counts({"linux": 5, "kernel": 2})
        assert tree.root_term == "linux"

    def test_lexicographic_tie_break(self):
        tree = KeywordTree.from_counts({"b": 3, "a": 3})
        assert tree.root_term == "a"

    def test_empty_map_rejected(self):
        with pytest.raises(ValueError):
            KeywordTree.from_counts({})

    def test_duplicate_term_rejected(self):
        tree = KeywordTree.from_counts({"a": 1})
        with pytest.raises(ValueError):
            tree.push(KeywordEntry("a", 2))

    @given(freq_maps)
    def test_heap_property_after_build(self, counts):
        tree = KeywordTree.from_counts(counts)
        assert tree.is_heap()
        assert tree.root_term == min(counts, key=lambda t: (-counts[t], t))

    @given(freq_maps, freq_maps)
    def test_heap_property_after_merge(self, c1, c2):
        tree = KeywordTree.from_counts(c1)
        tree.merge(KeywordTree.from_counts(c2))
        assert tree.is_heap()
        merged = {t: c1.get(t, 0) + c2.get(t, 0) for t in set(c1) | set(c2)}
        assert tree.as_counts() == merged
        assert tree.root_term == min(merged, key=lambda t: (-merged[t], t))

    @given(freq_maps, st.randoms())
    def test_heap_property_after_incremental_adds(self, counts, rng):
        items = list(counts.items())
        rng.shuffle(items)
        tree = KeywordTree.from_counts(dict([items[0]]))
        for term, freq in items[1:]:
            tree.add(term, freq)
        assert tree.is_heap()
        assert tree.as_counts() == counts


class TestTopicGraph:
    def test_no_self_loops(self):
        from persona.model import EdgeKind

        g = TopicGraph()
        g.add_node(TopicNode("a", KeywordTree.from_counts({"a": 1})))
        with pytest.raises(ValueError):
            g.set_edge("a", "a", 1.0, EdgeKind.SIMILARITY)

    def test_edge_endpoints_must_exist(self):
        from persona.model import EdgeKind

        g = TopicGraph()
        g.add_node(TopicNode("a", KeywordTree.from_counts({"a": 1})))
        with pytest.raises(ValueError):
            g.set_edge("a", "missing", 1.0, EdgeKind.SIMILARITY)


class TestGradeCoefficients:
    def test_uniform_is_valid(self):
        c = GradeCoefficients.uniform()
        assert math.isclose(c.a + c.b + c.c + c.d + c.e + c.f, 1.0, abs_tol=1e-9)

    def test_bad_sum_rejected(self):
        with pytest.raises(ValueError):
            GradeCoefficients(0.2, 0.2, 0.2, 0.2, 0.2, 0.2)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            GradeCoefficients(1.5, -0.5, 0, 0, 0, 0)


class TestUrlGrade:
    def test_total_formula(self):
        g = UrlGrade("u", 0.5, 0.5, 1, 0.5)
        assert g.total == (0.5 + 0.5 + 1) * 0.5

    def test_total_bounds(self):
        assert UrlGrade("u", 1.0, 1.0, 1, 1.0).total == 3.0
        assert UrlGrade("u", 0.0, 0.0, 0, 0.0).total == 0.0


class TestRotateWob:
    def _graph_with_weights(self, weights):
        g = TopicGraph()
        for i, (present, prev, old) in enumerate(weights):
            name = f"t{i}"
            g.add_node(
                TopicNode(name, KeywordTree.from_counts({name: 1}), present, prev, old)
            )
        return g

    def test_single_topic_decay(self):
        p = Profile(topic_graph=self._graph_with_weights([(4, 6, 10)]))
        rotated = rotate_wob(p)
        node = rotated.topic_graph.nodes["t0"]
        assert node.weight_present == 0
        assert node.weight_prev == 4
        assert node.weight_old == 0.9 * 16

    def test_empty_profile_identity(self):
        p = Profile()
        rotated = rotate_wob(p)
        assert rotated == p

    def test_double_rotation_matches_recurrence(self):
        rng = random.Random(7)
        weights = [
            (rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(3)
        ]
        p = Profile(topic_graph=self._graph_with_weights(weights))
        twice = rotate_wob(rotate_wob(p))
        for i, (present, prev, old) in enumerate(weights):
            # hand-applied recurrence, two steps
            old1 = 0.9 * (old + prev)
            prev1 = present
            old2 = 0.9 * (old1 + prev1)
            node = twice.topic_graph.nodes[f"t{i}"]
            assert node.weight_present == 0
            assert node.weight_prev == 0
            assert node.weight_old == old2

    def test_visit_bands_shift(self):
        v = lambda i: VisitRecord(f"https://s.example/{i}", "", 100 + i, 1, Transition.CLICKED)
        p = Profile(
            visits_present=[v(1), v(2)], visits_prev=[v(3)], visits_old=[v(4)]
        )
        rotated = rotate_wob(p)
        assert rotated.visits_present == []
        assert rotated.visits_prev == [v(1), v(2)]
        assert rotated.visits_old == [v(4), v(3)]

    def test_weak_topics_and_edges_pruned(self):
        from persona.model import EdgeKind

        g = self._graph_with_weights([(0.01, 0.01, 0.01), (5, 0, 0)])
        g.set_edge("t0", "t1", 0.04, EdgeKind.SIMILARITY)
        rotated = rotate_wob(Profile(topic_graph=g))
        assert "t0" not in rotated.topic_graph.nodes
        assert rotated.topic_graph.edges == {}

    @given(topic_graphs())
    @settings(max_examples=50)
    def test_decay_mass_conservation(self, graph):
        p = Profile(topic_graph=graph)
        before = {
            name: (n.weight_old + n.weight_prev) for name, n in graph.nodes.items()
        }
        rotated = rotate_wob(p)
        for name, node in rotated.topic_graph.nodes.items():
            assert node.weight_present == 0
            assert node.weight_old == 0.9 * before[name]


class TestPersistence:
    def test_empty_profile_round_trip_byte_identical(self, tmp_path):
        p = Profile()
        path = tmp_path / "profile.json"
        save_profile(p, path)
        first = path.read_bytes()
        save_profile(load_profile(path), path)
        assert path.read_bytes() == first

    @given(profiles())
    @settings(max_examples=50, deadline=None)
    def test_round_trip_structural_equality(self, profile):
        assert loads_profile(dumps_profile(profile)) == profile

    def test_truncated_file_parse_error(self, tmp_path):
        path = tmp_path / "profile.json"
        save_profile(Profile(), path)
        path.write_text(path.read_text()[: len(path.read_text()) // 2])
        with pytest.raises(ProfileFormatError) as excinfo:
            load_profile(path)
        assert excinfo.value.offset is not None

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "profile.json"
        save_profile(Profile(), path)
        text = path.read_text().replace('"version": 1', '"version": 99')
        path.write_text(text)
        with pytest.raises(UnsupportedVersionError):
            load_profile(path)

    def test_garbage_is_format_error_not_crash(self):
        with pytest.raises(ProfileFormatError):
            loads_profile("not json at all {")
        with pytest.raises(ProfileFormatError):
            loads_profile('{"version": 1}')


class TestWobConfig:
    def test_defaults(self):
        cfg = WobConfig()
        assert cfg.size_limit_bytes == 100 * 2**20
        assert cfg.event_limit == 10_000
        assert cfg.freshness_factor == 0.9

    def test_bad_freshness_rejected(self):
        with pytest.raises(ValueError):
            WobConfig(freshness_factor=0.0)
        with pytest.raises(ValueError):
            WobConfig(freshness_factor=1.5)
