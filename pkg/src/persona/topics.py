"""Topic clustering: page assimilation, weight propagation, decay, components.

Topics live in an undirected weighted graph.  Each topic's keyword tree is a
max-heap whose root names the topic; pages are folded into the closest topic
by cosine similarity of keyword-frequency vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import EdgeKind, KeywordTree, TopicGraph, TopicNode

DEFAULT_SIM_THRESHOLD = 0.5

TOPIC_VALUE_CURRENT_WEIGHT = 0.75
TOPIC_VALUE_OLD_WEIGHT = 0.25


@dataclass
class PageDigest:
    """What the topic engine needs to know about one visited page."""

    url: str
    keyword_tree: KeywordTree
    out_links: list[str] = field(default_factory=list)
    frequency_pct: float = 0.0
    duration_pct: float = 0.0


def build_keyword_tree(freq_map: dict[str, int]) -> KeywordTree:
    return KeywordTree.from_counts(freq_map)


def tree_similarity(t1: KeywordTree, t2: KeywordTree) -> float:
    """Cosine similarity between the trees' term-frequency vectors."""
    c1, c2 = t1.as_counts(), t2.as_counts()
    dot = sum(f * c2[t] for t, f in c1.items() if t in c2)
    if dot == 0:
        return 0.0
    n1 = math.sqrt(sum(f * f for f in c1.values()))
    n2 = math.sqrt(sum(f * f for f in c2.values()))
    return dot / (n1 * n2)


def topic_value(topic: TopicNode) -> float:
    """Blend of current-window weight (0.75) and retired-window weight (0.25)."""
    current = topic.weight_present + topic.weight_prev
    return TOPIC_VALUE_CURRENT_WEIGHT * current + TOPIC_VALUE_OLD_WEIGHT * topic.weight_old


def best_matching_topic(graph: TopicGraph, tree: KeywordTree) -> tuple[str | None, float]:
    """Topic with the highest keyword-tree similarity (deterministic tie-break)."""
    best_name: str | None = None
    best_sim = 0.0
    for name in sorted(graph.nodes):
        sim = tree_similarity(tree, graph.nodes[name].keyword_tree)
        if sim > best_sim:
            best_name, best_sim = name, sim
    return best_name, best_sim


def _propagate(graph: TopicGraph, origin: str, delta: float) -> None:
    """One-hop spread of a weight gain, proportional to edge weight."""
    w_max = max(graph.max_edge_weight(), 1.0)
    for neighbor in graph.neighbors(origin):
        share = delta * graph.edge_weight(origin, neighbor) / w_max
        graph.nodes[neighbor].weight_present += share


def assimilate_page(
    graph: TopicGraph,
    page: PageDigest,
    sim_threshold: float = DEFAULT_SIM_THRESHOLD,
) -> TopicGraph:
    """Fold one page into the topic graph (mutates and returns ``graph``).

    Exact root-term match merges trees directly; otherwise the page joins the
    most similar topic above ``sim_threshold``, or founds a new topic with
    weight 1.  Matched topics gain (frequency + duration) * similarity, a
    fraction of which propagates to one-hop neighbors.
    """
    if len(page.keyword_tree) == 0:
        raise ValueError("page keyword tree must be non-empty")
    page_root = page.keyword_tree.root_term

    if page_root in graph.nodes:
        node = graph.nodes[page_root]
        sim_factor = 1.0
        node.keyword_tree.merge(page.keyword_tree)
        graph.rename_node(page_root, node.keyword_tree.root_term)
        matched = node.keyword_tree.root_term
    else:
        candidate, sim = best_matching_topic(graph, page.keyword_tree)
        if candidate is not None and sim >= sim_threshold:
            node = graph.nodes[candidate]
            sim_factor = sim
            node.keyword_tree.merge(page.keyword_tree)
            graph.rename_node(candidate, node.keyword_tree.root_term)
            matched = node.keyword_tree.root_term
        else:
            new_node = TopicNode(name=page_root, keyword_tree=page.keyword_tree)
            graph.add_node(new_node)
            for link in page.out_links:
                target = graph.url_topics.get(link)
                if target is None or target == page_root:
                    continue
                kind = EdgeKind.HYPERLINK
                graph.set_edge(page_root, target, graph.edge_weight(page_root, target) + 1.0, kind)
            for other in sorted(graph.nodes):
                if other == page_root:
                    continue
                sim = tree_similarity(page.keyword_tree, graph.nodes[other].keyword_tree)
                if sim >= sim_threshold:
                    weight = max(graph.edge_weight(page_root, other), sim)
                    graph.set_edge(page_root, other, weight, EdgeKind.SIMILARITY)
            graph.url_topics[page.url] = page_root
            return graph

    delta = (page.frequency_pct + page.duration_pct) * sim_factor
    graph.nodes[matched].weight_present += delta
    _propagate(graph, matched, delta)
    graph.url_topics[page.url] = matched
    return graph


def decay_and_prune(graph: TopicGraph) -> TopicGraph:
    """Drop edges below the prune threshold, then topics with negligible weight.

    Weight decay itself happens at WOB rotation (see ``model.rotate_wob``);
    this is the structural cleanup half.
    """
    threshold = graph.edge_prune_threshold
    graph.edges = {k: v for k, v in graph.edges.items() if v[0] >= threshold}
    for name in [n for n, node in graph.nodes.items() if node.total_weight < threshold]:
        graph.remove_node(name)
    return graph


def clusters(graph: TopicGraph) -> list[set[str]]:
    """Connected components (both edge kinds count), ordered by smallest member."""
    seen: set[str] = set()
    adjacency: dict[str, set[str]] = {name: set() for name in graph.nodes}
    for a, b in graph.edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    components: list[set[str]] = []
    for start in sorted(graph.nodes):
        if start in seen:
            continue
        component: set[str] = set()
        stack = [start]
        while stack:
            name = stack.pop()
            if name in component:
                continue
            component.add(name)
            stack.extend(adjacency[name] - component)
        seen |= component
        components.append(component)
    return components


def cluster_of(graph: TopicGraph, name: str) -> int:
    """Index of the cluster containing ``name`` in ``clusters(graph)`` order."""
    for i, component in enumerate(clusters(graph)):
        if name in component:
            return i
    raise KeyError(name)


def export_edge_list(graph: TopicGraph) -> str:
    """Tab-separated edge list for inspection: a, b, weight, kind."""
    lines = [
        f"{a}\t{b}\t{w:g}\t{kind.value}"
        for (a, b), (w, kind) in sorted(graph.edges.items())
    ]
    return "\n".join(lines) + ("\n" if lines else "")
