#!/usr/bin/env python3
"""Desk-scale re-ranking experiment.

Builds a synthetic Linux-leaning profile from 20 page digests, re-ranks a
canned result bank for the query "journal" where the one relevant result sits
at provider rank 13, and prints the (revised, original) rank pairs plus the
rank-shift CSV.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from persona import topics
from persona.grading import extract_search_patterns, grade_keywords
from persona.model import KeywordTree, Profile, SearchQueryRecord
from persona.pipeline import apply_documents
from persona.rerank import FixtureProvider, compare_rankings, fetch_results, rerank


def build_profile(n_pages: int = 20, seed: int = 5) -> Profile:
    rng = random.Random(seed)
    words = ["kernel", "distro", "shell", "driver", "terminal", "package",
             "debian", "ubuntu", "fedora", "gnu"]
    profile = Profile()
    for i in range(n_pages):
        counts = {"linux": rng.randint(3, 6)}
        for w in rng.sample(words, 3):
            counts[w] = rng.randint(1, 3)
        profile.keyword_db = grade_keywords(counts, profile.keyword_db)
        topics.assimilate_page(
            profile.topic_graph,
            topics.PageDigest(
                url=f"https://linux{i}.example/",
                keyword_tree=KeywordTree.from_counts(counts),
                frequency_pct=0.5,
                duration_pct=0.5,
            ),
        )
    profile.search_patterns = extract_search_patterns([
        SearchQueryRecord("linux journal", ["linux", "journal"], 1, frequency=4),
        SearchQueryRecord("linux kernel", ["linux", "kernel"], 1, frequency=2),
    ])
    apply_documents(profile, ["linux kernel module notes",
                              "debian packaging guide for linux"])
    return profile


def journal_bank() -> dict:
    fields = ["medical", "finance", "law", "chemistry", "history", "poetry",
              "biology", "physics", "travel", "fashion", "sports", "economics",
              "psychology", "art"]
    results = [
        {"url": f"https://{f}.example/journal", "title": f"{f} journal",
         "snippet": f"{f} review quarterly"}
        for f in fields[:12]
    ]
    results.append({
        "url": "https://linuxjournal.example/",
        "title": "Linux Journal",
        "snippet": "linux kernel and distro coverage for linux enthusiasts",
    })
    results += [
        {"url": f"https://{f}.example/journal", "title": f"{f} journal",
         "snippet": f"{f} review quarterly"}
        for f in fields[12:]
    ]
    return {"query": "journal", "results": results}


def main() -> None:
    profile = build_profile()
    bank = fetch_results("journal", FixtureProvider(journal_bank()))
    ordered = rerank(bank, profile)
    relevant = {"https://linuxjournal.example/"}
    report = compare_rankings(bank, ordered, relevant)

    print("(revised, original) pairs:")
    for row in report.rows:
        marker = "  <-- relevant" if row.relevant else ""
        print(f"  ({row.revised_rank:2d}, {row.original_rank:2d}){marker}")
    print()
    print(report.to_csv())
    print(f"mean shift over relevant results: {report.mean_shift:+.1f}")
    for k in (1, 3, 10):
        before, after = report.top_k_hits(k)
        print(f"relevant in top-{k}: {before} -> {after}")


if __name__ == "__main__":
    main()
